use latmod::channel::{lattice_quantize, known_second_moment, Bits, FoldedRecord};
use latmod::stats::{estimate_second_moment, predicted_mse, sample_uniform_cell_batch};
use latmod::{LatticeKind, ScaledLattice};
use ndarray::Array2;

#[test]
fn second_moment_is_scale_invariant() {
    for (kind, n) in [(LatticeKind::A2, 2), (LatticeKind::E8, 8)] {
        let a = estimate_second_moment(&ScaledLattice::new(kind, n, 0.1).unwrap(), 200_000, 1).unwrap();
        let b = estimate_second_moment(&ScaledLattice::new(kind, n, 1.0).unwrap(), 200_000, 2).unwrap();
        let tol = 3.0 * (a.std_err.powi(2) + b.std_err.powi(2)).sqrt();
        assert!((a.g - b.g).abs() <= tol, "{kind}: {} vs {}", a.g, b.g);
    }
}

#[test]
fn standard_error_shrinks_as_inverse_root() {
    let l = ScaledLattice::new(LatticeKind::Dn, 4, 1.0).unwrap();
    let small = estimate_second_moment(&l, 10_000, 3).unwrap();
    let large = estimate_second_moment(&l, 1_000_000, 3).unwrap();
    let ratio = small.std_err / large.std_err;
    assert!((ratio / 10.0 - 1.0).abs() < 0.1, "ratio {ratio}");
}

#[test]
fn cell_samples_have_zero_mean() {
    let l = ScaledLattice::new(LatticeKind::E8, 8, 1.0).unwrap();
    let m = 1_000_000;
    let xs = sample_uniform_cell_batch(&l, m, 4);
    let var = predicted_mse(&l, known_second_moment(LatticeKind::E8, 8).unwrap()) / 8.0;
    for c in 0..8 {
        let mean = xs.iter().skip(c).step_by(8).sum::<f64>() / m as f64;
        assert!(mean.abs() < 4.0 * (var / m as f64).sqrt(), "coordinate {c}: {mean}");
    }
}

#[test]
fn matched_quantizer_scaling_law() {
    for (kind, n) in [(LatticeKind::Zn, 2), (LatticeKind::A2, 2), (LatticeKind::Dn, 4), (LatticeKind::E8, 8)] {
        let l = ScaledLattice::new(kind, n, 0.5).unwrap();
        let m = 200_000;
        let x = FoldedRecord::clean(Array2::from_shape_vec((m, n), sample_uniform_cell_batch(&l, m, 9)).unwrap());
        let g = known_second_moment(kind, n).unwrap();
        for b in [2u32, 4, 6] {
            let q = lattice_quantize(&x, &l, Bits::Finite(b)).unwrap();
            let mse = (&q.y - &x.y).iter().map(|v| v * v).sum::<f64>() / m as f64;
            let want = predicted_mse(&l, g) * 4f64.powi(-(b as i32));
            assert!((mse / want - 1.0).abs() < 0.02, "{kind}{n} B={b}: {mse} vs {want}");
        }
    }
}
