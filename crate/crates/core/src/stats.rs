//! Normalized second moments, MSE predictions and gain conversions.

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{LatticeKind, ScaledLattice};
use crate::seeds::{self, Rng};

/// Samples per independently seeded chunk.
const CHUNK: usize = 1 << 15;

/// Monte Carlo estimate of a lattice's normalized second moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondMomentEstimate {
    pub g: f64,
    /// `n·G·V^{2/n}`, the expected `‖r‖²` for `r` uniform on the cell.
    pub mse_per_cell: f64,
    pub n_samples: usize,
    pub std_err: f64,
}

/// A point uniform on the Voronoi cell: uniform on the fundamental
/// parallelepiped, then folded. Folding is a measure-preserving bijection
/// modulo the lattice, so no rejection is needed.
pub fn sample_uniform_cell(lattice: &ScaledLattice, rng: &mut Rng) -> Vec<f64> {
    let n = lattice.dim();
    let mut u = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    fill_uniform_cell(lattice, rng, &mut u, &mut x, &mut scratch);
    x
}

fn fill_uniform_cell(
    lattice: &ScaledLattice,
    rng: &mut Rng,
    u: &mut [f64],
    x: &mut [f64],
    scratch: &mut [f64],
) {
    let g = lattice.generator();
    let n = u.len();
    for v in u.iter_mut() {
        *v = rng.random::<f64>();
    }
    for (i, xi) in x.iter_mut().enumerate() {
        *xi = (0..n).map(|j| g[(i, j)] * u[j]).sum();
    }
    lattice.fold_in_place(x, scratch);
}

/// `count` cell-uniform samples as a flat row-major buffer. Chunks are seeded
/// from `(seed, chunk index)`, so output is independent of the thread count.
pub fn sample_uniform_cell_batch(lattice: &ScaledLattice, count: usize, seed: u64) -> Vec<f64> {
    let n = lattice.dim();
    let mut out = vec![0.0; count * n];
    out.par_chunks_mut(CHUNK * n).enumerate().for_each(|(c, block)| {
        let mut rng = seeds::rng(seeds::derive(seed, &["cell".into(), c.into()]));
        let mut u = vec![0.0; n];
        let mut scratch = vec![0.0; n];
        for x in block.chunks_mut(n) {
            fill_uniform_cell(lattice, &mut rng, &mut u, x, &mut scratch);
        }
    });
    out
}

fn normalizer(lattice: &ScaledLattice) -> f64 {
    let n = lattice.dim() as f64;
    n * lattice.volume().powf(2.0 / n)
}

/// Estimates `G = E‖r‖² / (n·V^{2/n})` from `n_samples` cell-uniform draws.
pub fn estimate_second_moment(
    lattice: &ScaledLattice,
    n_samples: usize,
    seed: u64,
) -> Result<SecondMomentEstimate> {
    if n_samples < 2 {
        return Err(Error::Config("need at least two samples".into()));
    }
    let n = lattice.dim();
    let chunks = n_samples.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(n_samples - c * CHUNK);
            let mut rng = seeds::rng(seeds::derive(seed, &["cell".into(), c.into()]));
            let (mut u, mut x, mut scratch) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                fill_uniform_cell(lattice, &mut rng, &mut u, &mut x, &mut scratch);
                let e: f64 = x.iter().map(|v| v * v).sum();
                s1 += e;
                s2 += e * e;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = partial.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let m = n_samples as f64;
    let mean = s1 / m;
    let var = ((s2 / m - mean * mean) * m / (m - 1.0)).max(0.0);
    let norm = normalizer(lattice);
    Ok(SecondMomentEstimate {
        g: mean / norm,
        mse_per_cell: mean,
        n_samples,
        std_err: (var / m).sqrt() / norm,
    })
}

/// Expected `‖r‖²` over the cell, `n·G·V^{2/n}`.
pub fn predicted_mse(lattice: &ScaledLattice, g: f64) -> f64 {
    g * normalizer(lattice)
}

/// `G₁V₁^{2/n} / (G₂V₂^{2/n})`.
pub fn mse_ratio(l1: &ScaledLattice, l2: &ScaledLattice, g1: f64, g2: f64) -> Result<f64> {
    if l1.dim() != l2.dim() {
        return Err(Error::Config(format!(
            "cannot compare lattices of dimension {} and {}",
            l1.dim(),
            l2.dim()
        )));
    }
    Ok(predicted_mse(l1, g1) / predicted_mse(l2, g2))
}

/// MSE ratio against the hypercube `(2λ)ⁿ` at equal inradius, from `G` and
/// the volume ratio `V/(2λ)ⁿ`.
pub fn mse_ratio_vs_cube(g: f64, volume_ratio: f64, n: usize) -> f64 {
    12.0 * g * volume_ratio.powf(2.0 / n as f64)
}

/// Equivalent ways of spending an MSE reduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalentGains {
    pub snr_db: f64,
    /// Oversampling increase giving the same in-band noise reduction.
    pub of_factor: f64,
    pub bits_saved: f64,
}

pub fn equivalent_gains(ratio: f64) -> Result<EquivalentGains> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::Domain(format!("MSE ratio must lie in (0, 1], got {ratio}")));
    }
    let inv = 1.0 / ratio;
    Ok(EquivalentGains { snr_db: 10.0 * inv.log10(), of_factor: inv, bits_saved: inv.log(4.0) })
}

/// Literature constants for lattices without a quantizer here.
pub const A3_STAR_G: f64 = 0.0785;
pub const A3_STAR_VOLUME_RATIO: f64 = 0.707;
pub const LEECH_G: f64 = 0.0658;
pub const LEECH_VOLUME_RATIO: f64 = 5.96e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub lattice: String,
    pub n: usize,
    pub g: f64,
    /// Absent for constant rows.
    pub g_std_err: Option<f64>,
    pub volume_ratio: f64,
    pub mse_ratio: f64,
    pub estimated: bool,
}

/// Second moments and equal-inradius MSE ratios for the supported lattices,
/// plus constant rows for `A₃*` and the Leech lattice.
pub fn table1_report(n_samples: usize, seed: u64) -> Result<Vec<Table1Row>> {
    let specs = [
        ("Z", LatticeKind::Zn, 1),
        ("A2", LatticeKind::A2, 2),
        ("D4", LatticeKind::Dn, 4),
        ("E8", LatticeKind::E8, 8),
    ];
    let mut rows = Vec::new();
    for (i, (name, kind, n)) in specs.into_iter().enumerate() {
        let lattice = ScaledLattice::new(kind, n, 1.0)?;
        let est = estimate_second_moment(&lattice, n_samples, seeds::derive(seed, &[i.into()]))?;
        let volume_ratio = lattice.volume() / 2f64.powi(n as i32);
        rows.push(Table1Row {
            lattice: name.into(),
            n,
            g: est.g,
            g_std_err: Some(est.std_err),
            volume_ratio,
            mse_ratio: mse_ratio_vs_cube(est.g, volume_ratio, n),
            estimated: true,
        });
    }
    for (name, n, g, vr) in [
        ("A3*", 3, A3_STAR_G, A3_STAR_VOLUME_RATIO),
        ("Leech", 24, LEECH_G, LEECH_VOLUME_RATIO),
    ] {
        rows.push(Table1Row {
            lattice: name.into(),
            n,
            g,
            g_std_err: None,
            volume_ratio: vr,
            mse_ratio: mse_ratio_vs_cube(g, vr, n),
            estimated: false,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicted_mse_examples() {
        let z1 = ScaledLattice::square(1, 1.0).unwrap();
        assert!((predicted_mse(&z1, 1.0 / 12.0) - 1.0 / 3.0).abs() < 1e-15);
        let z2 = ScaledLattice::square(2, 1.0).unwrap();
        assert!((predicted_mse(&z2, 1.0 / 12.0) - 2.0 / 3.0).abs() < 1e-15);
        let e8 = ScaledLattice::new(LatticeKind::E8, 8, 1.0).unwrap();
        assert!((predicted_mse(&e8, 0.0717) - 8.0 * 0.0717 * 2.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_examples() {
        let a2 = ScaledLattice::new(LatticeKind::A2, 2, 0.4).unwrap();
        let sq = ScaledLattice::square(2, 0.4).unwrap();
        let g_a2 = 5.0 / (36.0 * 3f64.sqrt());
        let r = mse_ratio(&a2, &sq, g_a2, 1.0 / 12.0).unwrap();
        assert!((r - 5.0 / 6.0).abs() < 1e-12);
        assert!((mse_ratio(&sq, &sq, 0.08, 0.08).unwrap() - 1.0).abs() < 1e-15);
        assert!(mse_ratio(&a2, &ScaledLattice::square(3, 0.4).unwrap(), 0.08, 0.08).is_err());
        assert!((mse_ratio_vs_cube(LEECH_G, LEECH_VOLUME_RATIO, 24) - 0.197).abs() < 5e-4);
        assert!((mse_ratio_vs_cube(A3_STAR_G, A3_STAR_VOLUME_RATIO, 3) - 0.748).abs() < 5e-4);
    }

    #[test]
    fn gains() {
        let g = equivalent_gains(0.430).unwrap();
        assert!((g.snr_db - 3.67).abs() < 0.005);
        assert!((g.of_factor - 2.3).abs() < 0.05);
        assert!((g.bits_saved - 0.6).abs() < 0.05);
        let g = equivalent_gains(0.197).unwrap();
        assert!((g.snr_db - 7.06).abs() < 0.005);
        assert!((g.of_factor - 5.0).abs() < 0.1);
        assert!((g.bits_saved - 1.2).abs() < 0.05);
        assert_eq!(equivalent_gains(1.0).unwrap(), EquivalentGains { snr_db: 0.0, of_factor: 1.0, bits_saved: 0.0 });
        assert!(matches!(equivalent_gains(0.0), Err(Error::Domain(_))));
        assert!(equivalent_gains(1.5).is_err());
    }

    #[test]
    fn z1_uniform_variance() {
        let z1 = ScaledLattice::square(1, 1.0).unwrap();
        let xs = sample_uniform_cell_batch(&z1, 1_000_000, 11);
        let var = xs.iter().map(|v| v * v).sum::<f64>() / xs.len() as f64;
        assert!((var - 1.0 / 3.0).abs() < 0.01 / 3.0);
    }

    #[test]
    fn samples_lie_in_cell() {
        for (kind, n) in [(LatticeKind::A2, 2), (LatticeKind::Dn, 4), (LatticeKind::E8, 8)] {
            let l = ScaledLattice::new(kind, n, 0.3).unwrap();
            let xs = sample_uniform_cell_batch(&l, 20_000, 5);
            for x in xs.chunks(n) {
                assert!(l.nearest_point(x).iter().all(|&v| v == 0.0));
            }
            let mut rng = seeds::rng(1);
            let x = sample_uniform_cell(&l, &mut rng);
            assert!(l.nearest_point(&x).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn estimates_are_deterministic() {
        let l = ScaledLattice::new(LatticeKind::A2, 2, 1.0).unwrap();
        let a = estimate_second_moment(&l, 100_000, 3).unwrap();
        let b = estimate_second_moment(&l, 100_000, 3).unwrap();
        assert_eq!(a, b);
        assert!((a.mse_per_cell - predicted_mse(&l, a.g)).abs() <= 1e-12 * a.mse_per_cell);
    }
}
