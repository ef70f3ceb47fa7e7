//! Quantizer MSE on cell-uniform inputs.

use ndarray::Array2;
use serde::Serialize;

use crate::channel::{known_second_moment, lattice_quantize, scalar_quantize, Bits, FoldedRecord};
use crate::error::{Error, Result};
use crate::lattice::{LatticeKind, ScaledLattice};
use crate::seeds;
use crate::stats::{predicted_mse, sample_uniform_cell_batch};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantRow {
    pub lattice: String,
    /// `matched` (onto `2^{−B}Λ`) or `scalar`.
    pub quantizer: String,
    pub bits: u32,
    /// Mean `‖e‖²` per vector.
    pub empirical_mse: f64,
    pub std_err: f64,
    /// `n·G·V^{2/n}·4^{−B}` (matched) or `n·δ²/12` (scalar).
    pub predicted_mse: f64,
}

fn error_stats(a: &Array2<f64>, b: &Array2<f64>) -> (f64, f64) {
    let e: Vec<f64> = a
        .rows()
        .into_iter()
        .zip(b.rows())
        .map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| (p - q).powi(2)).sum())
        .collect();
    let m = e.len() as f64;
    let mean = e.iter().sum::<f64>() / m;
    let var = e.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Matched-lattice and scalar quantizer MSE for each lattice and bit depth,
/// with inputs uniform on the lattice's cell at inradius `lambda`.
pub fn quantize_bench(
    lattices: &[(LatticeKind, usize)],
    bits: &[u32],
    lambda: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<QuantRow>> {
    if n_samples < 2 {
        return Err(Error::Config("need at least two samples".into()));
    }
    let mut rows = Vec::new();
    for (li, &(kind, n)) in lattices.iter().enumerate() {
        let lattice = ScaledLattice::new(kind, n, lambda)?;
        let g = known_second_moment(kind, n)
            .ok_or_else(|| Error::Unsupported(format!("no second-moment constant for {kind}{n}")))?;
        let data = sample_uniform_cell_batch(&lattice, n_samples, seeds::derive(seed, &[li.into()]));
        let x = FoldedRecord::clean(Array2::from_shape_vec((n_samples, n), data).expect("shape"));
        let name = lattice.family().to_string();
        for &b in bits {
            let bb = Bits::new(b)?;
            let q = lattice_quantize(&x, &lattice, bb)?;
            let (mse, se) = error_stats(&q.y, &x.y);
            rows.push(QuantRow {
                lattice: name.clone(),
                quantizer: "matched".into(),
                bits: b,
                empirical_mse: mse,
                std_err: se,
                predicted_mse: predicted_mse(&lattice, g) * 4f64.powi(-(b as i32)),
            });
            let q = scalar_quantize(&x, bb, lambda, lattice.coordinate_extent());
            let (mse, se) = error_stats(&q.y, &x.y);
            let delta = 2.0 * lambda / 2f64.powi(b as i32);
            rows.push(QuantRow {
                lattice: name.clone(),
                quantizer: "scalar".into(),
                bits: b,
                empirical_mse: mse,
                std_err: se,
                predicted_mse: n as f64 * delta * delta / 12.0,
            });
        }
    }
    Ok(rows)
}
