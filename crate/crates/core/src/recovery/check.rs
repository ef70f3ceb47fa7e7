use ndarray::Array2;
use serde::Serialize;

use super::FoldOffsets;
use crate::error::{Error, Result};
use crate::lattice::ScaledLattice;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecoveryCheck {
    /// Every offset identified exactly.
    pub full_success: bool,
    pub sample_error_count: usize,
    /// `mean ‖f̂[k] − f[k]‖² / n`.
    pub residual_mse: f64,
}

/// `mean ‖a[k] − b[k]‖² / n` over rows.
pub fn residual_mse(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64
}

/// Compares offsets by their integer lattice coordinates, so floating-point
/// noise in either array cannot turn a match into a mismatch.
pub fn check_recovery(
    p_hat: &FoldOffsets,
    p_true: &FoldOffsets,
    f_hat: &Array2<f64>,
    f_true: &Array2<f64>,
    lattice: &ScaledLattice,
) -> Result<RecoveryCheck> {
    if p_hat.0.dim() != p_true.0.dim() || f_hat.dim() != f_true.dim() || p_hat.0.dim() != f_hat.dim() {
        return Err(Error::Input(format!(
            "shape mismatch: estimate {:?}, truth {:?}",
            p_hat.0.dim(),
            p_true.0.dim()
        )));
    }
    let errors = p_hat
        .0
        .rows()
        .into_iter()
        .zip(p_true.0.rows())
        .filter(|(a, b)| {
            lattice.integer_coordinates(&a.to_vec()) != lattice.integer_coordinates(&b.to_vec())
        })
        .count();
    Ok(RecoveryCheck {
        full_success: errors == 0,
        sample_error_count: errors,
        residual_mse: residual_mse(f_hat, f_true),
    })
}
