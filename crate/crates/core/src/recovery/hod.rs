//! Higher-order differences.

use ndarray::Array2;

use super::{FoldOffsets, RecoveryResult};
use crate::error::{Error, Result};
use crate::lattice::ScaledLattice;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// If `‖Δᴺf[k]‖` stays inside the cell then `Δᴺp[k] = −Q_Λ(Δᴺy[k])`; the
/// offsets follow by `N`-fold summation anchored on `p[0..N) = 0`.
pub fn hod_recover(y: &Array2<f64>, lattice: &ScaledLattice, order: usize) -> Result<RecoveryResult> {
    let (k, n) = y.dim();
    if order < 1 {
        return Err(Error::Input("difference order must be at least 1".into()));
    }
    if k < order + 1 {
        return Err(Error::Input(format!("{k} samples are too few for order {order}")));
    }
    // c[j] = (−1)^j C(N, j)
    let c: Vec<f64> = (0..=order)
        .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } * binomial(order, j))
        .collect();
    let mut p = Array2::<f64>::zeros((k, n));
    let mut d = vec![0.0; n];
    let mut q = vec![0.0; n];
    for t in order..k {
        for ch in 0..n {
            d[ch] = (0..=order).map(|j| c[j] * y[(t - j, ch)]).sum();
        }
        lattice.nearest_point_into(&d, &mut q);
        // Δᴺp[t] = −q, and Δᴺp[t] = Σ_j c[j] p[t−j]
        let mut row = vec![0.0; n];
        for ch in 0..n {
            row[ch] = -q[ch] - (1..=order).map(|j| c[j] * p[(t - j, ch)]).sum::<f64>();
        }
        let snapped = lattice.snap(&row);
        p.row_mut(t).iter_mut().zip(&snapped).for_each(|(a, b)| *a = *b);
    }
    Ok(RecoveryResult::from_offsets(y, FoldOffsets(p), k - order, true))
}
