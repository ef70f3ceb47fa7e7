//! Unfolding: estimating the lattice offsets `p[k]` with `f[k] = y[k] + p[k]`.

mod b2r2;
mod check;
mod hod;
mod lasso;
mod oob;

pub use b2r2::{b2r2_objective, b2r2_recover, one_shot_descent, B2r2Mode, B2r2Options, OneShotRun};
pub use check::{check_recovery, residual_mse, RecoveryCheck};
pub use hod::hod_recover;
pub use lasso::{lasso_b2r2_recover, lasso_objective, lasso_trace, LassoOptions};
pub use oob::{build_oob_operator, OobOperator};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::ScaledLattice;

/// A `K×n` array whose rows are lattice points.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldOffsets(pub Array2<f64>);

impl FoldOffsets {
    pub fn zeros(k: usize, n: usize) -> Self {
        Self(Array2::zeros((k, n)))
    }

    /// Rounds every row to the lattice.
    pub fn quantized(p: &Array2<f64>, lattice: &ScaledLattice) -> Self {
        let mut out = p.clone();
        let mut q = vec![0.0; lattice.dim()];
        for mut row in out.rows_mut() {
            let x = row.to_vec();
            lattice.nearest_point_into(&x, &mut q);
            row.iter_mut().zip(&q).for_each(|(r, v)| *r = *v);
        }
        Self(out)
    }

    pub fn is_valid(&self, lattice: &ScaledLattice) -> bool {
        self.0.rows().into_iter().all(|r| lattice.contains(&r.to_vec()))
    }

    /// Number of indices `k` with `p[k] ≠ p[k−1]`, counting from `p[−1] = 0`.
    pub fn fold_events(&self) -> usize {
        let mut prev = vec![0.0; self.0.ncols()];
        let mut count = 0;
        for row in self.0.rows() {
            if row.iter().zip(&prev).any(|(a, b)| (a - b).abs() > 1e-9) {
                count += 1;
            }
            prev = row.to_vec();
        }
        count
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    pub f_hat: Array2<f64>,
    pub p_hat: FoldOffsets,
    pub iterations: usize,
    pub converged: bool,
}

impl RecoveryResult {
    fn from_offsets(y: &Array2<f64>, p_hat: FoldOffsets, iterations: usize, converged: bool) -> Self {
        Self { f_hat: y + &p_hat.0, p_hat, iterations, converged }
    }
}

/// Recovery algorithm and its options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Algorithm {
    Hod {
        #[serde(default = "default_order")]
        order: usize,
    },
    B2r2(B2r2Options),
    LassoB2r2(LassoOptions),
}

fn default_order() -> usize {
    2
}

impl Algorithm {
    pub fn label(&self) -> String {
        match self {
            Algorithm::Hod { order } => format!("hod{order}"),
            Algorithm::B2r2(_) => "b2r2".into(),
            Algorithm::LassoB2r2(_) => "lasso_b2r2".into(),
        }
    }
}

/// Everything about the record that recovery may use besides the samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordInfo {
    pub fs: f64,
    pub omega_max: f64,
    /// Peak amplitude bound `γλ`.
    pub dynamic_range: f64,
    /// Nominal per-coordinate distortion variance.
    pub noise_var: f64,
}

/// Dispatches to the chosen algorithm.
pub fn recover(
    y: &Array2<f64>,
    lattice: &ScaledLattice,
    info: &RecordInfo,
    algorithm: &Algorithm,
    guard: f64,
) -> Result<RecoveryResult> {
    if y.ncols() != lattice.dim() {
        return Err(Error::Input(format!(
            "record has {} channels, lattice has dimension {}",
            y.ncols(),
            lattice.dim()
        )));
    }
    match algorithm {
        Algorithm::Hod { order } => hod_recover(y, lattice, *order),
        Algorithm::B2r2(opts) => {
            let oob = build_oob_operator(y.nrows(), info.omega_max, info.fs, guard)?;
            b2r2_recover(y, lattice, &oob, info, opts)
        }
        Algorithm::LassoB2r2(opts) => {
            let oob = build_oob_operator(y.nrows(), info.omega_max, info.fs, guard)?;
            lasso_b2r2_recover(y, lattice, &oob, info, opts)
        }
    }
}

/// Number of samples at each end of the record assumed fold-free.
pub(crate) fn margin(k: usize, fraction: f64, samples: Option<usize>) -> usize {
    samples.unwrap_or_else(|| (fraction * k as f64 - 1e-9).ceil().max(0.0) as usize).min(k / 2)
}
