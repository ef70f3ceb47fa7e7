//! Sparse out-of-band recovery over fold-event increments.
//!
//! Offsets change only at fold events, so `p = Cv` with `C` the running sum
//! and `v` sparse. ISTA minimizes `‖F(Cv + y)‖² + μ‖v‖₁`.

use ndarray::{s, Array2, Axis};
use serde::{Deserialize, Serialize};

use super::{margin, FoldOffsets, OobOperator, RecordInfo, RecoveryResult};
use crate::error::{Error, Result};
use crate::lattice::ScaledLattice;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LassoOptions {
    /// Sparsity weight; `None` uses `0.1·‖2CᵀFᴴFy‖∞`.
    pub mu: Option<f64>,
    /// Leading fraction of the record assumed fold-free (`v = 0` there).
    pub tail_fraction: f64,
    pub tail_samples: Option<usize>,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for LassoOptions {
    fn default() -> Self {
        Self { mu: None, tail_fraction: 0.04, tail_samples: None, tol: 1e-10, max_iters: 5000 }
    }
}

fn cumsum(v: &Array2<f64>) -> Array2<f64> {
    let mut out = v.clone();
    out.accumulate_axis_inplace(Axis(0), |&prev, cur| *cur += prev);
    out
}

/// `Cᵀz`: suffix sums.
fn cumsum_t(z: &Array2<f64>) -> Array2<f64> {
    let mut out = z.slice(s![..;-1, ..]).to_owned();
    out.accumulate_axis_inplace(Axis(0), |&prev, cur| *cur += prev);
    out.slice(s![..;-1, ..]).to_owned()
}

fn l1(v: &Array2<f64>) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// `‖F(Cv + y)‖² + μ‖v‖₁`.
pub fn lasso_objective(v: &Array2<f64>, y: &Array2<f64>, oob: &OobOperator, mu: f64) -> f64 {
    oob.energy(&(cumsum(v) + y)) + mu * l1(v)
}

pub fn lasso_b2r2_recover(
    y: &Array2<f64>,
    lattice: &ScaledLattice,
    oob: &OobOperator,
    _info: &RecordInfo,
    opts: &LassoOptions,
) -> Result<RecoveryResult> {
    let (v, iterations, converged) = lasso_solve(y, oob, opts)?;
    let p_hat = FoldOffsets::quantized(&cumsum(&v), lattice);
    Ok(RecoveryResult::from_offsets(y, p_hat, iterations, converged))
}

/// Largest eigenvalue of `2CᵀFᴴFC` on the free rows, by power iteration.
fn lipschitz(oob: &OobOperator, k: usize, n: usize, head: usize) -> f64 {
    let mut x = Array2::from_shape_fn((k, n), |(t, c)| ((t * 31 + c * 17) % 13) as f64 - 6.0);
    x.slice_mut(s![..head, ..]).fill(0.0);
    let mut lambda = 0.0;
    for _ in 0..100 {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        x /= norm;
        let mut ax = cumsum_t(&oob.project(&cumsum(&x))) * 2.0;
        ax.slice_mut(s![..head, ..]).fill(0.0);
        let next: f64 = ax.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
        x = ax;
        if (next - lambda).abs() <= 1e-6 * next {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda
}

/// Runs ISTA and returns `(v, iterations, converged)`.
pub(crate) fn lasso_solve(
    y: &Array2<f64>,
    oob: &OobOperator,
    opts: &LassoOptions,
) -> Result<(Array2<f64>, usize, bool)> {
    lasso_solve_traced(y, oob, opts, None)
}

fn lasso_solve_traced(
    y: &Array2<f64>,
    oob: &OobOperator,
    opts: &LassoOptions,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<(Array2<f64>, usize, bool)> {
    let (k, n) = y.dim();
    if k != oob.len() {
        return Err(Error::Input(format!("record has {k} samples, operator expects {}", oob.len())));
    }
    let head = margin(k, opts.tail_fraction, opts.tail_samples);
    let grad_at = |v: &Array2<f64>| {
        let mut g = cumsum_t(&oob.project(&(cumsum(v) + y))) * 2.0;
        g.slice_mut(s![..head, ..]).fill(0.0);
        g
    };
    let mut v = Array2::<f64>::zeros((k, n));
    let g0 = grad_at(&v);
    let mu = match opts.mu {
        Some(m) if m >= 0.0 => m,
        Some(m) => return Err(Error::Config(format!("μ must be non-negative, got {m}"))),
        None => 0.1 * g0.iter().fold(0.0f64, |a, b| a.max(b.abs())),
    };
    // Slight inflation covers power-iteration underestimates.
    let mut lip = (lipschitz(oob, k, n, head) * 1.01).max(1e-12);
    let mut obj = lasso_objective(&v, y, oob, mu);
    let mut grad = g0;
    if let Some(t) = trace.as_deref_mut() {
        t.push(obj);
    }
    for it in 1..=opts.max_iters {
        let mut accepted = None;
        for _ in 0..60 {
            let thr = mu / lip;
            let cand = (&v - &(&grad / lip)).mapv(|x| x.signum() * (x.abs() - thr).max(0.0));
            let c_obj = lasso_objective(&cand, y, oob, mu);
            if !c_obj.is_finite() {
                return Err(Error::Numerical { iteration: it, message: "objective is not finite".into() });
            }
            if c_obj <= obj {
                accepted = Some((cand, c_obj));
                break;
            }
            lip *= 2.0;
        }
        let Some((cand, c_obj)) = accepted else {
            return Ok((v, it, true));
        };
        let decrease = obj - c_obj;
        v = cand;
        let prev = obj;
        obj = c_obj;
        if let Some(t) = trace.as_deref_mut() {
            t.push(obj);
        }
        if decrease <= opts.tol * prev || obj == 0.0 {
            return Ok((v, it, true));
        }
        grad = grad_at(&v);
    }
    Ok((v, opts.max_iters, false))
}

/// Objective at the start and after each accepted ISTA step.
#[doc(hidden)]
pub fn lasso_trace(y: &Array2<f64>, oob: &OobOperator, mu: f64, iters: usize) -> Result<Vec<f64>> {
    let opts = LassoOptions { mu: Some(mu), max_iters: iters, tol: 0.0, ..Default::default() };
    let mut trace = Vec::with_capacity(iters + 1);
    lasso_solve_traced(y, oob, &opts, Some(&mut trace))?;
    Ok(trace)
}
