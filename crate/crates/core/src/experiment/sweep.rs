//! Seeded Monte Carlo sweeps.
//!
//! Per trial: draw a signal, fold it, pass it through the channel, recover,
//! and compare offsets. The signal seed depends on the oversampling factor
//! and trial index only, so every architecture at a given OF sees the same
//! signals and per-trial outcomes can be compared pairwise. Noise seeds
//! additionally depend on the full cell key.

use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;
use std::time::{Duration, Instant};

use super::config::{Cell, ExperimentConfig, QuantizerKind, ScalarRange};
use crate::channel::{apply_channel, fold_record, Bits, ChannelSpec, FoldedRecord};
use crate::error::{Error, Result};
use crate::lattice::ScaledLattice;
use crate::recovery::{check_recovery, recover, Algorithm, FoldOffsets, RecordInfo};
use crate::seeds;
use crate::signal::{generate_multisine, normalize_dr, sample_signal, SampledSignal};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub trial: usize,
    /// Signal draws needed to satisfy the fold-free margin.
    pub attempts: usize,
    pub success: bool,
    pub sample_errors: usize,
    pub residual_mse: f64,
}

/// Aggregated result of one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    pub of: f64,
    pub architecture: String,
    pub lattice: String,
    pub quantizer: String,
    pub channel: String,
    pub snr_db: Option<f64>,
    pub bits: Option<Bits>,
    pub algorithm: String,
    pub n_trials: usize,
    pub successes: usize,
    pub recovery_rate: f64,
    /// Mean residual MSE per coordinate over successful trials.
    pub mse: Option<f64>,
    pub mse_db: Option<f64>,
    pub master_seed: u64,
    pub error: Option<String>,
    #[serde(skip)]
    pub wall_time: Duration,
    #[serde(skip)]
    pub trials: Vec<TrialOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub name: String,
    pub cells: Vec<CellResult>,
}

impl ExperimentResult {
    pub fn has_errors(&self) -> bool {
        self.cells.iter().any(|c| c.error.is_some())
    }

    /// First cell matching the given coordinates.
    pub fn find(&self, of: f64, architecture: &str, channel: &str) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.of == of && c.architecture == architecture && c.channel == channel)
    }
}

/// `10·log10(mean MSE_a / mean MSE_b)` over trials that succeeded in both
/// cells, with the number of such trials.
pub fn paired_mse_gain_db(a: &CellResult, b: &CellResult) -> Option<(f64, usize)> {
    let pairs: Vec<(f64, f64)> = a
        .trials
        .iter()
        .zip(&b.trials)
        .filter(|(x, y)| x.success && y.success)
        .map(|(x, y)| (x.residual_mse, y.residual_mse))
        .collect();
    if pairs.is_empty() {
        return None;
    }
    let (sa, sb) = pairs.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    (sb > 0.0).then(|| (10.0 * (sa / sb).log10(), pairs.len()))
}

/// A normalized trial signal together with its draw count.
pub fn trial_signal(cfg: &ExperimentConfig, of: f64, trial: usize) -> Result<(SampledSignal, usize)> {
    for attempt in 0..cfg.max_attempts {
        let seed = seeds::derive(
            cfg.master_seed,
            &["signal".into(), of.into(), trial.into(), attempt.into()],
        );
        let scfg = cfg.signal.at(of, seed);
        let sig = generate_multisine(&scfg)?;
        let (sampled, _) = normalize_dr(&sample_signal(&sig, &scfg, 0.0), cfg.lambda, cfg.signal.dr_factor)?;
        if margins_fold_free(&sampled.samples, cfg.lambda, cfg.tail_fraction) {
            return Ok((sampled, attempt + 1));
        }
    }
    Err(Error::DegenerateSignal(format!(
        "no signal with fold-free margins after {} draws (OF {of}, trial {trial})",
        cfg.max_attempts
    )))
}

/// True when every sample within the margins lies strictly inside the ball
/// of radius `λ`, which is contained in every cell at inradius `λ`.
pub fn margins_fold_free(f: &Array2<f64>, lambda: f64, tail_fraction: f64) -> bool {
    let k = f.nrows();
    let nt = crate::recovery::margin(k, tail_fraction, None);
    (0..nt).chain(k - nt..k).all(|t| f.row(t).iter().map(|v| v * v).sum::<f64>() < lambda * lambda)
}

fn with_margin(alg: &Algorithm, tail_fraction: f64) -> Algorithm {
    match alg {
        Algorithm::B2r2(o) => Algorithm::B2r2(crate::recovery::B2r2Options {
            tail_fraction,
            ..o.clone()
        }),
        Algorithm::LassoB2r2(o) => Algorithm::LassoB2r2(crate::recovery::LassoOptions {
            tail_fraction,
            ..o.clone()
        }),
        other => other.clone(),
    }
}

fn run_trial(
    cfg: &ExperimentConfig,
    cell: &Cell,
    lattice: &ScaledLattice,
    algorithm: &Algorithm,
    trial: usize,
) -> Result<TrialOutcome> {
    let (signal, attempts) = trial_signal(cfg, cell.of, trial)?;
    let (y, p_true) = fold_record(&signal.samples, lattice);
    let noise_seed =
        seeds::derive(cfg.master_seed, &["noise".into(), cell.key().as_str().into(), trial.into()]);
    let received = apply_channel(
        &FoldedRecord::clean(y),
        &cell.channel,
        lattice,
        match cfg.scalar_range {
            ScalarRange::Extent => lattice.coordinate_extent(),
            ScalarRange::Inradius => lattice.lambda(),
        },
        noise_seed,
    )?;
    let info = RecordInfo {
        fs: signal.fs,
        omega_max: cfg.signal.omega_max,
        dynamic_range: cfg.signal.dr_factor * cfg.lambda,
        noise_var: received.noise_var,
    };
    let rec = recover(&received.y, lattice, &info, algorithm, cfg.guard)?;
    let check = check_recovery(&rec.p_hat, &FoldOffsets(p_true), &rec.f_hat, &signal.samples, lattice)?;
    Ok(TrialOutcome {
        trial,
        attempts,
        success: check.full_success,
        sample_errors: check.sample_error_count,
        residual_mse: check.residual_mse,
    })
}

fn run_cell(cfg: &ExperimentConfig, cell: &Cell) -> CellResult {
    let start = Instant::now();
    let mut res = CellResult {
        of: cell.of,
        architecture: cell.architecture.label.clone(),
        lattice: cell.architecture.lattice.to_string(),
        quantizer: match cell.architecture.quantizer {
            QuantizerKind::Noise => "none",
            QuantizerKind::Scalar => "scalar",
            QuantizerKind::Lattice => "lattice",
        }
        .into(),
        channel: cell.channel.label(),
        snr_db: match cell.channel {
            ChannelSpec::Awgn { snr_db, .. } => Some(snr_db),
            _ => None,
        },
        bits: match cell.channel {
            ChannelSpec::ScalarQ { bits } | ChannelSpec::LatticeQ { bits } => Some(bits),
            _ => None,
        },
        algorithm: cell.algorithm.label(),
        n_trials: cfg.n_trials,
        successes: 0,
        recovery_rate: 0.0,
        mse: None,
        mse_db: None,
        master_seed: cfg.master_seed,
        error: None,
        wall_time: Duration::ZERO,
        trials: Vec::new(),
    };
    let outcome = (|| -> Result<Vec<TrialOutcome>> {
        let lattice = ScaledLattice::new(cell.architecture.lattice, cfg.signal.n_channels, cfg.lambda)?;
        let algorithm = with_margin(&cell.algorithm, cfg.tail_fraction);
        (0..cfg.n_trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, cell, &lattice, &algorithm, t))
            .collect()
    })();
    match outcome {
        Ok(trials) => {
            let ok: Vec<&TrialOutcome> = trials.iter().filter(|t| t.success).collect();
            res.successes = ok.len();
            res.recovery_rate = ok.len() as f64 / cfg.n_trials as f64;
            if !ok.is_empty() {
                let mse = ok.iter().map(|t| t.residual_mse).sum::<f64>() / ok.len() as f64;
                res.mse = Some(mse);
                res.mse_db = (mse > 0.0).then(|| 10.0 * mse.log10());
            }
            res.trials = trials;
        }
        Err(e) => res.error = Some(e.to_string()),
    }
    res.wall_time = start.elapsed();
    res
}

/// Runs every cell. Failures are recorded per cell and do not stop the sweep.
/// Results depend only on the configuration, not on thread scheduling.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let cells = cfg.cells();
    Ok(ExperimentResult {
        name: cfg.name.clone(),
        cells: cells.iter().map(|c| run_cell(cfg, c)).collect(),
    })
}
