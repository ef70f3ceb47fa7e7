//! One- and two-dimensional trajectory demos.
//!
//! The demo signal is a single untapered multisine record. Because its
//! frequencies sit on the record's DFT grid it is periodic, so it can be
//! rotated freely: the record is started in the middle of its longest run of
//! samples inside the ball of radius `λ`, which gives fold-free samples at
//! both ends for every lattice at inradius `λ`.

use ndarray::Array2;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

use crate::channel::{fold_record, mean_power};
use crate::error::{Error, Result};
use crate::lattice::{LatticeKind, ScaledLattice};
use crate::recovery::{check_recovery, recover, Algorithm, B2r2Options, FoldOffsets, RecordInfo};
use crate::signal::{generate_multisine, normalize_dr, sample_signal, SampledSignal, SignalConfig, SignalMode};

#[derive(Debug, Clone, PartialEq)]
pub struct DemoConfig {
    /// 1 (real multisine) or 2 (real and imaginary parts of a complex one).
    pub dims: usize,
    pub n_components: usize,
    pub omega_max: f64,
    pub of: f64,
    /// Peak amplitude over `λ`.
    pub gamma: f64,
    pub lambda: f64,
    pub duration: f64,
    pub tail_fraction: f64,
    pub guard: f64,
    pub seed: u64,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            dims: 2,
            n_components: 14,
            omega_max: 10.0,
            of: 6.0,
            gamma: 3.0,
            lambda: 1.0,
            duration: 1.0,
            tail_fraction: 0.04,
            guard: 0.1,
            seed: 1,
        }
    }
}

impl DemoConfig {
    fn signal_config(&self) -> Result<SignalConfig> {
        let mode = match self.dims {
            1 => SignalMode::Real,
            2 => SignalMode::Complex,
            d => return Err(Error::Config(format!("demo supports 1 or 2 dimensions, got {d}"))),
        };
        Ok(SignalConfig {
            n_channels: self.dims,
            n_components: self.n_components,
            omega_max: self.omega_max,
            of: self.of,
            duration: self.duration,
            dr_factor: self.gamma,
            taper_order: 0,
            mode,
            seed: self.seed,
        })
    }
}

/// A rotated, normalized demo record.
#[derive(Debug, Clone, PartialEq)]
pub struct DemoSignal {
    pub signal: SampledSignal,
    /// Fold-free samples guaranteed at each end.
    pub margin: usize,
    /// Fold-free samples at the start (at least `margin`).
    pub head_run: usize,
}

/// Longest circular run of rows with `‖row‖ < radius`: `(start, len)`.
fn longest_run(f: &Array2<f64>, radius: f64) -> (usize, usize) {
    let k = f.nrows();
    let inside: Vec<bool> =
        f.rows().into_iter().map(|r| r.iter().map(|v| v * v).sum::<f64>() < radius * radius).collect();
    if inside.iter().all(|&b| b) {
        return (0, k);
    }
    let mut best = (0, 0);
    let mut cur = (0, 0);
    // two passes so runs wrapping around the end are seen whole
    for i in 0..2 * k {
        if inside[i % k] {
            if cur.1 == 0 {
                cur.0 = i % k;
            }
            cur.1 += 1;
            if cur.1 > best.1 {
                best = cur;
            }
        } else {
            cur.1 = 0;
        }
    }
    (best.0, best.1.min(k))
}

pub fn demo_signal(cfg: &DemoConfig) -> Result<DemoSignal> {
    let scfg = cfg.signal_config()?;
    let sig = generate_multisine(&scfg)?;
    let (base, factor) = normalize_dr(&sample_signal(&sig, &scfg, 0.0), cfg.lambda, cfg.gamma)?;
    let k = base.len();
    let (start, run) = longest_run(&base.samples, cfg.lambda);
    if run == 0 {
        return Err(Error::Demo("signal never enters the fold-free ball; cannot anchor".into()));
    }
    let shift = (start + run / 2) % k;
    let t0 = shift as f64 / base.fs;
    let signal = sample_signal(&sig.scaled(factor), &scfg, t0);
    let wanted = crate::recovery::margin(k, cfg.tail_fraction, None);
    Ok(DemoSignal { signal, margin: wanted.min(run / 2), head_run: run - run / 2 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoRun {
    pub lattice: String,
    pub algorithm: String,
    pub t0: f64,
    pub margin: usize,
    pub success: bool,
    pub sample_errors: usize,
    pub fold_events: usize,
    pub max_error: f64,
    pub peak: f64,
    pub folded_power: f64,
    pub inside_cell: bool,
    #[serde(skip)]
    pub original: Array2<f64>,
    #[serde(skip)]
    pub folded: Array2<f64>,
    #[serde(skip)]
    pub recovered: Array2<f64>,
}

/// Folds the demo record on `lattice` and unfolds it with `algorithm`.
pub fn run_demo(demo: &DemoSignal, cfg: &DemoConfig, lattice: &ScaledLattice, algorithm: &Algorithm) -> Result<DemoRun> {
    let f = &demo.signal.samples;
    let (y, p) = fold_record(f, lattice);
    let algorithm = match algorithm {
        Algorithm::B2r2(o) => Algorithm::B2r2(B2r2Options { tail_samples: Some(demo.margin), ..o.clone() }),
        other => other.clone(),
    };
    let info = RecordInfo {
        fs: demo.signal.fs,
        omega_max: cfg.omega_max,
        dynamic_range: cfg.gamma * cfg.lambda,
        noise_var: 0.0,
    };
    let rec = recover(&y, lattice, &info, &algorithm, cfg.guard)?;
    let truth = FoldOffsets(p);
    let check = check_recovery(&rec.p_hat, &truth, &rec.f_hat, f, lattice)?;
    let max_error = rec.f_hat.iter().zip(f.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let inside_cell = y.rows().into_iter().all(|r| lattice.nearest_point(&r.to_vec()).iter().all(|&v| v == 0.0));
    Ok(DemoRun {
        lattice: lattice.family().to_string(),
        algorithm: algorithm.label(),
        t0: demo.signal.t0,
        margin: demo.margin,
        success: check.full_success,
        sample_errors: check.sample_error_count,
        fold_events: truth.fold_events(),
        max_error,
        peak: demo.signal.peak(),
        folded_power: mean_power(&y),
        inside_cell,
        original: f.clone(),
        folded: y,
        recovered: rec.f_hat,
    })
}

/// Closed polyline of a 2D Voronoi cell, from consecutive facet bisectors.
pub fn cell_polygon(lattice: &ScaledLattice) -> Result<Vec<[f64; 2]>> {
    if lattice.dim() != 2 {
        return Err(Error::Unsupported("cell polygons are two-dimensional".into()));
    }
    let mut rv = lattice.relevant_vectors()?;
    rv.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));
    let m = rv.len();
    let mut pts: Vec<[f64; 2]> = (0..m)
        .map(|i| {
            let (a, b) = (&rv[i], &rv[(i + 1) % m]);
            let (ra, rb) = ((a[0] * a[0] + a[1] * a[1]) / 2.0, (b[0] * b[0] + b[1] * b[1]) / 2.0);
            let det = a[0] * b[1] - a[1] * b[0];
            [(ra * b[1] - a[1] * rb) / det, (a[0] * rb - ra * b[0]) / det]
        })
        .collect();
    pts.push(pts[0]);
    Ok(pts)
}

fn write_trajectory(path: &Path, run: &DemoRun, fs: f64) -> Result<()> {
    let mut wr = csv::Writer::from_path(path)?;
    let n = run.original.ncols();
    let mut header = vec!["t".to_string()];
    for prefix in ["original", "folded", "recovered"] {
        header.extend((0..n).map(|c| format!("{prefix}{c}")));
    }
    wr.write_record(&header)?;
    for k in 0..run.original.nrows() {
        let mut rec = vec![format!("{}", run.t0 + k as f64 / fs)];
        for m in [&run.original, &run.folded, &run.recovered] {
            rec.extend(m.row(k).iter().map(|v| format!("{v}")));
        }
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

/// Runs the square and hexagonal demo, writes trajectory and cell CSVs to
/// `dir`, and fails unless both reconstructions match to `1e-8` of the peak.
pub fn emit_trajectory_demo(cfg: &DemoConfig, dir: &Path) -> Result<(Vec<DemoRun>, Vec<PathBuf>)> {
    if cfg.dims != 2 {
        return Err(Error::Config("the trajectory demo is two-dimensional".into()));
    }
    fs::create_dir_all(dir)?;
    let demo = demo_signal(cfg)?;
    let mut runs = Vec::new();
    let mut paths = Vec::new();
    for (name, kind) in [("square", LatticeKind::Zn), ("hexagon", LatticeKind::A2)] {
        let lattice = ScaledLattice::new(kind, 2, cfg.lambda)?;
        let run = run_demo(&demo, cfg, &lattice, &Algorithm::B2r2(B2r2Options::default()))?;
        if !run.success || run.max_error > 1e-8 * run.peak {
            return Err(Error::Demo(format!(
                "{name} recovery failed: {} wrong offsets, max error {:.3e} (peak {:.3}, margin {})",
                run.sample_errors, run.max_error, run.peak, run.margin
            )));
        }
        let tpath = dir.join(format!("demo2d_{name}.csv"));
        write_trajectory(&tpath, &run, demo.signal.fs)?;
        let cpath = dir.join(format!("cell_{name}.csv"));
        let mut wr = csv::Writer::from_path(&cpath)?;
        wr.write_record(["x", "y"])?;
        for p in cell_polygon(&lattice)? {
            wr.write_record([format!("{}", p[0]), format!("{}", p[1])])?;
        }
        wr.flush()?;
        paths.push(tpath);
        paths.push(cpath);
        runs.push(run);
    }
    Ok((runs, paths))
}
