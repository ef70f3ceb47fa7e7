//! Bandlimited multisine test signals.
//!
//! Frequencies are snapped to multiples of `1/duration`, so a record of
//! exactly one duration is periodic and has no spectral leakage: its DFT is
//! zero outside the band.

use ndarray::Array2;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};
use crate::seeds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SignalMode {
    /// Independent real multisines per channel, frequencies in `[0, Ω]`.
    #[default]
    Real,
    /// Two channels: real and imaginary parts of one complex multisine with
    /// frequencies in `[−Ω, Ω]`.
    Complex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalConfig {
    pub n_channels: usize,
    pub n_components: usize,
    /// Highest frequency in Hz.
    pub omega_max: f64,
    /// Sampling rate over the Nyquist rate `2Ω`.
    pub of: f64,
    /// Record length in seconds.
    pub duration: f64,
    /// Peak amplitude over `λ`.
    pub dr_factor: f64,
    /// Order `r` of the window `1 − cos^{2r}(πt/D)`; 0 disables it. The
    /// window vanishes to order `2r` at the record edges, so tapered records
    /// start and end inside every cell. Components are drawn `r` bins below
    /// the band edge so the product stays bandlimited to `Ω`.
    #[serde(default)]
    pub taper_order: u32,
    #[serde(default)]
    pub mode: SignalMode,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SignalConfig {
    fn default() -> Self {
        Self {
            n_channels: 8,
            n_components: 14,
            omega_max: 10.0,
            of: 6.0,
            duration: 1.0,
            dr_factor: 10.0,
            taper_order: 0,
            mode: SignalMode::Real,
            seed: 0,
        }
    }
}

impl SignalConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.of > 1.0) {
            return bad("oversampling factor must exceed 1");
        }
        if !(self.omega_max > 0.0 && self.duration > 0.0 && self.dr_factor > 0.0) {
            return bad("omega_max, duration and dr_factor must be positive");
        }
        if self.n_components == 0 || self.n_channels == 0 {
            return bad("need at least one channel and one component");
        }
        if self.mode == SignalMode::Complex && self.n_channels != 2 {
            return bad("complex mode produces exactly two channels");
        }
        if self.max_bin() < 0 {
            return bad("taper order leaves no admissible frequency");
        }
        Ok(())
    }

    pub fn fs(&self) -> f64 {
        2.0 * self.omega_max * self.of
    }

    /// Number of samples in one record, `⌈D·fs⌉`.
    pub fn n_samples(&self) -> usize {
        let x = self.duration * self.fs();
        // absorb representation error in products such as 1.0 * 120.0
        (x - 1e-9 * x.max(1.0)).ceil() as usize
    }

    fn max_bin(&self) -> i64 {
        (self.omega_max * self.duration + 1e-9).floor() as i64 - self.taper_order as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Component {
    /// Hz.
    pub freq: f64,
    pub amp: f64,
    pub phase: f64,
}

/// A continuous-time multichannel multisine, evaluable at any `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Multisine {
    mode: SignalMode,
    /// One list per channel (a single shared list in complex mode).
    components: Vec<Vec<Component>>,
    n_channels: usize,
    gain: f64,
    duration: f64,
    taper_order: u32,
}

impl Multisine {
    pub fn from_components(components: Vec<Vec<Component>>) -> Self {
        Self {
            mode: SignalMode::Real,
            n_channels: components.len(),
            components,
            gain: 1.0,
            duration: 1.0,
            taper_order: 0,
        }
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn components(&self) -> &[Vec<Component>] {
        &self.components
    }

    fn window(&self, t: f64) -> f64 {
        if self.taper_order == 0 {
            1.0
        } else {
            1.0 - (PI * t / self.duration).cos().powi(2 * self.taper_order as i32)
        }
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let w = self.gain * self.window(t);
        match self.mode {
            SignalMode::Real => {
                for (o, comps) in out.iter_mut().zip(&self.components) {
                    *o = w * comps
                        .iter()
                        .map(|c| c.amp * (2.0 * PI * c.freq * t + c.phase).cos())
                        .sum::<f64>();
                }
            }
            SignalMode::Complex => {
                let (mut re, mut im) = (0.0, 0.0);
                for c in &self.components[0] {
                    let arg = 2.0 * PI * c.freq * t + c.phase;
                    re += c.amp * arg.cos();
                    im += c.amp * arg.sin();
                }
                out[0] = w * re;
                out[1] = w * im;
            }
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.n_channels];
        self.eval_into(t, &mut out);
        out
    }

    /// Multiplies the signal by a constant.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.gain *= factor;
        self
    }
}

/// Draws a multisine from `cfg.seed`: amplitudes `U[0.5, 1]`, phases
/// `U[0, 2π)`, frequencies on the `1/D` grid (`[0, Ω]` real, `[−Ω, Ω]` complex).
pub fn generate_multisine(cfg: &SignalConfig) -> Result<Multisine> {
    cfg.validate()?;
    let mut rng = seeds::rng(cfg.seed);
    let m_max = cfg.max_bin();
    let lo = if cfg.mode == SignalMode::Complex { -m_max } else { 0 };
    let groups = if cfg.mode == SignalMode::Complex { 1 } else { cfg.n_channels };
    let components = (0..groups)
        .map(|_| {
            (0..cfg.n_components)
                .map(|_| Component {
                    freq: rng.random_range(lo..=m_max) as f64 / cfg.duration,
                    amp: rng.random_range(0.5..=1.0),
                    phase: rng.random_range(0.0..2.0 * PI),
                })
                .collect()
        })
        .collect();
    Ok(Multisine {
        mode: cfg.mode,
        components,
        n_channels: cfg.n_channels,
        gain: 1.0,
        duration: cfg.duration,
        taper_order: cfg.taper_order,
    })
}

/// A `K×n` record on the grid `t0 + k/fs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledSignal {
    pub samples: Array2<f64>,
    pub fs: f64,
    pub t0: f64,
}

impl SampledSignal {
    pub fn len(&self) -> usize {
        self.samples.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.nrows() == 0
    }

    pub fn n_channels(&self) -> usize {
        self.samples.ncols()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 / self.fs
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// CSV with columns `t, ch0, …, ch{n−1}`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        header.extend((0..self.n_channels()).map(|c| format!("ch{c}")));
        wr.write_record(&header)?;
        for (k, row) in self.samples.rows().into_iter().enumerate() {
            let mut rec = vec![format!("{}", self.time(k))];
            rec.extend(row.iter().map(|v| format!("{v}")));
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Samples `⌈D·fs⌉` points starting at `t0`.
pub fn sample_signal(signal: &Multisine, cfg: &SignalConfig, t0: f64) -> SampledSignal {
    let fs = cfg.fs();
    let k = cfg.n_samples();
    let n = signal.n_channels();
    let mut samples = Array2::zeros((k, n));
    let mut buf = vec![0.0; n];
    for (i, mut row) in samples.rows_mut().into_iter().enumerate() {
        signal.eval_into(t0 + i as f64 / fs, &mut buf);
        row.iter_mut().zip(&buf).for_each(|(r, v)| *r = *v);
    }
    SampledSignal { samples, fs, t0 }
}

/// Rescales so the largest absolute sample equals `γλ`. Returns the applied
/// factor alongside, so the continuous signal can be scaled to match.
pub fn normalize_dr(signal: &SampledSignal, lambda: f64, gamma: f64) -> Result<(SampledSignal, f64)> {
    let peak = signal.peak();
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(Error::DegenerateSignal(format!("peak amplitude is {peak}")));
    }
    let factor = gamma * lambda / peak;
    let mut out = signal.clone();
    out.samples.mapv_inplace(|v| v * factor);
    Ok((out, factor))
}
