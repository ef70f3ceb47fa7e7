//! Declarative sweep configuration, stored as TOML.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::channel::{Bits, ChannelSpec, NoiseLaw};
use crate::error::{Error, Result};
use crate::lattice::LatticeKind;
use crate::recovery::{Algorithm, B2r2Options};
use crate::signal::{SignalConfig, SignalMode};

pub const SCHEMA_VERSION: u32 = 1;

/// Signal parameters shared by every cell; the oversampling factor and seed
/// are filled in per cell and trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSection {
    pub n_channels: usize,
    pub n_components: usize,
    pub omega_max: f64,
    pub duration: f64,
    /// Peak amplitude over `λ`.
    pub dr_factor: f64,
    #[serde(default)]
    pub taper_order: u32,
    #[serde(default)]
    pub mode: SignalMode,
}

impl SignalSection {
    pub fn at(&self, of: f64, seed: u64) -> SignalConfig {
        SignalConfig {
            n_channels: self.n_channels,
            n_components: self.n_components,
            omega_max: self.omega_max,
            of,
            duration: self.duration,
            dr_factor: self.dr_factor,
            taper_order: self.taper_order,
            mode: self.mode,
            seed,
        }
    }
}

/// Saturation range of the scalar quantizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ScalarRange {
    /// `±` the largest coordinate inside the folding cell: never clips a folded sample.
    #[default]
    Extent,
    /// `±λ`, the range of a conventional ADC; clips the corners of non-cubic cells.
    Inradius,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantizerKind {
    /// Ideal converter plus additive noise at each SNR of the grid.
    Noise,
    /// Component-wise mid-tread quantizer at each bit depth of the grid.
    Scalar,
    /// Quantizer matched to the folding lattice.
    Lattice,
}

/// A folding lattice paired with an acquisition channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Architecture {
    pub label: String,
    pub lattice: LatticeKind,
    pub quantizer: QuantizerKind,
}

impl Architecture {
    pub fn new(label: &str, lattice: LatticeKind, quantizer: QuantizerKind) -> Self {
        Self { label: label.into(), lattice, quantizer }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub of: Vec<f64>,
    /// Used by `noise` architectures; `inf` is noiseless.
    #[serde(default)]
    pub snr_db: Vec<f64>,
    /// Used by `scalar` and `lattice` architectures.
    #[serde(default)]
    pub bits: Vec<Bits>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub master_seed: u64,
    pub n_trials: usize,
    /// Inradius of every folding lattice.
    pub lambda: f64,
    /// Relative guard band of the out-of-band operator.
    #[serde(default = "default_guard")]
    pub guard: f64,
    /// Fraction of samples at each record end required to be fold-free;
    /// signals failing this are redrawn. Overrides the algorithms' setting.
    #[serde(default = "default_tail")]
    pub tail_fraction: f64,
    #[serde(default = "default_attempts")]
    pub max_attempts: usize,
    #[serde(default)]
    pub noise_law: NoiseLaw,
    #[serde(default)]
    pub scalar_range: ScalarRange,
    pub signal: SignalSection,
    pub grid: Grid,
    pub architectures: Vec<Architecture>,
    pub algorithms: Vec<Algorithm>,
}

fn default_guard() -> f64 {
    0.1
}

fn default_tail() -> f64 {
    0.04
}

fn default_attempts() -> usize {
    1000
}

/// One point of the sweep grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub of: f64,
    pub architecture: Architecture,
    pub channel: ChannelSpec,
    pub algorithm: Algorithm,
}

impl Cell {
    /// Stable identifier; also the noise-seed key.
    pub fn key(&self) -> String {
        format!(
            "of={}/arch={}/{}/{}/ch={}/alg={}",
            self.of,
            self.architecture.label,
            self.architecture.lattice,
            match self.architecture.quantizer {
                QuantizerKind::Noise => "noise",
                QuantizerKind::Scalar => "scalar",
                QuantizerKind::Lattice => "lattice",
            },
            self.channel.label(),
            self.algorithm.label()
        )
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.n_trials == 0 {
            return bad("n_trials must be at least 1".into());
        }
        if !(self.lambda > 0.0) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(0.0..0.5).contains(&self.tail_fraction) {
            return bad(format!("tail_fraction must lie in [0, 0.5), got {}", self.tail_fraction));
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be at least 1".into());
        }
        if self.grid.of.iter().any(|&of| !(of > 1.0)) {
            return bad("every oversampling factor must exceed 1".into());
        }
        for a in &self.architectures {
            let list_empty = match a.quantizer {
                QuantizerKind::Noise => self.grid.snr_db.is_empty(),
                _ => self.grid.bits.is_empty(),
            };
            if list_empty {
                return bad(format!("architecture '{}' has no channel settings in the grid", a.label));
            }
        }
        if let Some(s) = self.grid.snr_db.iter().find(|s| !(**s > 0.0)) {
            return bad(format!("SNR must be positive dB or inf, got {s}"));
        }
        self.signal.at(self.grid.of.first().copied().unwrap_or(2.0), 0).validate()
    }

    /// All grid cells in emission order: OF, architecture, channel, algorithm.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &of in &self.grid.of {
            for arch in &self.architectures {
                let channels: Vec<ChannelSpec> = match arch.quantizer {
                    QuantizerKind::Noise => self
                        .grid
                        .snr_db
                        .iter()
                        .map(|&snr_db| ChannelSpec::Awgn { snr_db, law: self.noise_law })
                        .collect(),
                    QuantizerKind::Scalar => {
                        self.grid.bits.iter().map(|&bits| ChannelSpec::ScalarQ { bits }).collect()
                    }
                    QuantizerKind::Lattice => {
                        self.grid.bits.iter().map(|&bits| ChannelSpec::LatticeQ { bits }).collect()
                    }
                };
                for channel in channels {
                    for algorithm in &self.algorithms {
                        out.push(Cell { of, architecture: arch.clone(), channel, algorithm: algorithm.clone() });
                    }
                }
            }
        }
        out
    }

    /// Named presets: `table3` (additive noise), `table4` (quantization),
    /// `noiseless`.
    pub fn preset(name: &str) -> Result<Self> {
        let signal = SignalSection {
            n_channels: 8,
            n_components: 14,
            omega_max: 10.0,
            duration: 2.0,
            dr_factor: 10.0,
            taper_order: 2,
            mode: SignalMode::Real,
        };
        let base = ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            name: name.into(),
            master_seed: 2024,
            n_trials: 50,
            lambda: 0.1,
            guard: default_guard(),
            tail_fraction: default_tail(),
            max_attempts: default_attempts(),
            noise_law: NoiseLaw::Gaussian,
            scalar_range: ScalarRange::Extent,
            signal,
            grid: Grid { of: vec![2.0, 4.0, 6.0, 8.0], snr_db: vec![], bits: vec![] },
            architectures: vec![],
            algorithms: vec![Algorithm::B2r2(B2r2Options::default())],
        };
        let noise_archs = vec![
            Architecture::new("Square", LatticeKind::Zn, QuantizerKind::Noise),
            Architecture::new("E8", LatticeKind::E8, QuantizerKind::Noise),
        ];
        match name {
            "table3" => Ok(ExperimentConfig {
                grid: Grid {
                    snr_db: vec![10.0, 15.0, 20.0, 25.0, 30.0, 35.0, f64::INFINITY],
                    ..base.grid.clone()
                },
                architectures: noise_archs,
                ..base
            }),
            "table4" => Ok(ExperimentConfig {
                grid: Grid {
                    bits: [2, 4, 6, 8, 10]
                        .into_iter()
                        .map(Bits::Finite)
                        .chain([Bits::Infinite])
                        .collect(),
                    ..base.grid.clone()
                },
                architectures: vec![
                    Architecture::new("Sq+SqQ", LatticeKind::Zn, QuantizerKind::Scalar),
                    Architecture::new("E8+SqQ", LatticeKind::E8, QuantizerKind::Scalar),
                    Architecture::new("E8+E8Q", LatticeKind::E8, QuantizerKind::Lattice),
                ],
                ..base
            }),
            "noiseless" => Ok(ExperimentConfig {
                grid: Grid { snr_db: vec![f64::INFINITY], ..base.grid.clone() },
                architectures: noise_archs,
                ..base
            }),
            other => Err(Error::Config(format!(
                "unknown preset '{other}' (expected table3, table4 or noiseless)"
            ))),
        }
    }
}
