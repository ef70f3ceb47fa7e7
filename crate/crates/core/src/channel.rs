//! Distortions applied to folded samples: additive noise, scalar
//! quantization and matched lattice quantization.

use ndarray::Array2;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{LatticeKind, ScaledLattice};
use crate::seeds;
use crate::stats::predicted_mse;

/// Quantizer resolution; `Infinite` is an ideal converter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bits {
    Finite(u32),
    Infinite,
}

impl Bits {
    pub fn new(b: u32) -> Result<Self> {
        if (1..=24).contains(&b) {
            Ok(Bits::Finite(b))
        } else {
            Err(Error::Config(format!("bits must be in 1..=24, got {b}")))
        }
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bits::Finite(b) => write!(f, "{b}"),
            Bits::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Bits::Infinite),
            t => Bits::new(t.parse().map_err(|_| Error::Config(format!("bad bit count '{s}'")))?),
        }
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bits::Finite(b) => s.serialize_u32(*b),
            Bits::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(b) => u32::try_from(b)
                .map_err(|_| Error::Config(format!("bits must be in 1..=24, got {b}")))
                .and_then(Bits::new),
            Raw::Str(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NoiseLaw {
    #[default]
    Gaussian,
    /// Uniform with the same variance.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelSpec {
    None,
    Awgn {
        snr_db: f64,
        #[serde(default)]
        law: NoiseLaw,
    },
    ScalarQ {
        bits: Bits,
    },
    LatticeQ {
        bits: Bits,
    },
}

impl ChannelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelSpec::Awgn { snr_db, .. } if !(snr_db > 0.0) => {
                Err(Error::Config(format!("SNR must be positive dB or inf, got {snr_db}")))
            }
            _ => Ok(()),
        }
    }

    /// Short label such as `awgn25`, `sq4` or `lq8`.
    pub fn label(&self) -> String {
        match self {
            ChannelSpec::None => "none".into(),
            ChannelSpec::Awgn { snr_db, .. } => format!("awgn{snr_db}"),
            ChannelSpec::ScalarQ { bits } => format!("sq{bits}"),
            ChannelSpec::LatticeQ { bits } => format!("lq{bits}"),
        }
    }
}

/// Folded samples as delivered to the recovery stage.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldedRecord {
    /// `K×n`; row `k` is `y[k]`, possibly distorted.
    pub y: Array2<f64>,
    pub channel: ChannelSpec,
    /// Nominal per-coordinate variance of the applied distortion.
    pub noise_var: f64,
}

impl FoldedRecord {
    pub fn clean(y: Array2<f64>) -> Self {
        Self { y, channel: ChannelSpec::None, noise_var: 0.0 }
    }

    /// Mean of `‖y[k]‖²/n`.
    pub fn power(&self) -> f64 {
        mean_power(&self.y)
    }
}

pub(crate) fn mean_power(y: &Array2<f64>) -> f64 {
    if y.is_empty() {
        0.0
    } else {
        y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64
    }
}

/// Folds every row of `samples`, returning residues and offsets.
pub fn fold_record(samples: &Array2<f64>, lattice: &ScaledLattice) -> (Array2<f64>, Array2<f64>) {
    let mut y = samples.clone();
    let mut p = Array2::zeros(samples.raw_dim());
    let n = lattice.dim();
    let mut q = vec![0.0; n];
    for (mut yr, mut pr) in y.rows_mut().into_iter().zip(p.rows_mut()) {
        let x = yr.to_vec();
        lattice.nearest_point_into(&x, &mut q);
        for i in 0..n {
            yr[i] = x[i] - q[i];
            pr[i] = q[i];
        }
    }
    (y, p)
}

/// Adds i.i.d. zero-mean noise with per-coordinate variance `P_y·10^{−snr/10}`,
/// `P_y` being this record's mean power per coordinate.
pub fn add_noise(y: &FoldedRecord, snr_db: f64, law: NoiseLaw, seed: u64) -> Result<FoldedRecord> {
    ChannelSpec::Awgn { snr_db, law }.validate()?;
    let mut out = y.clone();
    out.channel = ChannelSpec::Awgn { snr_db, law };
    if snr_db.is_infinite() {
        return Ok(out);
    }
    let var = y.power() * 10f64.powf(-snr_db / 10.0);
    let mut rng = seeds::rng(seed);
    match law {
        NoiseLaw::Gaussian => {
            let normal = Normal::new(0.0, var.sqrt()).map_err(|e| Error::Config(e.to_string()))?;
            out.y.mapv_inplace(|v| v + normal.sample(&mut rng));
        }
        NoiseLaw::Uniform => {
            let a = (3.0 * var).sqrt();
            if a > 0.0 {
                out.y.mapv_inplace(|v| v + rng.random_range(-a..a));
            }
        }
    }
    out.noise_var = y.noise_var + var;
    Ok(out)
}

/// Mid-tread scalar quantizer with step `2λ/2^bits`, saturating at `±limit`.
pub fn scalar_quantize(y: &FoldedRecord, bits: Bits, lambda: f64, limit: f64) -> FoldedRecord {
    let mut out = y.clone();
    out.channel = ChannelSpec::ScalarQ { bits };
    if let Bits::Finite(b) = bits {
        let delta = 2.0 * lambda / 2f64.powi(b as i32);
        out.y.mapv_inplace(|v| (delta * (v / delta).round()).clamp(-limit, limit));
        out.noise_var = y.noise_var + delta * delta / 12.0;
    }
    out
}

/// Quantizes each row onto `2^{−bits}Λ`.
pub fn lattice_quantize(y: &FoldedRecord, lattice: &ScaledLattice, bits: Bits) -> Result<FoldedRecord> {
    let mut out = y.clone();
    out.channel = ChannelSpec::LatticeQ { bits };
    let Bits::Finite(b) = bits else {
        return Ok(out);
    };
    if y.y.ncols() != lattice.dim() {
        return Err(Error::Input(format!(
            "record has {} channels, lattice has dimension {}",
            y.y.ncols(),
            lattice.dim()
        )));
    }
    let s = 2f64.powi(b as i32);
    let n = lattice.dim();
    let (mut x, mut q) = (vec![0.0; n], vec![0.0; n]);
    for mut row in out.y.rows_mut() {
        for (xi, v) in x.iter_mut().zip(row.iter()) {
            *xi = v * s;
        }
        lattice.nearest_point_into(&x, &mut q);
        row.iter_mut().zip(&q).for_each(|(r, v)| *r = v / s);
    }
    let g = known_second_moment(lattice.kind(), n).ok_or_else(|| {
        Error::Unsupported(format!("no second-moment constant for {}", lattice.family()))
    })?;
    out.noise_var = y.noise_var + predicted_mse(lattice, g) / s / s / n as f64;
    Ok(out)
}

/// Normalized second moments from the literature, used as distortion hints.
pub fn known_second_moment(kind: LatticeKind, n: usize) -> Option<f64> {
    match (kind, n) {
        (LatticeKind::Zn, _) => Some(1.0 / 12.0),
        (LatticeKind::A2, 2) => Some(5.0 / (36.0 * 3f64.sqrt())),
        (LatticeKind::Dn, 2) => Some(1.0 / 12.0),
        (LatticeKind::Dn, 3) => Some(0.078_745_1),
        (LatticeKind::Dn, 4) => Some(0.076_603_2),
        (LatticeKind::E8, 8) => Some(0.071_682_1),
        _ => None,
    }
}

/// Applies `spec` to a clean folded record. `scalar_limit` bounds the scalar
/// quantizer's output range.
pub fn apply_channel(
    y: &FoldedRecord,
    spec: &ChannelSpec,
    lattice: &ScaledLattice,
    scalar_limit: f64,
    seed: u64,
) -> Result<FoldedRecord> {
    match *spec {
        ChannelSpec::None => Ok(y.clone()),
        ChannelSpec::Awgn { snr_db, law } => add_noise(y, snr_db, law, seed),
        ChannelSpec::ScalarQ { bits } => Ok(scalar_quantize(y, bits, lattice.lambda(), scalar_limit)),
        ChannelSpec::LatticeQ { bits } => lattice_quantize(y, lattice, bits),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::sample_uniform_cell_batch;

    fn record(data: Vec<f64>, n: usize) -> FoldedRecord {
        let k = data.len() / n;
        FoldedRecord::clean(Array2::from_shape_vec((k, n), data).unwrap())
    }

    #[test]
    fn infinite_settings_are_identity() {
        let r = record(vec![0.3, -0.7, 0.11, 0.9], 2);
        assert_eq!(add_noise(&r, f64::INFINITY, NoiseLaw::Gaussian, 1).unwrap().y, r.y);
        assert_eq!(scalar_quantize(&r, Bits::Infinite, 1.0, 1.0).y, r.y);
        let l = ScaledLattice::square(2, 1.0).unwrap();
        assert_eq!(lattice_quantize(&r, &l, Bits::Infinite).unwrap().y, r.y);
    }

    #[test]
    fn scalar_grid() {
        let r = record(vec![0.3, 0.99, -2.0], 1);
        let q = scalar_quantize(&r, Bits::Finite(2), 1.0, 1.0);
        assert_eq!(q.y.column(0).to_vec(), vec![0.5, 1.0, -1.0]);
        assert!((q.noise_var - 0.25 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn scalar_mse_on_uniform_input() {
        let z = ScaledLattice::square(1, 1.0).unwrap();
        let xs = sample_uniform_cell_batch(&z, 1_000_000, 2);
        let r = record(xs.clone(), 1);
        let q = scalar_quantize(&r, Bits::Finite(3), 1.0, 1.0);
        let mse = q.y.iter().zip(&xs).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / xs.len() as f64;
        let delta: f64 = 0.25;
        assert!((mse / (delta * delta / 12.0) - 1.0).abs() < 0.02);
    }

    #[test]
    fn snr_is_met() {
        let z = ScaledLattice::square(4, 1.0).unwrap();
        let r = record(sample_uniform_cell_batch(&z, 250_000, 4), 4);
        for law in [NoiseLaw::Gaussian, NoiseLaw::Uniform] {
            let noisy = add_noise(&r, 17.0, law, 9).unwrap();
            let pn = mean_power(&(&noisy.y - &r.y));
            let snr = 10.0 * (r.power() / pn).log10();
            assert!((snr - 17.0).abs() < 0.1, "{law:?}: {snr}");
        }
    }

    #[test]
    fn lattice_quantizer_error_lies_in_scaled_cell() {
        let e8 = ScaledLattice::new(LatticeKind::E8, 8, 0.1).unwrap();
        let r = record(sample_uniform_cell_batch(&e8, 5_000, 8), 8);
        let q = lattice_quantize(&r, &e8, Bits::Finite(4)).unwrap();
        for (a, b) in q.y.rows().into_iter().zip(r.y.rows()) {
            let e: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| 16.0 * (y - x)).collect();
            assert!(e8.nearest_point(&e).iter().all(|&v| v == 0.0));
        }
        // deterministic
        assert_eq!(q, lattice_quantize(&r, &e8, Bits::Finite(4)).unwrap());
    }

    #[test]
    fn bits_parsing() {
        assert_eq!("inf".parse::<Bits>().unwrap(), Bits::Infinite);
        assert_eq!("6".parse::<Bits>().unwrap(), Bits::Finite(6));
        assert!("0".parse::<Bits>().is_err());
        assert!("25".parse::<Bits>().is_err());
        #[derive(Deserialize)]
        struct T {
            b: Vec<Bits>,
        }
        let t: T = toml::from_str("b = [2, 4, \"inf\"]").unwrap();
        assert_eq!(t.b, vec![Bits::Finite(2), Bits::Finite(4), Bits::Infinite]);
    }
}
