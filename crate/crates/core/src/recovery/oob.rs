//! The out-of-band DFT operator.

use ndarray::{Array2, ArrayView1};
use rustfft::{num_complex::Complex, Fft, FftPlanner};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Rows `e^{−j2πmk/K}/√K` for the DFT bins `m` whose frequency magnitude
/// exceeds `Ω(1 + guard)`. With this normalization `FᴴF` is the orthogonal
/// projector onto the out-of-band subspace.
#[derive(Clone)]
pub struct OobOperator {
    k: usize,
    fs: f64,
    omega_max: f64,
    guard: f64,
    selected: Vec<bool>,
    n_selected: usize,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for OobOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OobOperator")
            .field("k", &self.k)
            .field("fs", &self.fs)
            .field("omega_max", &self.omega_max)
            .field("guard", &self.guard)
            .field("n_selected", &self.n_selected)
            .finish()
    }
}

/// Signed frequency (Hz) of DFT bin `m` out of `k`.
fn bin_freq(m: usize, k: usize, fs: f64) -> f64 {
    let signed = if 2 * m <= k { m as f64 } else { m as f64 - k as f64 };
    signed * fs / k as f64
}

pub fn build_oob_operator(k: usize, omega_max: f64, fs: f64, guard: f64) -> Result<OobOperator> {
    if k < 2 {
        return Err(Error::Input(format!("record of {k} samples is too short")));
    }
    if !(guard >= 0.0) || !(omega_max > 0.0) {
        return Err(Error::Config("guard must be ≥ 0 and omega_max > 0".into()));
    }
    let edge = omega_max * (1.0 + guard);
    if !(fs > 2.0 * edge) {
        return Err(Error::Config(format!(
            "fs = {fs} Hz leaves no out-of-band bins above {edge} Hz"
        )));
    }
    // Small slack so bins sitting exactly on the edge count as in-band.
    let selected: Vec<bool> =
        (0..k).map(|m| bin_freq(m, k, fs).abs() > edge * (1.0 + 1e-12)).collect();
    let n_selected = selected.iter().filter(|&&s| s).count();
    if n_selected == 0 {
        return Err(Error::Config("out-of-band bin set is empty".into()));
    }
    let mut planner = FftPlanner::new();
    Ok(OobOperator {
        k,
        fs,
        omega_max,
        guard,
        selected,
        n_selected,
        fft: planner.plan_fft_forward(k),
        ifft: planner.plan_fft_inverse(k),
    })
}

impl OobOperator {
    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn selected_bins(&self) -> Vec<usize> {
        (0..self.k).filter(|&m| self.selected[m]).collect()
    }

    pub fn is_selected(&self, m: usize) -> bool {
        self.selected[m]
    }

    fn spectrum(&self, x: ArrayView1<'_, f64>) -> Vec<Complex<f64>> {
        let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.fft.process(&mut buf);
        buf
    }

    /// `F x` for one channel, in selected-bin order.
    pub fn apply(&self, x: ArrayView1<'_, f64>) -> Vec<Complex<f64>> {
        let scale = 1.0 / (self.k as f64).sqrt();
        self.spectrum(x)
            .into_iter()
            .zip(&self.selected)
            .filter(|(_, &s)| s)
            .map(|(c, _)| c * scale)
            .collect()
    }

    /// `‖F X‖²` summed over the columns of a `K×n` record.
    pub fn energy(&self, x: &Array2<f64>) -> f64 {
        x.columns().into_iter().map(|c| self.apply(c).iter().map(|z| z.norm_sqr()).sum::<f64>()).sum()
    }

    /// `FᴴF X`, column by column; real because the bin set is symmetric.
    pub fn project(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut out = Array2::zeros(x.raw_dim());
        let inv = 1.0 / self.k as f64;
        for (c, mut oc) in x.columns().into_iter().zip(out.columns_mut()) {
            let mut buf = self.spectrum(c);
            for (z, &s) in buf.iter_mut().zip(&self.selected) {
                if !s {
                    *z = Complex::new(0.0, 0.0);
                }
            }
            self.ifft.process(&mut buf);
            oc.iter_mut().zip(&buf).for_each(|(o, z)| *o = z.re * inv);
        }
        out
    }

    /// Orthonormal real basis of the in-band subspace as a `K×B` matrix:
    /// the constant column, then a cosine/sine pair per in-band bin.
    pub fn in_band_basis(&self) -> Array2<f64> {
        let k = self.k;
        let kf = k as f64;
        let mut cols: Vec<Vec<f64>> = vec![vec![1.0 / kf.sqrt(); k]];
        let a = (2.0 / kf).sqrt();
        for m in 1..k.div_ceil(2) {
            if self.selected[m] {
                continue;
            }
            let w = 2.0 * PI * m as f64 / kf;
            cols.push((0..k).map(|t| a * (w * t as f64).cos()).collect());
            cols.push((0..k).map(|t| a * (w * t as f64).sin()).collect());
        }
        if k % 2 == 0 && !self.selected[k / 2] {
            cols.push((0..k).map(|t| if t % 2 == 0 { 1.0 } else { -1.0 } / kf.sqrt()).collect());
        }
        Array2::from_shape_fn((k, cols.len()), |(t, j)| cols[j][t])
    }
}
