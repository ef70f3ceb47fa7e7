//! Test-only oracles, independent of the library's quantizers.
#![allow(dead_code)]

use latmod::ScaledLattice;
use nalgebra::{DMatrix, DVector};

/// All lattice points within `radius` of `x`, by Fincke–Pohst enumeration
/// over the QR factor of the generator.
pub fn lattice_points_near(lattice: &ScaledLattice, x: &[f64], radius: f64) -> Vec<Vec<f64>> {
    let b: DMatrix<f64> = lattice.generator().clone();
    let n = b.nrows();
    let qr = b.clone().qr();
    let r = qr.r();
    let z = qr.q().transpose() * DVector::from_column_slice(x);
    let mut out = Vec::new();
    let mut k = vec![0i64; n];
    enumerate(&r, &z, n, radius * radius, 0.0, &mut k, &b, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    r: &DMatrix<f64>,
    z: &DVector<f64>,
    level: usize,
    r2: f64,
    partial: f64,
    k: &mut Vec<i64>,
    b: &DMatrix<f64>,
    out: &mut Vec<Vec<f64>>,
) {
    if level == 0 {
        let kv = DVector::from_iterator(k.len(), k.iter().map(|&v| v as f64));
        out.push((b * kv).iter().copied().collect());
        return;
    }
    let i = level - 1;
    let n = k.len();
    let tail: f64 = (i + 1..n).map(|j| r[(i, j)] * k[j] as f64).sum();
    let c = (z[i] - tail) / r[(i, i)];
    let half = ((r2 - partial).max(0.0)).sqrt() / r[(i, i)].abs();
    let (lo, hi) = ((c - half).ceil() as i64, (c + half).floor() as i64);
    for v in lo..=hi {
        let d = z[i] - tail - r[(i, i)] * v as f64;
        let p = partial + d * d;
        if p <= r2 {
            k[i] = v;
            enumerate(r, z, level - 1, r2, p, k, b, out);
        }
    }
    k[i] = 0;
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Brute-force nearest point and the gap to the runner-up distance.
pub fn brute_nearest(lattice: &ScaledLattice, x: &[f64]) -> (Vec<f64>, f64) {
    let pts = lattice_points_near(lattice, x, lattice.covering_radius() * (1.0 + 1e-9) + 1e-12);
    let mut d: Vec<(f64, Vec<f64>)> = pts.into_iter().map(|p| (dist2(x, &p), p)).collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0));
    let gap = if d.len() > 1 { d[1].0 - d[0].0 } else { f64::INFINITY };
    (d.swap_remove(0).1, gap)
}

/// `10⁴`-style random inputs: uniform in a box of half-width `5λ`,
/// plus a `1e-6` perturbation that moves them off tie sets.
pub fn random_inputs(n: usize, lambda: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..n)
                .map(|_| rng.random_range(-5.0 * lambda..5.0 * lambda) + rng.random_range(-1e-6..1e-6))
                .collect()
        })
        .collect()
}
