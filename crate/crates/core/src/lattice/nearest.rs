//! Exact nearest-point quantizers.
//!
//! The `*_unit_into` routines work on the unscaled lattice and write into a
//! caller-provided buffer so hot loops (Monte Carlo, recovery) stay
//! allocation-free.

/// Round to the nearest integer; exact half-integers go toward zero.
#[inline]
pub fn round_half_toward_zero(v: f64) -> f64 {
    let t = v.trunc();
    if (v - t).abs() == 0.5 {
        t
    } else {
        v.round()
    }
}

pub(crate) fn zn_unit_into(x: &[f64], out: &mut [f64]) {
    for (o, &v) in out.iter_mut().zip(x) {
        *o = round_half_toward_zero(v);
    }
}

/// Nearest point of `scale·Zⁿ`.
pub fn nearest_point_zn(x: &[f64], scale: f64) -> Vec<f64> {
    x.iter()
        .map(|&v| scale * round_half_toward_zero(v / scale))
        .collect()
}

pub(crate) fn dn_unit_into(x: &[f64], out: &mut [f64]) {
    zn_unit_into(x, out);
    let sum: f64 = out.iter().sum();
    if sum.rem_euclid(2.0) == 0.0 {
        return;
    }
    // Flip the coordinate that is furthest from an integer; strict `>` keeps
    // the lowest index on ties.
    let mut idx = 0;
    let mut worst = -1.0;
    for (i, (&v, &r)) in x.iter().zip(out.iter()).enumerate() {
        let d = (v - r).abs();
        if d > worst {
            worst = d;
            idx = i;
        }
    }
    let d = x[idx] - out[idx];
    if d > 0.0 {
        out[idx] += 1.0;
    } else if d < 0.0 {
        out[idx] -= 1.0;
    } else {
        // x is an integer vector with odd sum: every ±1 move is equally far,
        // so take the one that shrinks the norm.
        let j = out.iter().position(|&v| v != 0.0).unwrap_or(0);
        out[j] -= out[j].signum();
    }
}

/// Nearest point of `scale·Dₙ` (integer vectors with even coordinate sum).
pub fn nearest_point_dn(x: &[f64], scale: f64) -> Vec<f64> {
    let u: Vec<f64> = x.iter().map(|v| v / scale).collect();
    let mut out = vec![0.0; x.len()];
    dn_unit_into(&u, &mut out);
    out.iter_mut().for_each(|v| *v *= scale);
    out
}

pub(crate) fn e8_unit_into(x: &[f64], out: &mut [f64]) {
    debug_assert_eq!(x.len(), 8);
    let mut shifted = [0.0; 8];
    let mut c2 = [0.0; 8];
    for i in 0..8 {
        shifted[i] = x[i] - 0.5;
    }
    dn_unit_into(x, out);
    dn_unit_into(&shifted, &mut c2);
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for i in 0..8 {
        c2[i] += 0.5;
        d1 += (x[i] - out[i]).powi(2);
        d2 += (x[i] - c2[i]).powi(2);
    }
    if d2 < d1 {
        out.copy_from_slice(&c2);
    }
}

/// Nearest point of `scale·E₈` (the union of `D₈` and `D₈ + ½·1`).
///
/// # Panics
/// If `x` does not have length 8.
pub fn nearest_point_e8(x: &[f64], scale: f64) -> Vec<f64> {
    assert_eq!(x.len(), 8, "E8 points have 8 coordinates");
    let u: Vec<f64> = x.iter().map(|v| v / scale).collect();
    let mut out = vec![0.0; 8];
    e8_unit_into(&u, &mut out);
    out.iter_mut().for_each(|v| *v *= scale);
    out
}

/// `A₂` in basis coordinates: `g` holds the generator columns, `ginv` its inverse
/// (both row-major 2×2). Candidates are the four floor/ceil corners plus the
/// six neighbours of the rounded coordinates; since the basis vectors meet at
/// 60°, the enclosing Delaunay triangle is always among them.
pub(crate) fn a2_into(x: &[f64], g: &[f64; 4], ginv: &[f64; 4], out: &mut [f64]) {
    let k0 = ginv[0] * x[0] + ginv[1] * x[1];
    let k1 = ginv[2] * x[0] + ginv[3] * x[1];
    let (f0, f1) = (k0.floor(), k1.floor());
    let (r0, r1) = (k0.round(), k1.round());
    let cands = [
        (f0, f1),
        (f0 + 1.0, f1),
        (f0, f1 + 1.0),
        (f0 + 1.0, f1 + 1.0),
        (r0 + 1.0, r1),
        (r0 - 1.0, r1),
        (r0, r1 + 1.0),
        (r0, r1 - 1.0),
        (r0 + 1.0, r1 - 1.0),
        (r0 - 1.0, r1 + 1.0),
    ];
    let mut best = (f64::INFINITY, f64::INFINITY, 0.0, 0.0);
    for (a, b) in cands {
        let px = g[0] * a + g[1] * b;
        let py = g[2] * a + g[3] * b;
        let d = (x[0] - px).powi(2) + (x[1] - py).powi(2);
        let norm = px * px + py * py;
        if d < best.0 || (d == best.0 && norm < best.1) {
            best = (d, norm, px, py);
        }
    }
    out[0] = best.2;
    out[1] = best.3;
}
