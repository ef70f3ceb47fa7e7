//! Scaled lattices, nearest-point maps and the lattice modulo operator.
//!
//! Every lattice is scaled so that its packing radius equals `λ`, i.e. the
//! minimum distance is `2λ`. At equal `λ` the cells of different lattices
//! therefore contain the same inscribed ball and MSE comparisons between them
//! are like-for-like.

mod nearest;
mod relevant;

pub use nearest::{nearest_point_dn, nearest_point_e8, nearest_point_zn, round_half_toward_zero};
pub use relevant::fold_iterative;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;
use std::fmt;

use crate::error::{Error, Result};

/// Lattice coordinates in the ambient space.
pub type LatticePoint = Vec<f64>;

/// Supported lattice families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    /// Integer lattice; the "square" or hypercube fold.
    #[serde(alias = "square", alias = "z")]
    Zn,
    /// Hexagonal lattice.
    #[serde(alias = "hex", alias = "hexagonal")]
    A2,
    /// Checkerboard lattice.
    Dn,
    E8,
}

impl LatticeKind {
    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Zn => "zn",
            LatticeKind::A2 => "a2",
            LatticeKind::Dn => "dn",
            LatticeKind::E8 => "e8",
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for LatticeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zn" | "z" | "square" => Ok(LatticeKind::Zn),
            "a2" | "hex" | "hexagonal" => Ok(LatticeKind::A2),
            "dn" => Ok(LatticeKind::Dn),
            "e8" => Ok(LatticeKind::E8),
            other => Err(Error::Config(format!("unknown lattice '{other}'"))),
        }
    }
}

/// A lattice family at a fixed dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeFamily {
    pub kind: LatticeKind,
    pub n: usize,
}

impl LatticeFamily {
    pub fn new(kind: LatticeKind, n: usize) -> Result<Self> {
        let ok = match kind {
            LatticeKind::Zn => n >= 1,
            LatticeKind::A2 => n == 2,
            LatticeKind::Dn => n >= 2,
            LatticeKind::E8 => n == 8,
        };
        if !ok {
            return Err(Error::Config(format!("{kind} is not defined in dimension {n}")));
        }
        Ok(Self { kind, n })
    }
}

impl fmt::Display for LatticeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LatticeKind::A2 | LatticeKind::E8 => write!(f, "{}", self.kind),
            _ => write!(f, "{}{}", self.kind, self.n),
        }
    }
}

#[derive(Debug, Clone)]
enum Quantizer {
    Zn { scale: f64 },
    Dn { scale: f64 },
    E8 { scale: f64 },
    A2 { g: [f64; 4], ginv: [f64; 4] },
}

/// A lattice family instantiated at inradius `λ`.
///
/// Immutable after construction; share freely across threads.
#[derive(Debug, Clone)]
pub struct ScaledLattice {
    family: LatticeFamily,
    lambda: f64,
    generator: DMatrix<f64>,
    inverse: DMatrix<f64>,
    volume: f64,
    quantizer: Quantizer,
}

impl ScaledLattice {
    pub fn new(kind: LatticeKind, n: usize, lambda: f64) -> Result<Self> {
        let family = LatticeFamily::new(kind, n)?;
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Config(format!("inradius must be positive, got {lambda}")));
        }
        let (generator, quantizer) = match kind {
            LatticeKind::Zn => (
                DMatrix::identity(n, n) * (2.0 * lambda),
                Quantizer::Zn { scale: 2.0 * lambda },
            ),
            LatticeKind::A2 => {
                let s3 = 3f64.sqrt();
                let g = [2.0 * lambda, lambda, 0.0, s3 * lambda];
                let det = g[0] * g[3] - g[1] * g[2];
                let ginv = [g[3] / det, -g[1] / det, -g[2] / det, g[0] / det];
                (DMatrix::from_row_slice(2, 2, &g), Quantizer::A2 { g, ginv })
            }
            LatticeKind::Dn => {
                let s = lambda * SQRT_2;
                (dn_generator(n) * s, Quantizer::Dn { scale: s })
            }
            LatticeKind::E8 => {
                let s = lambda * SQRT_2;
                (e8_generator() * s, Quantizer::E8 { scale: s })
            }
        };
        let inverse = generator
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Config("singular generator matrix".into()))?;
        let volume = match kind {
            LatticeKind::Zn => (2.0 * lambda).powi(n as i32),
            LatticeKind::A2 => 2.0 * 3f64.sqrt() * lambda * lambda,
            LatticeKind::Dn => 2.0 * (lambda * SQRT_2).powi(n as i32),
            LatticeKind::E8 => (lambda * SQRT_2).powi(8),
        };
        Ok(Self { family, lambda, generator, inverse, volume, quantizer })
    }

    /// `Zⁿ` scaled to inradius `λ`.
    pub fn square(n: usize, lambda: f64) -> Result<Self> {
        Self::new(LatticeKind::Zn, n, lambda)
    }

    pub fn family(&self) -> LatticeFamily {
        self.family
    }

    pub fn kind(&self) -> LatticeKind {
        self.family.kind
    }

    pub fn dim(&self) -> usize {
        self.family.n
    }

    /// Packing radius.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn d_min(&self) -> f64 {
        2.0 * self.lambda
    }

    /// Cell volume `|det B|`.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Generator matrix; lattice points are `B·k` for integer `k`.
    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    /// Largest distance from a cell point to the origin.
    pub fn covering_radius(&self) -> f64 {
        let l = self.lambda;
        match self.family.kind {
            LatticeKind::Zn => l * (self.family.n as f64).sqrt(),
            LatticeKind::A2 => 2.0 * l / 3f64.sqrt(),
            LatticeKind::Dn => l * SQRT_2 * (self.family.n as f64 / 4.0).sqrt().max(1.0),
            LatticeKind::E8 => l * SQRT_2,
        }
    }

    /// Largest absolute value any single coordinate takes on the cell.
    pub fn coordinate_extent(&self) -> f64 {
        let l = self.lambda;
        match self.family.kind {
            LatticeKind::Zn => l,
            LatticeKind::A2 => 2.0 * l / 3f64.sqrt(),
            LatticeKind::Dn | LatticeKind::E8 => l * SQRT_2,
        }
    }

    /// Writes `Q_Λ(x)` into `out`.
    ///
    /// # Panics
    /// If either slice length differs from the lattice dimension.
    pub fn nearest_point_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.family.n;
        assert!(x.len() == n && out.len() == n, "expected {n}-dimensional input");
        match &self.quantizer {
            Quantizer::Zn { scale } => {
                for (o, &v) in out.iter_mut().zip(x) {
                    *o = scale * round_half_toward_zero(v / scale);
                }
            }
            Quantizer::Dn { scale } => scaled(x, out, *scale, nearest::dn_unit_into),
            Quantizer::E8 { scale } => scaled(x, out, *scale, nearest::e8_unit_into),
            Quantizer::A2 { g, ginv } => nearest::a2_into(x, g, ginv, out),
        }
    }

    /// `Q_Λ(x)`: the lattice point closest to `x`.
    pub fn nearest_point(&self, x: &[f64]) -> LatticePoint {
        let mut out = vec![0.0; self.family.n];
        self.nearest_point_into(x, &mut out);
        out
    }

    /// Lattice modulo: returns `(x − Q_Λ(x), Q_Λ(x))`.
    pub fn fold(&self, x: &[f64]) -> (Vec<f64>, LatticePoint) {
        let offset = self.nearest_point(x);
        let residue = x.iter().zip(&offset).map(|(a, b)| a - b).collect();
        (residue, offset)
    }

    /// In-place lattice modulo; returns nothing, `x` becomes its residue.
    pub fn fold_in_place(&self, x: &mut [f64], scratch: &mut [f64]) {
        self.nearest_point_into(x, scratch);
        for (v, q) in x.iter_mut().zip(scratch.iter()) {
            *v -= q;
        }
    }

    /// Real coordinates `B⁻¹x`.
    pub fn coordinates(&self, x: &[f64]) -> Vec<f64> {
        let v = &self.inverse * nalgebra::DVector::from_column_slice(x);
        v.iter().copied().collect()
    }

    /// Maps integer coordinates back to the ambient space.
    pub fn point_from_coordinates(&self, k: &[f64]) -> LatticePoint {
        let v = &self.generator * nalgebra::DVector::from_column_slice(k);
        v.iter().copied().collect()
    }

    /// Lattice membership with relative tolerance `1e-9` on the coordinates.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.coordinates(x)
            .iter()
            .all(|k| (k - k.round()).abs() <= 1e-9 * k.abs().max(1.0))
    }

    /// Rounds a point that is a lattice point up to floating-point error onto
    /// the exact lattice point, via its integer coordinates.
    pub fn snap(&self, x: &[f64]) -> LatticePoint {
        let k: Vec<f64> = self.coordinates(x).iter().map(|v| v.round()).collect();
        self.point_from_coordinates(&k)
    }

    /// Integer coordinates of a (near-)lattice point.
    pub fn integer_coordinates(&self, x: &[f64]) -> Vec<i64> {
        self.coordinates(x).iter().map(|v| v.round() as i64).collect()
    }
}

fn scaled(x: &[f64], out: &mut [f64], scale: f64, unit: fn(&[f64], &mut [f64])) {
    let mut buf = [0.0f64; 16];
    if x.len() <= buf.len() {
        let u = &mut buf[..x.len()];
        for (ui, &v) in u.iter_mut().zip(x) {
            *ui = v / scale;
        }
        unit(u, out);
    } else {
        let u: Vec<f64> = x.iter().map(|v| v / scale).collect();
        unit(&u, out);
    }
    out.iter_mut().for_each(|v| *v *= scale);
}

/// Unit `Dₙ` generator, basis vectors as columns.
fn dn_generator(n: usize) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(n, n);
    g[(0, 0)] = -1.0;
    g[(1, 0)] = -1.0;
    g[(0, 1)] = 1.0;
    g[(1, 1)] = -1.0;
    for j in 2..n {
        g[(j - 1, j)] = 1.0;
        g[(j, j)] = -1.0;
    }
    g
}

/// Unit `E₈` generator (determinant 1), basis vectors as columns.
fn e8_generator() -> DMatrix<f64> {
    let mut rows = DMatrix::zeros(8, 8);
    rows[(0, 0)] = 2.0;
    for i in 1..7 {
        rows[(i, i - 1)] = -1.0;
        rows[(i, i)] = 1.0;
    }
    for j in 0..8 {
        rows[(7, j)] = 0.5;
    }
    rows.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn family_dimension_rules() {
        assert!(LatticeFamily::new(LatticeKind::A2, 3).is_err());
        assert!(LatticeFamily::new(LatticeKind::E8, 7).is_err());
        assert!(LatticeFamily::new(LatticeKind::Dn, 1).is_err());
        assert!(LatticeFamily::new(LatticeKind::Zn, 0).is_err());
        assert!(ScaledLattice::new(LatticeKind::Zn, 2, 0.0).is_err());
        assert!(ScaledLattice::new(LatticeKind::Zn, 2, -1.0).is_err());
    }

    #[test]
    fn volumes_match_determinants() {
        for (kind, n) in [
            (LatticeKind::Zn, 1),
            (LatticeKind::Zn, 3),
            (LatticeKind::A2, 2),
            (LatticeKind::Dn, 2),
            (LatticeKind::Dn, 4),
            (LatticeKind::Dn, 5),
            (LatticeKind::E8, 8),
        ] {
            for lambda in [0.1, 1.0, 2.5] {
                let l = ScaledLattice::new(kind, n, lambda).unwrap();
                let det = l.generator().determinant().abs();
                assert!((det - l.volume()).abs() <= 1e-9 * l.volume(), "{kind} {n} {lambda}");
            }
        }
    }

    #[test]
    fn unit_e8_generator_is_unimodular() {
        assert!((e8_generator().determinant().abs() - 1.0).abs() < 1e-12);
        assert!((dn_generator(6).determinant().abs() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn volume_ratios() {
        let z1 = ScaledLattice::new(LatticeKind::Zn, 1, 1.0).unwrap();
        assert_eq!(z1.d_min(), 2.0);
        assert_eq!(z1.volume(), 2.0);
        let a2 = ScaledLattice::new(LatticeKind::A2, 2, 1.0).unwrap();
        assert!((a2.volume() - 2.0 * 3f64.sqrt()).abs() < 1e-12);
        assert!((a2.volume() / 4.0 - 0.866).abs() < 5e-4);
        let e8 = ScaledLattice::new(LatticeKind::E8, 8, 1.0).unwrap();
        assert!((e8.volume() / 256.0 - 0.0625).abs() < 1e-12);
        let d4 = ScaledLattice::new(LatticeKind::Dn, 4, 1.0).unwrap();
        assert!((d4.volume() / 16.0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zn_ties_go_toward_zero() {
        assert_eq!(nearest_point_zn(&[0.4, -0.6], 1.0), vec![0.0, -1.0]);
        assert_eq!(nearest_point_zn(&[0.5], 1.0), vec![0.0]);
        assert_eq!(nearest_point_zn(&[-1.5], 1.0), vec![-1.0]);
        assert_eq!(nearest_point_zn(&[2.5, -0.5], 1.0), vec![2.0, 0.0]);
    }

    #[test]
    fn dn_examples() {
        let x = [1.8, -3.6, 5.1, 0.7, -4.9, 2.6, 6.2, -2.7];
        assert_eq!(nearest_point_dn(&x, 1.0), vec![2.0, -3.0, 5.0, 1.0, -5.0, 3.0, 6.0, -3.0]);
        assert_eq!(nearest_point_dn(&[0.0, 0.0], 1.0), vec![0.0, 0.0]);
        assert_eq!(nearest_point_dn(&[0.6, 0.6], 1.0), vec![1.0, 1.0]);
        // odd-sum integer input: a norm-reducing unit move
        let p = nearest_point_dn(&[1.0, 0.0, 0.0], 1.0);
        assert_eq!(p, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn e8_example() {
        let x = [2.3, -3.1, 5.6, 1.2, -4.4, 3.1, 6.7, -2.2];
        let l = ScaledLattice::new(LatticeKind::E8, 8, 1.0 / SQRT_2).unwrap();
        let (r, p) = l.fold(&x);
        assert!(close(&p, &[2.0, -3.0, 6.0, 1.0, -4.0, 3.0, 7.0, -2.0], 1e-12));
        assert!(close(&r, &[0.3, -0.1, -0.4, 0.2, -0.4, 0.1, -0.3, -0.2], 1e-12));
        assert_eq!(nearest_point_e8(&x, 1.0), p);
    }

    #[test]
    fn e8_points_are_fixed() {
        let pts = [[0.0; 8], [0.5; 8], [1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], [
            -0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, -0.5,
        ]];
        for p in pts {
            assert_eq!(nearest_point_e8(&p, 1.0), p.to_vec());
        }
    }

    #[test]
    fn e8_quarter_vector_matches_coset_oracle() {
        // Both cosets' candidates: D8 nearest is 0 at distance² 0.5; the
        // half-integer coset nearest is ½·1 at the same distance. c1 wins.
        let x = [0.25; 8];
        let c1 = nearest_point_dn(&x, 1.0);
        let mut c2 = nearest_point_dn(&x.map(|v| v - 0.5), 1.0);
        c2.iter_mut().for_each(|v| *v += 0.5);
        let d = |c: &[f64]| x.iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        let expect = if d(&c1) <= d(&c2) { c1 } else { c2 };
        assert_eq!(nearest_point_e8(&x, 1.0), expect);
    }

    #[test]
    fn a2_examples() {
        let l = ScaledLattice::new(LatticeKind::A2, 2, 1.0).unwrap();
        assert_eq!(l.nearest_point(&[0.0, 0.0]), vec![0.0, 0.0]);
        assert!(close(&l.nearest_point(&[2.0, 0.0]), &[2.0, 0.0], 1e-12));
        // window oracle
        let x = [1.0, 0.5];
        let mut best = (f64::INFINITY, vec![]);
        for a in -3..=3 {
            for b in -3..=3 {
                let p = l.point_from_coordinates(&[a as f64, b as f64]);
                let d = (x[0] - p[0]).powi(2) + (x[1] - p[1]).powi(2);
                if d < best.0 {
                    best = (d, p);
                }
            }
        }
        assert!(close(&l.nearest_point(&x), &best.1, 1e-12));
    }

    #[test]
    fn z1_fold_closed_form() {
        let l = ScaledLattice::square(1, 1.0).unwrap();
        let (r, p) = l.fold(&[3.0]);
        // tie: 3λ is equidistant from 2λ and 4λ; the smaller offset wins
        assert_eq!((r[0], p[0]), (1.0, 2.0));
        for x in [-7.3, -0.2, 0.9, 5.5, 12.01] {
            let (r, _) = l.fold(&[x]);
            let closed = (x + 1.0f64).rem_euclid(2.0) - 1.0;
            assert!((r[0] - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn membership() {
        let e8 = ScaledLattice::new(LatticeKind::E8, 8, 0.3).unwrap();
        let p = e8.nearest_point(&[0.7, -0.1, 1.2, 3.3, -0.9, 0.05, 0.4, 2.0]);
        assert!(e8.contains(&p));
        assert!(!e8.contains(&[0.1; 8]));
        let a2 = ScaledLattice::new(LatticeKind::A2, 2, 1.0).unwrap();
        assert!(a2.contains(&[1.0, 3f64.sqrt()]));
        assert!(!a2.contains(&[1.0, 0.0]));
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("square".parse::<LatticeKind>().unwrap(), LatticeKind::Zn);
        assert_eq!("E8".parse::<LatticeKind>().unwrap(), LatticeKind::E8);
        assert!("leech".parse::<LatticeKind>().is_err());
    }
}
