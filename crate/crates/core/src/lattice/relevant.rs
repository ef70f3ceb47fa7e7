//! Relevant vectors (facet normals of the Voronoi cell) and comparator-style
//! folding.

use super::{LatticeKind, ScaledLattice};
use crate::error::{Error, Result};
use std::f64::consts::SQRT_2;

impl ScaledLattice {
    /// The Voronoi-relevant vectors, in `±` pairs.
    ///
    /// Available for `Zⁿ`, `A₂`, `D₂`–`D₄` and `E₈`. For these lattices the
    /// relevant vectors are exactly the minimal vectors, all of norm `2λ`.
    pub fn relevant_vectors(&self) -> Result<Vec<Vec<f64>>> {
        let n = self.dim();
        let l = self.lambda();
        match self.kind() {
            LatticeKind::Zn => {
                let mut out = Vec::with_capacity(2 * n);
                for i in 0..n {
                    for s in [1.0, -1.0] {
                        let mut v = vec![0.0; n];
                        v[i] = 2.0 * s * l;
                        out.push(v);
                    }
                }
                Ok(out)
            }
            LatticeKind::A2 => {
                let g = self.generator();
                let v1 = [g[(0, 0)], g[(1, 0)]];
                let v2 = [g[(0, 1)], g[(1, 1)]];
                let v3 = [v1[0] - v2[0], v1[1] - v2[1]];
                Ok([v1, v2, v3]
                    .iter()
                    .flat_map(|v| [v.to_vec(), vec![-v[0], -v[1]]])
                    .collect())
            }
            LatticeKind::Dn if n <= 4 => Ok(pairs_pm1(n, l * SQRT_2)),
            LatticeKind::E8 => {
                let s = l * SQRT_2;
                let mut out = pairs_pm1(8, s);
                for mask in 0u32..256 {
                    if mask.count_ones() % 2 == 0 {
                        out.push(
                            (0..8)
                                .map(|i| if mask >> i & 1 == 1 { -0.5 * s } else { 0.5 * s })
                                .collect(),
                        );
                    }
                }
                Ok(out)
            }
            LatticeKind::Dn => Err(Error::Unsupported(format!(
                "relevant vectors of D{n} are not enumerated (only n ≤ 4)"
            ))),
        }
    }
}

/// All vectors with two nonzero entries `±scale`.
fn pairs_pm1(n: usize, scale: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * n * (n - 1));
    for i in 0..n {
        for j in i + 1..n {
            for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut v = vec![0.0; n];
                v[i] = a * scale;
                v[j] = b * scale;
                out.push(v);
            }
        }
    }
    out
}

/// Folds by repeatedly subtracting the relevant vector whose comparator
/// threshold `⟨p, r⟩ = ‖p‖²/2` is violated the most. Each step strictly
/// shrinks `‖r‖`, so the loop terminates inside the cell.
pub fn fold_iterative(x: &[f64], lattice: &ScaledLattice) -> Result<Vec<f64>> {
    let rv = lattice.relevant_vectors()?;
    let norms: Vec<f64> = rv.iter().map(|p| p.iter().map(|v| v * v).sum()).collect();
    let mut r = x.to_vec();
    loop {
        let mut best: Option<(usize, f64)> = None;
        for (i, p) in rv.iter().enumerate() {
            let dot: f64 = p.iter().zip(&r).map(|(a, b)| a * b).sum();
            let excess = dot - norms[i] / 2.0;
            if excess > 1e-12 * norms[i] && best.map_or(true, |(_, e)| excess > e) {
                best = Some((i, excess));
            }
        }
        match best {
            Some((i, _)) => r.iter_mut().zip(&rv[i]).for_each(|(a, b)| *a -= b),
            None => return Ok(r),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_norms() {
        for (kind, n, count) in [
            (LatticeKind::Zn, 2, 4),
            (LatticeKind::Zn, 5, 10),
            (LatticeKind::A2, 2, 6),
            (LatticeKind::Dn, 3, 12),
            (LatticeKind::Dn, 4, 24),
            (LatticeKind::E8, 8, 240),
        ] {
            let l = ScaledLattice::new(kind, n, 0.7).unwrap();
            let rv = l.relevant_vectors().unwrap();
            assert_eq!(rv.len(), count, "{kind}{n}");
            for v in &rv {
                let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                assert!((norm - l.d_min()).abs() < 1e-9);
                assert!(l.contains(v));
                let neg: Vec<f64> = v.iter().map(|a| -a).collect();
                assert!(rv.iter().any(|w| w.iter().zip(&neg).all(|(a, b)| (a - b).abs() < 1e-12)));
            }
        }
    }

    #[test]
    fn d5_is_unsupported() {
        let l = ScaledLattice::new(LatticeKind::Dn, 5, 1.0).unwrap();
        assert!(matches!(l.relevant_vectors(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn single_crossing_on_z1() {
        let l = ScaledLattice::square(1, 1.0).unwrap();
        assert_eq!(fold_iterative(&[1.4], &l).unwrap(), vec![1.4 - 2.0]);
        assert_eq!(fold_iterative(&[-0.3], &l).unwrap(), vec![-0.3]);
    }
}
