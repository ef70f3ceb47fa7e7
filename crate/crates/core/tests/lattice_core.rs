mod common;

use common::{brute_nearest, random_inputs};
use latmod::lattice::{fold_iterative, nearest_point_dn};
use latmod::{LatticeKind, ScaledLattice};
use proptest::prelude::*;

fn lattices(lambda: f64) -> Vec<ScaledLattice> {
    [(LatticeKind::Zn, 2), (LatticeKind::Zn, 3), (LatticeKind::A2, 2), (LatticeKind::Dn, 4), (LatticeKind::E8, 8)]
        .into_iter()
        .map(|(k, n)| ScaledLattice::new(k, n, lambda).unwrap())
        .collect()
}

#[test]
fn nearest_point_matches_enumeration() {
    for (i, l) in lattices(0.7).iter().enumerate() {
        for x in random_inputs(l.dim(), 0.7, 2000, 100 + i as u64) {
            let (best, gap) = brute_nearest(l, &x);
            if gap < 1e-9 {
                continue;
            }
            assert_eq!(l.integer_coordinates(&l.nearest_point(&x)), l.integer_coordinates(&best), "{} at {x:?}", l.family());
        }
    }
}

#[test]
fn dn_matches_enumeration_in_other_dimensions() {
    for n in [2, 3, 5, 7] {
        let l = ScaledLattice::new(LatticeKind::Dn, n, 1.0).unwrap();
        for x in random_inputs(n, 1.0, 500, n as u64) {
            let (best, gap) = brute_nearest(&l, &x);
            if gap > 1e-9 {
                assert_eq!(l.integer_coordinates(&l.nearest_point(&x)), l.integer_coordinates(&best));
            }
        }
    }
}

#[test]
fn dn_window_oracle() {
    // every even-sum integer vector in [-2, 2]²
    let x = [0.6, 0.6];
    let mut best = (f64::INFINITY, [0.0, 0.0]);
    for a in -2..=2 {
        for b in -2..=2 {
            if (a + b) % 2 == 0 {
                let d = (x[0] - a as f64).powi(2) + (x[1] - b as f64).powi(2);
                if d < best.0 {
                    best = (d, [a as f64, b as f64]);
                }
            }
        }
    }
    assert_eq!(nearest_point_dn(&x, 1.0), best.1.to_vec());
}

#[test]
fn relevant_vectors_give_minimum_distance() {
    for l in lattices(0.3) {
        let rv = l.relevant_vectors().unwrap();
        let min = rv.iter().map(|v| v.iter().map(|a| a * a).sum::<f64>().sqrt()).fold(f64::INFINITY, f64::min);
        assert!((min - l.d_min()).abs() < 1e-9);
    }
}

#[test]
fn fold_residue_lies_in_closed_cell() {
    for (i, l) in lattices(1.3).iter().enumerate() {
        let rv = l.relevant_vectors().unwrap();
        for x in random_inputs(l.dim(), 1.3, 2000, 7 + i as u64) {
            let (r, off) = l.fold(&x);
            assert!(l.contains(&off));
            for p in &rv {
                let dot: f64 = p.iter().zip(&r).map(|(a, b)| a * b).sum();
                let nn: f64 = p.iter().map(|a| a * a).sum();
                assert!(dot <= nn / 2.0 + 1e-9);
            }
        }
    }
}

fn lattice_strategy() -> impl Strategy<Value = ScaledLattice> {
    (0usize..5, 0.05f64..3.0).prop_map(|(i, lambda)| lattices(lambda).swap_remove(i))
}

fn point_and_lattice() -> impl Strategy<Value = (ScaledLattice, Vec<f64>, Vec<i64>)> {
    lattice_strategy().prop_flat_map(|l| {
        let n = l.dim();
        let lam = l.lambda();
        (
            Just(l),
            prop::collection::vec(-6.0 * lam..6.0 * lam, n),
            prop::collection::vec(-4i64..=4, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn fold_is_idempotent((l, x, _) in point_and_lattice()) {
        let (r, _) = l.fold(&x);
        let (r2, off2) = l.fold(&r);
        prop_assert!(off2.iter().all(|&v| v == 0.0) || common::dist2(&r2, &r) < 1e-18,
            "second fold moved {:?} by {:?}", r, off2);
    }

    #[test]
    fn fold_is_lattice_periodic((l, x, k) in point_and_lattice()) {
        let kf: Vec<f64> = k.iter().map(|&v| v as f64).collect();
        let p = l.point_from_coordinates(&kf);
        let shifted: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + b).collect();
        let (r1, _) = l.fold(&x);
        let (r2, _) = l.fold(&shifted);
        // boundary inputs may land on either closed-cell representative
        let (_, gap) = brute_nearest(&l, &x);
        prop_assume!(gap > 1e-6);
        prop_assert!(common::dist2(&r1, &r2).sqrt() < 1e-9);
    }

    #[test]
    fn iterative_fold_agrees((l, x, _) in point_and_lattice()) {
        let (_, gap) = brute_nearest(&l, &x);
        prop_assume!(gap > 1e-6);
        let a = fold_iterative(&x, &l).unwrap();
        let (b, _) = l.fold(&x);
        prop_assert!(common::dist2(&a, &b).sqrt() < 1e-9);
        let diff: Vec<f64> = x.iter().zip(&a).map(|(u, v)| u - v).collect();
        prop_assert!(l.contains(&diff));
    }
}
