//! Lattice modulo sampling.
//!
//! A multichannel sample `x ∈ ℝⁿ` is folded into the Voronoi cell of a lattice
//! `Λ` by subtracting its nearest lattice point. This crate provides
//!
//! * scaled lattices (`Zⁿ`, `A₂`, `Dₙ`, `E₈`) with exact nearest-point
//!   quantizers, the lattice modulo operator and comparator-style folding
//!   ([`lattice`]),
//! * Monte Carlo second-moment estimation and MSE conversions ([`stats`]),
//! * bandlimited multisine test signals ([`signal`]),
//! * additive-noise and quantization channels ([`channel`]),
//! * unfolding algorithms: higher-order differences, out-of-band residual
//!   least squares and its sparse variant ([`recovery`]),
//! * a seeded, deterministic experiment harness ([`experiment`]).
//!
//! All lattices are scaled so that their packing radius (half the minimum
//! distance) equals the fold threshold `λ`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod experiment;
pub mod lattice;
pub mod recovery;
pub mod seeds;
pub mod signal;
pub mod stats;

pub use error::{Error, Result};
pub use lattice::{LatticeFamily, LatticeKind, ScaledLattice};
