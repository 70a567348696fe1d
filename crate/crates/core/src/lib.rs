//! Uniform partitions of restricted exponential systems into Riesz sequences.
//!
//! Given a cover `{E_n}` of a set `E ⊂ 𝕋 = [0, 1)` and a frequency set
//! `Λ ⊂ ℝ` of small upper Beurling dimension, the system
//! `{e^{2πiλx} : λ ∈ Λ}` splits into the residue classes
//! `Λ_j(N) = {λ_{mN+j}}`, each of which has a lower Riesz bound on `E^c`.
//! This crate computes the modulus `N` together with every intermediate
//! constant, records each inequality used along the way in a
//! [`partition::PartitionCertificate`], and checks the predicted bounds
//! against extremal eigenvalues of finite Gram sections.
//!
//! Modules:
//!
//! * [`setmodel`]: finite interval unions on the torus and cover costs.
//! * [`pointset`]: finite windows of `Λ`, window counts, density and dimension
//!   estimates, residue-class subsampling.
//! * [`bounds`]: closed-form trigonometric energies, the Montgomery–Vaughan
//!   inequality, the index-gap and subsample-density lemmas, the interval
//!   energy bound.
//! * [`gram`]: Gram matrices of restricted exponentials and their extremal
//!   eigenvalues.
//! * [`partition`]: constant extraction and empirical validation.
//! * [`examples`]: the rational-centred cover, the lacunary block set and the
//!   arithmetic-progression search.
//! * [`cli`]: the `espart` command line.

// `!(x > 0.0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod examples;
pub mod gram;
pub mod io;
mod par;
pub mod partition;
pub mod pointset;
pub mod setmodel;

pub use error::{Error, Result};
pub use par::configure_threads;
