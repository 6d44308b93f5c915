//! Coherence quantifiers referenced to orthonormal bases, Lüders projector
//! decompositions and rank-one POVMs.
//!
//! The crate pairs every closed-form quantifier with an independent numerical
//! route (see [`oracle`]) so that the formulas can be checked rather than
//! trusted. Modules:
//!
//! - [`linalg`]: Hermitian eigendecomposition, matrix functions, random generators.
//! - [`divergence`]: classical and quantum Tsallis α-divergences.
//! - [`measurement`]: projector decompositions, Lüders / von Neumann channels,
//!   Kraus channels, rank-one POVMs and their Naimark completion.
//! - [`quantifiers`]: ℓ1, relative-entropy, α, robustness and weight quantifiers.
//! - [`oracle`]: brute-force minimizers and randomized property suites.
//! - [`usd`]: the unambiguous-state-discrimination case study.
//! - [`spin`]: the two-qubit total-spin example.
//! - [`cli`]: command-line front end.

#![allow(clippy::nonminimal_bool, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod divergence;
pub mod error;
pub mod linalg;
pub mod measurement;
pub mod oracle;
pub mod quantifiers;
pub mod spin;
pub mod usd;

pub use error::{Error, Result};
