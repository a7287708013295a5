//! Self-guided quantum process tomography for single-qubit unitaries.
//!
//! The learner ([`spsa`]) tunes a control unitary by simultaneous-perturbation
//! stochastic approximation on a measured Bell-outcome probability
//! ([`measurement`]). A standard tomography baseline lives in [`qpt`], and
//! [`harness`] runs seeded ensembles over Haar-random targets.

pub mod error;
pub mod harness;
pub mod measurement;
pub mod qpt;
pub mod spsa;
pub mod su2;

pub use error::{Error, Result};
