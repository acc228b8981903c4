//! Desk-scale numerics for quantum dimensionality reduction.
//!
//! The crate builds the random-isometry embedding channel (apply a Haar
//! isometry `V: C^d -> C^e ⊗ C^⌈d/e⌉`, then discard the second factor), checks
//! the Haar-integral identities that bound how much any channel can contract
//! 2-norm distances, plays the equality-testing and state-discrimination games
//! in which the 2-norm is the operational figure of merit, and runs the
//! trace-norm embedding experiments.
//!
//! Layout:
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigensolver, tensor structure, Schatten norms.
//! - [`sampling`]: counter-based random streams and Haar samplers.
//! - [`channels`]: Kraus-form channels and the flip functional `tr[F_e E⊗2(F_d)]`.
//! - [`verifiers`]: Monte Carlo and closed-form checks of the Haar-integral lemmas.
//! - [`games`]: equality testing without a shared frame and binary discrimination.
//! - [`experiments`]: end-to-end experiments and the versioned JSON/CSV report.

#![forbid(unsafe_code)]

pub mod channels;
pub mod error;
pub mod experiments;
pub mod games;
pub mod linalg;
pub mod parallel;
pub mod sampling;
pub mod verifiers;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
