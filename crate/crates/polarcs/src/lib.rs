//! Polarizing linear transforms over the reals and the sensing systems they induce.
//!
//! The library is organised around a single recursive construction: the
//! 2 x 2 kernel `[[beta, beta], [0, 1]]` raised to an n-fold Kronecker power
//! with a bit-reversal column permutation. Feeding i.i.d. data through that
//! transform and then through a memoryless sparse-noise channel polarizes the
//! per-coordinate mutual information dimension: almost every coordinate
//! becomes either perfectly informative or perfectly useless as n grows.
//!
//! Everything else follows from that fact:
//!
//! * [`transform`] builds and applies the transform itself.
//! * [`mid`] computes the per-coordinate information-dimension profile by a
//!   closed-form recursion and selects the best coordinates.
//! * [`sensing`] splits the transform into a measurement matrix, derives the
//!   orthonormal annihilator that converts between the error-correction and
//!   compressed-sensing views, and provides spark and Gaussian baselines.
//! * [`channel`] samples the sparse additive noise channels (Gaussian-burst
//!   and erasure-flagged variants).
//! * [`decode`] recovers inputs: an exhaustive sparsest-support oracle, an
//!   interior-point l1 solver, basis pursuit, and a successive-cancellation
//!   erasure decoder.
//! * [`infodim`] estimates information dimension and its mutual variant from
//!   samples, for validating the theory numerically.
//! * [`sweep`] runs seeded Monte Carlo error-rate sweeps over sparsity or
//!   rate grids.
//! * [`io`] reads and writes the JSON matrix format and CSV reports shared
//!   with the command-line tool.
//!
//! All randomness flows through explicitly seeded ChaCha streams
//! ([`rng`]); identical seeds give identical results regardless of thread
//! count.

pub mod channel;
pub mod decode;
pub mod error;
pub mod infodim;
pub mod io;
pub mod linalg;
pub mod mid;
pub mod rng;
pub mod sensing;
pub mod sweep;
pub mod transform;

pub use error::Error;

/// Default kernel weight: `1/sqrt(2)`, which gives the transform unit-norm rows.
pub const DEFAULT_BETA: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Crate result alias.
pub type Result<T> = std::result::Result<T, Error>;
