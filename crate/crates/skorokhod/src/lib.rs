//! Monte Carlo toolkit for reflected and local-time stochastic differential
//! equations.
//!
//! The crate is organized in five layers:
//!
//! - [`model`] — SDE coefficients, convex domains with closed-form projection,
//!   bounded signed measures, and the scale transform that removes local-time
//!   terms from one-dimensional equations.
//! - [`simulate`] — Euler–Maruyama schemes for ordinary, penalized, projected
//!   (reflected), Girsanov-coupled and Harnack-coupled diffusions, driven by a
//!   counter-based noise source so every path is reproducible and
//!   parallelizable.
//! - [`transport`] — empirical Wasserstein distances (sorted coupling in 1-D,
//!   exact assignment solver in general dimension), path-space metrics, and
//!   Monte Carlo statistics.
//! - [`verify`] — a suite of falsifiable checks, one per inequality: each run
//!   reports the empirical value, the theoretical bound, the statistical
//!   tolerance, and a pass/fail verdict.
//! - [`cli`] — a configuration-driven runner with machine-readable reports
//!   and deterministic, byte-identical outputs under a fixed seed.

pub mod cli;
pub mod error;
pub mod model;
pub mod simulate;
pub mod transport;
pub mod verify;

pub use error::{Error, Result};
