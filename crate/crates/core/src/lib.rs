//! Deterministic simulation and analysis of asynchronous parallel block
//! coordinate descent on objectives satisfying the Polyak-Łojasiewicz
//! inequality.
//!
//! The crate is organised around a small pipeline:
//!
//! * [`objective`] — objective-function contract plus a catalog of certified
//!   built-in instances (quadratics, a sine-perturbed PL example,
//!   rank-deficient least squares, ℓ2-regularised logistic regression),
//! * [`partition`] — contiguous block decompositions of the decision vector,
//! * [`schedule`] — seeded generation and validation of activation sets and
//!   bounded-staleness tables,
//! * [`simulator`] — the logical-time engine that executes the block update
//!   rule against a schedule and emits a full per-step trace,
//! * [`analysis`] — stepsize thresholds, proof constants, window series, the
//!   linear-convergence bound checker and contraction-rate fits,
//! * [`data`] / [`logistic`] — dataset generation, sparse-text loading,
//!   preprocessing and the regularised logistic-regression objective,
//! * [`config`] / [`trace`] / [`report`] / [`svg`] — the run-configuration
//!   format and the serialised output artifacts.
//!
//! Everything is deterministic: the same configuration and seeds reproduce
//! byte-identical artifacts.

pub mod analysis;
pub mod catalog;
pub mod checks;
pub mod config;
pub mod data;
pub mod error;
pub mod linalg;
pub mod logistic;
pub mod objective;
pub mod partition;
pub mod report;
pub mod sampling;
pub mod schedule;
pub mod simulator;
pub mod svg;
pub mod trace;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
