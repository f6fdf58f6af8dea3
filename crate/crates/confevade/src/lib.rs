//! Generation of adversarial configurations against learned acceptability
//! classifiers for configurable systems.
//!
//! The crate covers the full experimental loop:
//!
//! * [`vm`] — typed variability models, configuration validity, type repair
//!   and seeded random sampling;
//! * [`data`] — labeled datasets, CSV persistence, stratified splits,
//!   centroid class balancing and enumeration dummification;
//! * [`classifier`] — a linear max-margin classifier trained by seeded
//!   stochastic subgradient descent, with discriminant, gradient and
//!   feature-importance access;
//! * [`attack`] — the gradient-descent evasion attack with per-step type
//!   repair, a random-perturbation baseline and pool-growing attack runs;
//! * [`campaign`] — synthetic labeling oracles, grid campaigns over step
//!   sizes and displacement budgets, retraining experiments and report
//!   summaries.
//!
//! Everything is deterministic given explicit seeds; campaign grids run in
//! parallel when the `parallel` feature (default) is enabled, with identical
//! output either way.

pub mod attack;
pub mod campaign;
pub mod classifier;
pub mod data;
pub mod error;
pub mod seed;
pub mod vm;

pub use error::{Error, ErrorCategory, Result};
