//! Oracles for checking the optimizer against its theoretical guarantees.
//!
//! - [`sparsity`] and [`tradeoff_metric`]: the headline evaluation metrics.
//! - [`grad_check`]: central finite differences against analytic gradients.
//! - [`monotonicity_certificate`]: sufficient decrease of the regularized
//!   objective under gradient descent with pWD.
//! - [`stability_probe`]: one-step perturbation analysis of the zero fixed point.
//! - [`equivalence_oracle`]: brute-force comparison of the `p`-norm penalty and
//!   its extended `(w, s)` formulation.
//! - [`stationary_point_oracle`]: regularized stationary points by bisection
//!   and dense search.

mod equivalence;
mod gradcheck;
mod monotonicity;
mod sparsity;
mod stability;
mod stationary;

pub use equivalence::{envelope_gap, equivalence_oracle, EquivalenceReport, GridSpec, OracleStatus};
pub use gradcheck::{grad_check, grad_check_loss};
pub use monotonicity::{monotonicity_certificate, regularized_objective, MonotonicityReport, Violation};
pub use sparsity::{sparsity, sparsity_of, tradeoff_metric, GroupSparsity, SparsityReport, DEFAULT_TAU};
pub use stability::{stability_probe, StabilityEntry, StabilityReport, REGIME_RATIO};
pub use stationary::{stationary_point_nd, stationary_point_oracle, StationaryPoint};
