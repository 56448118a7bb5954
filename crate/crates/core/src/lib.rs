//! p-norm weight decay (pWD).
//!
//! A proximal weight-decay step that generalizes decoupled L2 decay to any
//! `p`-norm with `0 < p <= 2`. After the base optimizer produces its update
//! `δw`, every decay-eligible weight is moved to
//!
//! ```text
//! w_t = |w_{t-1}|^(2-p) / (|w_{t-1}|^(2-p) + η_t α λ_p) · (w_{t-1} - η_t α δw)
//! ```
//!
//! The factor is always evaluated in the `|w|^(2-p)` form so it stays finite at
//! `w = 0`, where it is exactly zero for `p < 2`.
//!
//! Layout:
//! - [`params`] and [`rng`]: flat parameter vectors, groups, seeded randomness.
//! - [`regularizers`]: penalties, the auxiliary-variable formulation, proximal maps
//!   and decay factors.
//! - [`optimizers`]: SGD/Adam deltas, warmup-cosine schedule, the fused pWD step,
//!   unstable baselines, `p` scheduling and magnitude pruning.
//! - [`models`]: desk-scale losses with exact gradients.
//! - [`datagen`]: deterministic synthetic datasets.
//! - [`verification`]: oracles for sparsity, monotone descent, fixed-point
//!   stability, equivalence of the extended formulation and gradients.

pub mod datagen;
pub mod error;
pub mod models;
pub mod optimizers;
pub mod params;
pub mod regularizers;
pub mod rng;
pub mod verification;

pub use error::{Error, Result};
pub use params::{group_partition, ElasticTerm, ParamGroup, ParamVector};
pub use rng::Rng;
