//! Base optimizer updates and the pWD step.
//!
//! A training step follows the usual order: gradient at `w_{t-1}`, base update
//! `δw_t` (SGD or Adam), schedule multiplier `η_t`, then the decay step which
//! shrinks `w_{t-1} - η_t α δw_t` by a factor computed from `w_{t-1}`.

mod adam;
mod baselines;
mod prune;
mod pwd;
mod schedule;

pub use adam::{adam_delta, sgd_delta, AdamState};
pub use baselines::{decoupled_multiplicative_step, naive_subgradient_step};
pub use prune::{magnitude_prune, PruneSchedule};
pub use pwd::{
    p_schedule_value, pwd_step, BaseOptimizer, DecayState, PSchedule, PScheduleProfile,
    PwdConfig, PwdOptimizer, StepDiag,
};
pub use schedule::Schedule;
