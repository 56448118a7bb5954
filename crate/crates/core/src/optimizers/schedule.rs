use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Linear warmup to `max_lr` followed by cosine annealing down to `min_lr`.
///
/// The schedule is expressed as a multiplier `η_t` on the base rate `α = max_lr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub max_lr: f64,
    pub min_lr: f64,
    pub warmup_steps: u64,
    pub total_steps: u64,
}

impl Schedule {
    /// `min_lr = max_lr / 100`.
    pub fn new(max_lr: f64, warmup_steps: u64, total_steps: u64) -> Result<Self> {
        Self::with_min(max_lr, max_lr / 100.0, warmup_steps, total_steps)
    }

    pub fn with_min(max_lr: f64, min_lr: f64, warmup_steps: u64, total_steps: u64) -> Result<Self> {
        if !(max_lr > 0.0 && max_lr.is_finite()) {
            return Err(Error::Config(format!("max_lr = {max_lr} must be > 0")));
        }
        if !(min_lr > 0.0 && min_lr <= max_lr) {
            return Err(Error::Config(format!("min_lr = {min_lr} must be in (0, max_lr]")));
        }
        if total_steps <= warmup_steps {
            return Err(Error::Config(format!(
                "total_steps = {total_steps} must exceed warmup_steps = {warmup_steps}"
            )));
        }
        Ok(Self {
            max_lr,
            min_lr,
            warmup_steps,
            total_steps,
        })
    }

    /// `η_t` for `1 <= t <= total_steps`.
    pub fn multiplier(&self, t: u64) -> Result<f64> {
        if t == 0 || t > self.total_steps {
            return Err(Error::Domain(format!(
                "schedule step {t} outside 1..={}",
                self.total_steps
            )));
        }
        if t <= self.warmup_steps {
            return Ok(t as f64 / self.warmup_steps as f64);
        }
        let floor = self.min_lr / self.max_lr;
        let progress =
            (t - self.warmup_steps) as f64 / (self.total_steps - self.warmup_steps) as f64;
        Ok(floor + (1.0 - floor) * 0.5 * (1.0 + (PI * progress).cos()))
    }

    /// Learning rate at step `t`.
    pub fn lr(&self, t: u64) -> Result<f64> {
        Ok(self.max_lr * self.multiplier(t)?)
    }
}
