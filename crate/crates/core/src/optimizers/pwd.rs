use super::adam::{adam_delta, sgd_delta, AdamState};
use super::schedule::Schedule;
use crate::error::{check_len, Error, Result};
use crate::params::{ElasticTerm, ParamGroup, ParamVector};
use crate::regularizers::{elastic_decay_factor, pwd_decay_factor};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PScheduleProfile {
    Cosine,
    Linear,
}

/// Anneals `p` from 2 down to `p_end` over `decay_steps`, optionally restarting
/// at 2 every `restart_period` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PSchedule {
    pub p_end: f64,
    pub decay_steps: u64,
    pub profile: PScheduleProfile,
    pub restart_period: Option<u64>,
}

impl PSchedule {
    pub const P_START: f64 = 2.0;

    pub fn validate(&self) -> Result<()> {
        if !(self.p_end > 0.0 && self.p_end <= 2.0) {
            return Err(Error::Config(format!("p_end = {} outside (0, 2]", self.p_end)));
        }
        if self.decay_steps == 0 {
            return Err(Error::Config("p schedule decay_steps must be >= 1".into()));
        }
        if let Some(r) = self.restart_period {
            if r < self.decay_steps {
                return Err(Error::Config(format!(
                    "restart_period {r} shorter than decay_steps {}",
                    self.decay_steps
                )));
            }
        }
        Ok(())
    }

    /// `p` after `t` completed steps.
    pub fn value(&self, t: u64) -> f64 {
        let phase = match self.restart_period {
            Some(r) if r > 0 => t % r,
            _ => t,
        };
        let progress = (phase as f64 / self.decay_steps as f64).min(1.0);
        let weight = match self.profile {
            PScheduleProfile::Cosine => 0.5 * (1.0 + (PI * progress).cos()),
            PScheduleProfile::Linear => 1.0 - progress,
        };
        if progress >= 1.0 {
            return self.p_end;
        }
        self.p_end + (Self::P_START - self.p_end) * weight
    }
}

/// Decay configuration shared by all groups of an optimizer.
///
/// `p`, `lambda_p` and `elastic_terms` seed the groups (see
/// [`crate::params::apply_decay`]); at step time the group's own settings are
/// authoritative, except that an active `p_schedule` replaces the group's `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PwdConfig {
    pub p: f64,
    pub lambda_p: f64,
    /// Refresh the `s = |w|^(p-2)` anchor every `s_cadence` steps. `1` refreshes
    /// before every step.
    pub s_cadence: u64,
    pub p_schedule: Option<PSchedule>,
    #[serde(default)]
    pub elastic_terms: Vec<ElasticTerm>,
}

impl Default for PwdConfig {
    fn default() -> Self {
        Self {
            p: 1.0,
            lambda_p: 1e-2,
            s_cadence: 1,
            p_schedule: None,
            elastic_terms: Vec::new(),
        }
    }
}

impl PwdConfig {
    pub fn new(p: f64, lambda_p: f64) -> Self {
        Self {
            p,
            lambda_p,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 2.0) {
            return Err(Error::Config(format!("p = {} outside (0, 2]", self.p)));
        }
        if !(self.lambda_p >= 0.0 && self.lambda_p.is_finite()) {
            return Err(Error::Config(format!("lambda_p = {} must be >= 0", self.lambda_p)));
        }
        if self.s_cadence == 0 {
            return Err(Error::Config("s_cadence must be >= 1".into()));
        }
        if let Some(ps) = &self.p_schedule {
            ps.validate()?;
        }
        self.elastic_terms.iter().try_for_each(ElasticTerm::validate)
    }
}

/// `p` in force after `t` completed steps. Fails when no schedule is configured.
pub fn p_schedule_value(cfg: &PwdConfig, t: u64) -> Result<f64> {
    cfg.p_schedule
        .as_ref()
        .map(|s| s.value(t))
        .ok_or_else(|| Error::Config("no p schedule configured".into()))
}

/// Per-group state of the decay step: the weight magnitudes captured at the last
/// anchor refresh when `s_cadence > 1`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DecayState {
    anchor: Option<Vec<f64>>,
}

impl DecayState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn anchor(&self) -> Option<&[f64]> {
        self.anchor.as_deref()
    }
}

/// What a decay step did, for inspection in tests and logs.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDiag {
    pub group: String,
    /// `η_t α`.
    pub effective_lr: f64,
    /// `p` used by the single-term factor (after any schedule).
    pub p: f64,
    /// Applied multiplicative factors, one per entry; all ones when no decay applies.
    pub factors: Vec<f64>,
}

/// One fused base-update + pWD step on a group.
///
/// Computes `w̃ = w_{t-1} - η α δw` and `w_t = f(w_{t-1}) w̃` entry by entry in
/// a single pass. The factor `f` is [`pwd_decay_factor`], or
/// [`elastic_decay_factor`] when the group carries elastic terms, always taken
/// at the pre-update weight (or at the anchored weight when `s_cadence > 1`).
/// `step_index` is 1-based.
pub fn pwd_step(
    group: &mut ParamGroup,
    delta: &ParamVector,
    alpha: f64,
    eta: f64,
    cfg: &PwdConfig,
    step_index: u64,
    state: &mut DecayState,
) -> Result<StepDiag> {
    check_len(group.len(), delta.len())?;
    let lr = eta * alpha;
    let p = match &cfg.p_schedule {
        Some(s) => s.value(step_index.saturating_sub(1)),
        None => group.p,
    };
    let elastic = !group.elastic_terms.is_empty();
    let decays = group.decay_eligible && (elastic || group.lambda_p > 0.0);

    let mut factors = Vec::with_capacity(group.len());
    if !decays {
        for (w, &d) in group.params.iter_mut().zip(delta.iter()) {
            *w -= lr * d;
            factors.push(1.0);
        }
    } else {
        if cfg.s_cadence > 1 && (step_index.saturating_sub(1)) % cfg.s_cadence == 0 {
            state.anchor = Some(group.params.iter().map(|w| w.abs()).collect());
        }
        let anchor = if cfg.s_cadence > 1 {
            state.anchor.as_deref()
        } else {
            None
        };
        let k = eta * alpha * group.lambda_p;
        for (i, (w, &d)) in group.params.iter_mut().zip(delta.iter()).enumerate() {
            let w_prev = *w;
            let a = anchor.map_or(w_prev, |a| a[i]);
            let f = if elastic {
                elastic_decay_factor(a, &group.elastic_terms, lr)
            } else {
                pwd_decay_factor(a, p, k)
            };
            *w = f * (w_prev - lr * d);
            factors.push(f);
        }
    }

    if let Some(index) = group.params.first_nonfinite() {
        return Err(Error::Step {
            group: group.name.clone(),
            index,
            step: step_index,
        });
    }
    Ok(StepDiag {
        group: group.name.clone(),
        effective_lr: lr,
        p,
        factors,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseOptimizer {
    Sgd,
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl BaseOptimizer {
    pub fn adam() -> Self {
        BaseOptimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// A base optimizer (SGD or Adam) followed by the pWD step on every group.
#[derive(Debug, Clone)]
pub struct PwdOptimizer {
    base: BaseOptimizer,
    alpha: f64,
    schedule: Option<Schedule>,
    cfg: PwdConfig,
    adam: Vec<AdamState>,
    decay: Vec<DecayState>,
    t: u64,
}

impl PwdOptimizer {
    /// `alpha` is the base learning rate; with a schedule it should equal
    /// `schedule.max_lr` and the schedule multiplier scales it.
    pub fn new(
        base: BaseOptimizer,
        alpha: f64,
        schedule: Option<Schedule>,
        cfg: PwdConfig,
        groups: &[ParamGroup],
    ) -> Result<Self> {
        cfg.validate()?;
        for g in groups {
            g.validate()?;
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Config(format!("learning rate {alpha} must be > 0")));
        }
        let adam = match &base {
            BaseOptimizer::Sgd => Vec::new(),
            BaseOptimizer::Adam { beta1, beta2, eps } => groups
                .iter()
                .map(|g| AdamState::with_hyper(g.len(), *beta1, *beta2, *eps))
                .collect(),
        };
        Ok(Self {
            base,
            alpha,
            schedule,
            cfg,
            adam,
            decay: vec![DecayState::new(); groups.len()],
            t: 0,
        })
    }

    pub fn steps_taken(&self) -> u64 {
        self.t
    }

    pub fn config(&self) -> &PwdConfig {
        &self.cfg
    }

    /// `η` for the next step.
    pub fn next_eta(&self) -> Result<f64> {
        match &self.schedule {
            Some(s) => s.multiplier(self.t + 1),
            None => Ok(1.0),
        }
    }

    /// Applies one step given gradients at the current weights. Returns `η_t`.
    pub fn step(&mut self, groups: &mut [ParamGroup], grads: &[ParamVector]) -> Result<f64> {
        self.step_inner(groups, grads, None)
    }

    /// Like [`PwdOptimizer::step`] but also returns per-group diagnostics.
    pub fn step_with_diag(
        &mut self,
        groups: &mut [ParamGroup],
        grads: &[ParamVector],
    ) -> Result<(f64, Vec<StepDiag>)> {
        let mut diags = Vec::with_capacity(groups.len());
        let eta = self.step_inner(groups, grads, Some(&mut diags))?;
        Ok((eta, diags))
    }

    fn step_inner(
        &mut self,
        groups: &mut [ParamGroup],
        grads: &[ParamVector],
        mut diags: Option<&mut Vec<StepDiag>>,
    ) -> Result<f64> {
        check_len(self.decay.len(), groups.len())?;
        check_len(groups.len(), grads.len())?;
        let eta = self.next_eta()?;
        self.t += 1;
        for (i, (g, grad)) in groups.iter_mut().zip(grads).enumerate() {
            let delta = match self.base {
                BaseOptimizer::Sgd => sgd_delta(grad),
                BaseOptimizer::Adam { .. } => adam_delta(&mut self.adam[i], grad),
            };
            let d = pwd_step(g, &delta, self.alpha, eta, &self.cfg, self.t, &mut self.decay[i])?;
            if let Some(out) = diags.as_deref_mut() {
                out.push(d);
            }
        }
        Ok(eta)
    }
}
