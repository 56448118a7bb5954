use crate::error::{Error, Result};
use crate::optimizers::{pwd_step, DecayState, PwdConfig};
use crate::params::{ParamGroup, ParamVector};
use serde::{Deserialize, Serialize};

/// How much larger each side of a `≫` regime assumption must be.
pub const REGIME_RATIO: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityEntry {
    pub epsilon: f64,
    /// `|w_new / ε|` after one step from `w = ε`.
    pub measured: f64,
    /// `(|δw| / λ_p) |ε|^(1-p)`.
    pub predicted: f64,
    /// Both `α|δw| / |ε|` and `αλ_p|ε|^(p-2)` reach [`REGIME_RATIO`].
    pub in_regime: bool,
}

impl StabilityEntry {
    pub fn agreement(&self) -> f64 {
        self.measured / self.predicted
    }

    /// A ratio below one: the perturbation shrinks.
    pub fn contracts(&self) -> bool {
        self.measured < 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub p: f64,
    pub lambda_p: f64,
    pub delta_w: f64,
    pub alpha: f64,
    pub entries: Vec<StabilityEntry>,
}

impl StabilityReport {
    pub fn all_in_regime(&self) -> bool {
        self.entries.iter().all(|e| e.in_regime)
    }
}

/// Perturbs the zero fixed point to `w = ε`, applies one pWD step with the fixed
/// base update `δw` and learning rate `alpha` (`η = 1`), and compares the
/// resulting growth ratio against its small-`ε` prediction. Regime violations
/// are flagged per entry.
pub fn stability_probe(
    p: f64,
    lambda_p: f64,
    delta_w: f64,
    epsilons: &[f64],
    alpha: f64,
) -> Result<StabilityReport> {
    if !(lambda_p > 0.0) {
        return Err(Error::Config("stability probe needs lambda_p > 0".into()));
    }
    if !(alpha > 0.0) {
        return Err(Error::Config("stability probe needs alpha > 0".into()));
    }
    let cfg = PwdConfig::new(p, lambda_p);
    cfg.validate()?;
    let mut entries = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        if eps == 0.0 || !eps.is_finite() {
            return Err(Error::Config(format!("perturbation {eps} must be finite and nonzero")));
        }
        let mut g = ParamGroup::new("probe", vec![1, 1], ParamVector::new(vec![eps])).with_decay(p, lambda_p);
        pwd_step(&mut g, &ParamVector::new(vec![delta_w]), alpha, 1.0, &cfg, 1, &mut DecayState::new())?;
        let measured = (g.params[0] / eps).abs();
        let predicted = delta_w.abs() / lambda_p * eps.abs().powf(1.0 - p);
        let in_regime = alpha * delta_w.abs() >= REGIME_RATIO * eps.abs()
            && alpha * lambda_p * eps.abs().powf(p - 2.0) >= REGIME_RATIO;
        entries.push(StabilityEntry {
            epsilon: eps,
            measured,
            predicted,
            in_regime,
        });
    }
    Ok(StabilityReport {
        p,
        lambda_p,
        delta_w,
        alpha,
        entries,
    })
}
