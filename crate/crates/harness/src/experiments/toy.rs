//! One-parameter toy problem `L(w) = (w - 1)²/2` with a bridge penalty.

use crate::config::{ExperimentConfig, ToyVariant};
use crate::error::Result;
use crate::records::RunRecord;
use pwd_core::models::toy_loss_and_grad;
use pwd_core::optimizers::{naive_subgradient_step, pwd_step, DecayState};
use pwd_core::verification::DEFAULT_TAU;
use pwd_core::{ParamGroup, ParamVector};
use serde::{Deserialize, Serialize};

/// Summary of a toy trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyVerdict {
    pub sign_changes: usize,
    pub min_abs: f64,
    /// First step with `|w| < 1e-8`.
    pub first_below_1e8: Option<u64>,
    /// `|w_t|` never increases for `t >= 1`.
    pub monotone_after_first: bool,
    pub oscillating: bool,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyOutcome {
    pub records: Vec<RunRecord>,
    /// `w_0, w_1, ..., w_T`.
    pub trajectory: Vec<f64>,
    /// Decay factor applied at each step (pWD variant only).
    pub factors: Vec<f64>,
    pub verdict: ToyVerdict,
}

fn verdict(traj: &[f64]) -> ToyVerdict {
    let sign_changes = traj
        .windows(2)
        .filter(|w| w[0] != 0.0 && w[1] != 0.0 && w[0].signum() != w[1].signum())
        .count();
    let min_abs = traj.iter().map(|w| w.abs()).fold(f64::INFINITY, f64::min);
    let first_below_1e8 = traj.iter().position(|w| w.abs() < 1e-8).map(|i| i as u64);
    let monotone_after_first = traj.iter().skip(1).collect::<Vec<_>>().windows(2).all(|w| w[1].abs() <= w[0].abs());
    ToyVerdict {
        sign_changes,
        min_abs,
        first_below_1e8,
        monotone_after_first,
        oscillating: sign_changes >= 10,
        converged: first_below_1e8.is_some() && sign_changes == 0,
    }
}

/// Runs `config.steps` iterations of the configured variant from `toy.w0` with
/// step size `toy.alpha` and `η = 1`.
pub fn run_toy(config: &ExperimentConfig) -> Result<ToyOutcome> {
    config.validate()?;
    let (p, lambda) = (config.pwd.p, config.pwd.lambda_p);
    let alpha = config.toy.alpha;
    let mut trajectory = Vec::with_capacity(config.steps as usize + 1);
    let mut factors = Vec::new();
    let mut records = Vec::new();
    trajectory.push(config.toy.w0);

    let mut group = ParamGroup::new("w", vec![1, 1], ParamVector::new(vec![config.toy.w0])).with_decay(p, lambda);
    let mut state = DecayState::new();
    for t in 1..=config.steps {
        let w_prev = group.params[0];
        let (_, g) = toy_loss_and_grad(w_prev);
        let w = match config.toy.variant {
            ToyVariant::Naive => naive_subgradient_step(w_prev, alpha, lambda, p, g),
            ToyVariant::Pwd => {
                let diag = pwd_step(&mut group, &ParamVector::new(vec![g]), alpha, 1.0, &config.pwd, t, &mut state)?;
                factors.push(diag.factors[0]);
                group.params[0]
            }
        };
        group.params[0] = w;
        trajectory.push(w);
        if t % config.log_every == 0 || t == config.steps {
            let loss = toy_loss_and_grad(w).0;
            records.push(RunRecord {
                step: t,
                eta: 1.0,
                loss,
                reg_loss: loss + lambda / p * w.abs().powf(p),
                sparsity: if w.abs() < DEFAULT_TAU { 1.0 } else { 0.0 },
                train_acc: None,
                val_acc: None,
                p: None,
            });
        }
    }
    let verdict = verdict(&trajectory);
    Ok(ToyOutcome {
        records,
        trajectory,
        factors,
        verdict,
    })
}
