//! Quick verification suites behind the `verify` subcommand.

use crate::error::Result;
use pwd_core::datagen::{gen_gaussian_blobs, gen_sparse_linear};
use pwd_core::models::{
    init_params, toy_loss_and_grad, Activation, DenseMatrix, DifferentiableLoss, InitScheme, LinRegLoss, MlpModel,
    MlpObjective, QuadraticLoss, ToyLoss,
};
use pwd_core::optimizers::{pwd_step, DecayState, PwdConfig};
use pwd_core::verification::{
    equivalence_oracle, grad_check_loss, monotonicity_certificate, stability_probe, stationary_point_oracle,
    GridSpec, OracleStatus,
};
use pwd_core::{ParamGroup, ParamVector, Rng};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn suite(name: &str, passed: bool, detail: String) -> SuiteResult {
    SuiteResult {
        name: name.to_string(),
        passed,
        detail,
    }
}

/// A random symmetric positive definite quadratic `½wᵀAw - bᵀw` of dimension
/// `d`, with `A = MᵀM/d + 0.05 I` for Gaussian `M`.
pub fn random_convex_quadratic(rng: &mut Rng, d: usize) -> Result<QuadraticLoss> {
    let m: Vec<f64> = (0..d * d).map(|_| rng.gaussian()).collect();
    let mut a = DenseMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let v = (0..d).map(|k| m[k * d + i] * m[k * d + j]).sum::<f64>() / d as f64
                + if i == j { 0.05 } else { 0.0 };
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    let b = (0..d).map(|_| rng.gaussian()).collect();
    Ok(QuadraticLoss::new(a, b)?)
}

fn monotonicity(quadratics: usize, steps: u64) -> Result<SuiteResult> {
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for seed in 0..quadratics as u64 {
        let mut rng = Rng::new(seed);
        let d = 1 + rng.below(10) as usize;
        let q = random_convex_quadratic(&mut rng, d)?;
        let w0: Vec<f64> = (0..d).map(|_| 2.0 * rng.gaussian()).collect();
        let alpha = 0.5 / q.lipschitz().unwrap_or(1.0);
        for p in [0.5, 1.0, 1.5] {
            let r = monotonicity_certificate(&q, &PwdConfig::new(p, 0.1), alpha, steps, &w0)?;
            failures += usize::from(!r.passed);
            worst = worst.min(r.min_margin());
        }
    }
    Ok(suite(
        "monotonicity",
        failures == 0,
        format!("{failures} failing runs; smallest slack {worst:e}"),
    ))
}

fn stability() -> Result<SuiteResult> {
    let eps = [1e-3, 1e-4, 1e-5, 1e-6];
    let mut ok = true;
    let mut worst: f64 = 1.0;
    for p in [0.5, 0.8, 1.2, 1.5] {
        let r = stability_probe(p, 1.0, 1.0, &eps, 1.0)?;
        for e in &r.entries {
            ok &= e.in_regime && (0.5..=2.0).contains(&e.agreement()) && e.contracts() == (p < 1.0);
            worst = if (e.agreement() - 1.0).abs() > (worst - 1.0).abs() { e.agreement() } else { worst };
        }
    }
    for (dw, stable) in [(0.5, true), (2.0, false)] {
        let r = stability_probe(1.0, 1.0, dw, &eps, 1.0)?;
        ok &= r.entries.iter().all(|e| e.contracts() == stable);
    }
    Ok(suite("stability", ok, format!("worst measured/predicted {worst}")))
}

fn equivalence() -> Result<SuiteResult> {
    let toy = |w: f64| toy_loss_and_grad(w).0;
    let mut details = Vec::new();
    let mut ok = true;
    for (p, lambda) in [(1.0, 0.3), (1.0, 1.5), (1.5, 0.2)] {
        let r = equivalence_oracle(p, lambda, &toy, &GridSpec::default(), 0.05)?;
        ok &= r.status == OracleStatus::Pass;
        details.push(format!("p={p} λ={lambda}: w*={} gap={:e}", r.argmin_w, r.gap));
    }
    Ok(suite("equivalence", ok, details.join("; ")))
}

fn gradients() -> Result<SuiteResult> {
    let mut rng = Rng::new(1);
    let q = random_convex_quadratic(&mut rng, 5)?;
    let lin = {
        let s = gen_sparse_linear(30, 6, 2, 0.1, 2)?;
        LinRegLoss::new(s.x, s.y)?
    };
    let mlp = {
        let s = gen_gaussian_blobs(16, 2, 2.0, 1.0, 3)?;
        let model = MlpModel::new(vec![2, 8, 2], Activation::Tanh)?;
        let template = init_params(&model, &mut rng, InitScheme::LecunNormal);
        MlpObjective {
            model,
            template,
            batch: s.x,
            labels: s.labels,
        }
    };
    let losses: [(&str, &dyn DifferentiableLoss); 4] = [("toy", &ToyLoss), ("quadratic", &q), ("linreg", &lin), ("mlp", &mlp)];
    let mut worst = 0.0f64;
    for (_, l) in losses {
        for _ in 0..10 {
            let w: Vec<f64> = (0..l.dim()).map(|_| rng.gaussian()).collect();
            worst = worst.max(grad_check_loss(l, &w, 1e-6)?);
        }
    }
    Ok(suite("gradients", worst < 1e-5, format!("max relative error {worst:e}")))
}

fn zero_freezing(steps: u64) -> Result<SuiteResult> {
    let mut ok = true;
    for p in [0.5, 1.0, 1.5] {
        let cfg = PwdConfig::new(p, 0.1);
        let mut g = ParamGroup::new("w", vec![4, 4], ParamVector::zeros(16)).with_decay(p, 0.1);
        let mut st = DecayState::new();
        let zero = ParamVector::zeros(16);
        for t in 1..=steps {
            pwd_step(&mut g, &zero, 0.01, 1.0, &cfg, t, &mut st)?;
        }
        ok &= g.params.iter().all(|w| w.to_bits() == 0);
    }
    Ok(suite("zero_freezing", ok, format!("{steps} steps, p in {{0.5, 1, 1.5}}")))
}

fn stationarity() -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for (p, lambda) in [(1.0, 0.3), (1.5, 0.5), (2.0, 1.0)] {
        let target = stationary_point_oracle(&toy_loss_and_grad, p, lambda)?.w_star;
        let cfg = PwdConfig::new(p, lambda);
        let mut g = ParamGroup::new("w", vec![1, 1], ParamVector::new(vec![2.0])).with_decay(p, lambda);
        let mut st = DecayState::new();
        for t in 1..=20_000 {
            let grad = toy_loss_and_grad(g.params[0]).1;
            pwd_step(&mut g, &ParamVector::new(vec![grad]), 0.5, 1.0, &cfg, t, &mut st)?;
        }
        worst = worst.max((g.params[0] - target).abs());
    }
    Ok(suite("stationarity", worst < 1e-6, format!("max distance to oracle {worst:e}")))
}

/// Runs every suite with desk-friendly sizes.
pub fn run_all() -> Result<Vec<SuiteResult>> {
    Ok(vec![
        monotonicity(5, 1000)?,
        stability()?,
        equivalence()?,
        gradients()?,
        zero_freezing(1000)?,
        stationarity()?,
    ])
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_suites_pass() {
        for s in super::run_all().unwrap() {
            assert!(s.passed, "{}: {}", s.name, s.detail);
        }
    }
}
