//! Cross-module invariants: zero-freezing, convergence to the regularized
//! stationary point, and stability of the zero fixed point.

use proptest::prelude::*;
use pwd_core::models::toy_loss_and_grad;
use pwd_core::optimizers::{pwd_step, DecayState, PwdConfig};
use pwd_core::verification::{stability_probe, stationary_point_oracle};
use pwd_core::{ParamGroup, ParamVector};

fn toy_run(p: f64, lambda: f64, alpha: f64, steps: u64) -> f64 {
    let cfg = PwdConfig::new(p, lambda);
    let mut g = ParamGroup::new("w", vec![1, 1], ParamVector::new(vec![2.0])).with_decay(p, lambda);
    let mut st = DecayState::new();
    for t in 1..=steps {
        let grad = toy_loss_and_grad(g.params[0]).1;
        pwd_step(&mut g, &ParamVector::new(vec![grad]), alpha, 1.0, &cfg, t, &mut st).unwrap();
    }
    g.params[0]
}

#[test]
fn zero_entries_freeze_for_ten_thousand_steps() {
    for p in [0.5, 1.0, 1.5] {
        let cfg = PwdConfig::new(p, 0.1);
        let mut g = ParamGroup::new("w", vec![2, 2], ParamVector::zeros(4)).with_decay(p, 0.1);
        let mut st = DecayState::new();
        let zero = ParamVector::zeros(4);
        for t in 1..=10_000 {
            pwd_step(&mut g, &zero, 0.01, 1.0, &cfg, t, &mut st).unwrap();
        }
        assert!(g.params.iter().all(|w| w.to_bits() == 0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn toy_iteration_reaches_stationary_point(
        p in 1.0f64..=2.0,
        lambda in 0.05f64..0.8,
        alpha in 0.1f64..=1.0,
    ) {
        let target = stationary_point_oracle(&toy_loss_and_grad, p, lambda).unwrap().w_star;
        let w = toy_run(p, lambda, alpha, 100_000);
        prop_assert!((w - target).abs() < 1e-6, "w={w} target={target}");
    }

    #[test]
    fn stability_ratio_matches_prediction(
        p in prop::sample::select(vec![0.5, 0.8, 1.2, 1.5]),
        eps_exp in 3i32..=6,
    ) {
        let eps = 10f64.powi(-eps_exp);
        let r = stability_probe(p, 1.0, 1.0, &[eps], 1.0).unwrap();
        let e = r.entries[0];
        prop_assert!(e.in_regime);
        prop_assert!((0.5..=2.0).contains(&e.agreement()));
        prop_assert_eq!(e.contracts(), p < 1.0);
    }
}
