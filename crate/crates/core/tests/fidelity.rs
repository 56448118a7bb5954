//! The fused optimizer step against a literal scalar transcription of the
//! update `w_t = |w|^(2-p) / (|w|^(2-p) + ηαλ) · (w - ηα δw)`.

use pwd_core::optimizers::{pwd_step, DecayState, PwdConfig};
use pwd_core::{ParamGroup, ParamVector, Rng};

fn ulp_distance(a: f64, b: f64) -> u64 {
    if a == b {
        return 0;
    }
    let key = |x: f64| {
        let bits = x.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    };
    key(a).abs_diff(key(b))
}

fn reference(w: f64, dw: f64, alpha: f64, eta: f64, lambda: f64, p: f64) -> f64 {
    let x = w.abs().powf(2.0 - p);
    let k = eta * alpha * lambda;
    let f = if k == 0.0 { 1.0 } else { x / (x + k) };
    f * (w - eta * alpha * dw)
}

#[test]
fn fused_step_within_one_ulp() {
    let mut rng = Rng::new(2024);
    let mut worst = 0;
    for _ in 0..10_000 {
        let w = rng.uniform_range(-3.0, 3.0);
        let dw = rng.uniform_range(-3.0, 3.0);
        let alpha = 10f64.powf(rng.uniform_range(-4.0, 0.0));
        let eta = rng.uniform_range(0.0, 1.0);
        let lambda = 10f64.powf(rng.uniform_range(-4.0, 1.0));
        // (0, 2]: 1 - u with u in [0, 1) lies in (0, 1].
        let p = 2.0 * (1.0 - rng.uniform());
        let mut g = ParamGroup::new("w", vec![1, 1], ParamVector::new(vec![w])).with_decay(p, lambda);
        pwd_step(
            &mut g,
            &ParamVector::new(vec![dw]),
            alpha,
            eta,
            &PwdConfig::new(p, lambda),
            1,
            &mut DecayState::new(),
        )
        .unwrap();
        worst = worst.max(ulp_distance(g.params[0], reference(w, dw, alpha, eta, lambda, p)));
    }
    assert!(worst <= 1, "worst ulp distance {worst}");
}
