//! Explicit updates that put the bridge penalty gradient into the step. They
//! are unstable near `w = 0` for `p < 2` and exist as comparison baselines; they
//! return non-finite values instead of failing.

/// `w - α (∂L/∂w + λ |w|^(p-2) w)`.
///
/// At `w = 0` with `p < 2` the penalty gradient is undefined and the result is
/// NaN.
pub fn naive_subgradient_step(w: f64, alpha: f64, lambda_p: f64, p: f64, grad_loss: f64) -> f64 {
    w - alpha * (grad_loss + lambda_p * w.abs().powf(p - 2.0) * w)
}

/// `(w - ηα δw)(1 - ηα λ |w|^(p-2))`: decoupled decay with the `s = |w|^(p-2)`
/// weighting. The multiplier turns negative once `ηαλ|w|^(p-2) > 1`.
pub fn decoupled_multiplicative_step(
    w: f64,
    delta: f64,
    alpha: f64,
    eta: f64,
    lambda_p: f64,
    p: f64,
) -> f64 {
    let lr = eta * alpha;
    (w - lr * delta) * (1.0 - lr * lambda_p * w.abs().powf(p - 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::toy_loss_and_grad;

    #[test]
    fn toy_step_arithmetic() {
        let (_, g) = toy_loss_and_grad(1.0);
        let w = naive_subgradient_step(1.0, 0.1, 1.0, 0.6, g);
        assert!((w - 0.9).abs() < 1e-15);
    }

    #[test]
    fn p2_no_penalty_is_gradient_step() {
        assert_eq!(naive_subgradient_step(3.0, 0.5, 0.0, 2.0, 2.0), 2.0);
    }

    #[test]
    fn naive_blows_up_at_zero() {
        assert!(!naive_subgradient_step(0.0, 0.1, 1.0, 0.6, -1.0).is_finite());
    }

    #[test]
    fn naive_toy_oscillates() {
        let mut w = 2.0f64;
        let mut flips = 0;
        for _ in 0..500 {
            let (_, g) = toy_loss_and_grad(w);
            let next = naive_subgradient_step(w, 0.1, 1.0, 0.6, g);
            if next.signum() != w.signum() {
                flips += 1;
            }
            w = next;
        }
        assert!(flips >= 1);
    }

    #[test]
    fn decoupled_sign_flip_when_multiplier_is_minus_one() {
        // ηαλ|w|^(p-2) = 2 at p = 1, ηαλ = 0.2, w = 0.1.
        let out = decoupled_multiplicative_step(0.1, 0.0, 0.2, 1.0, 1.0, 1.0);
        assert!((out + 0.1).abs() < 1e-15);
    }

    #[test]
    fn decoupled_p2_is_adamw_factor() {
        let out = decoupled_multiplicative_step(2.0, 0.5, 0.1, 0.5, 0.3, 2.0);
        let lr = 0.05;
        assert_eq!(out, (2.0 - lr * 0.5) * (1.0 - lr * 0.3));
    }
}
