use crate::error::Result;
use crate::models::DifferentiableLoss;
use crate::params::ParamVector;

/// Largest per-coordinate discrepancy between the analytic gradient and central
/// differences `(f(w + h e_i) - f(w - h e_i)) / 2h`, each scaled by
/// `max(1, |analytic_i|)`.
pub fn grad_check<F>(f: F, w: &[f64], h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<(f64, ParamVector)>,
{
    let (_, analytic) = f(w)?;
    let mut probe = w.to_vec();
    let mut worst = 0.0f64;
    for i in 0..w.len() {
        probe[i] = w[i] + h;
        let (fp, _) = f(&probe)?;
        probe[i] = w[i] - h;
        let (fm, _) = f(&probe)?;
        probe[i] = w[i];
        let numeric = (fp - fm) / (2.0 * h);
        let err = (numeric - analytic[i]).abs() / analytic[i].abs().max(1.0);
        worst = worst.max(err);
    }
    Ok(worst)
}

/// [`grad_check`] for a [`DifferentiableLoss`].
pub fn grad_check_loss(loss: &dyn DifferentiableLoss, w: &[f64], h: f64) -> Result<f64> {
    grad_check(|v| loss.loss_and_grad(v), w, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{DenseMatrix, QuadraticLoss, ToyLoss};

    #[test]
    fn quadratic_is_exact() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let q = QuadraticLoss::new(a, vec![0.3, -0.7]).unwrap();
        assert!(grad_check_loss(&q, &[0.4, -1.3], 1e-6).unwrap() < 1e-9);
    }

    #[test]
    fn toy_at_half() {
        let (_, g) = ToyLoss.loss_and_grad(&[0.5]).unwrap();
        assert_eq!(g[0], -0.5);
        assert!(grad_check_loss(&ToyLoss, &[0.5], 1e-6).unwrap() < 1e-8);
    }

    #[test]
    fn detects_wrong_gradient() {
        let bad = |w: &[f64]| Ok((w[0] * w[0], ParamVector::new(vec![w[0]])));
        assert!(grad_check(bad, &[3.0], 1e-6).unwrap() > 0.1);
    }
}
