use super::DifferentiableLoss;
use crate::error::{check_len, Result};
use crate::params::ParamVector;

/// `(w - 1)² / 2` and its derivative `w - 1`.
pub fn toy_loss_and_grad(w: f64) -> (f64, f64) {
    let r = w - 1.0;
    (0.5 * r * r, r)
}

/// The one-dimensional toy loss `(w - 1)²/2` as a [`DifferentiableLoss`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ToyLoss;

impl DifferentiableLoss for ToyLoss {
    fn dim(&self) -> usize {
        1
    }

    fn loss_and_grad(&self, w: &[f64]) -> Result<(f64, ParamVector)> {
        check_len(1, w.len())?;
        let (l, g) = toy_loss_and_grad(w[0]);
        Ok((l, ParamVector::new(vec![g])))
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }
}
