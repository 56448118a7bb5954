//! Desk-scale differentiable losses with exact analytic gradients.
//!
//! Every loss here returns only its unregularized part; decay enters through the
//! optimizer.

mod dense;
mod linear;
mod mlp;
mod quadratic;
mod toy;

pub use dense::{power_iteration, DenseMatrix};
pub use linear::{LinRegLoss, LogRegLoss};
pub use mlp::{init_params, Activation, InitScheme, MlpCache, MlpModel, MlpObjective};
pub use quadratic::QuadraticLoss;
pub use toy::{toy_loss_and_grad, ToyLoss};

use crate::error::Result;
use crate::params::ParamVector;

/// A smooth loss over a flat parameter vector.
pub trait DifferentiableLoss {
    fn dim(&self) -> usize;

    fn loss_and_grad(&self, w: &[f64]) -> Result<(f64, ParamVector)>;

    /// Lipschitz constant of the gradient, when known.
    fn lipschitz(&self) -> Option<f64> {
        None
    }

    fn loss(&self, w: &[f64]) -> Result<f64> {
        Ok(self.loss_and_grad(w)?.0)
    }
}
