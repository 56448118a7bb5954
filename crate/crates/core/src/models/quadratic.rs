use super::dense::{dot, power_iteration, DenseMatrix};
use super::DifferentiableLoss;
use crate::error::{check_len, Error, Result};
use crate::params::ParamVector;

/// `½ wᵀA w - bᵀw` with symmetric positive semidefinite `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticLoss {
    a: DenseMatrix,
    b: Vec<f64>,
    lipschitz: f64,
}

impl QuadraticLoss {
    /// Fails when `A` is not square and symmetric or `b` has the wrong length.
    /// The Lipschitz constant is computed here by power iteration.
    pub fn new(a: DenseMatrix, b: Vec<f64>) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::Config(format!(
                "quadratic form must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if !a.is_symmetric(1e-12) {
            return Err(Error::Config("quadratic form must be symmetric".into()));
        }
        check_len(a.rows(), b.len())?;
        let lipschitz = power_iteration(a.rows(), |v| a.matvec(v));
        Ok(Self { a, b, lipschitz })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn linear_term(&self) -> &[f64] {
        &self.b
    }
}

impl DifferentiableLoss for QuadraticLoss {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn loss_and_grad(&self, w: &[f64]) -> Result<(f64, ParamVector)> {
        check_len(self.dim(), w.len())?;
        let aw = self.a.matvec(w);
        let loss = 0.5 * dot(w, &aw) - dot(&self.b, w);
        let grad = aw.iter().zip(&self.b).map(|(x, b)| x - b).collect();
        Ok((loss, ParamVector::new(grad)))
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(self.lipschitz)
    }
}
