use super::dense::{dot, power_iteration, DenseMatrix};
use super::DifferentiableLoss;
use crate::error::{check_len, Error, Result};
use crate::params::ParamVector;

/// Least squares `‖Xw - y‖² / (2n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinRegLoss {
    x: DenseMatrix,
    y: Vec<f64>,
}

impl LinRegLoss {
    pub fn new(x: DenseMatrix, y: Vec<f64>) -> Result<Self> {
        check_len(x.rows(), y.len())?;
        if x.rows() == 0 {
            return Err(Error::Config("regression needs at least one sample".into()));
        }
        Ok(Self { x, y })
    }

    pub fn design(&self) -> &DenseMatrix {
        &self.x
    }

    pub fn targets(&self) -> &[f64] {
        &self.y
    }

    pub fn predict(&self, w: &[f64]) -> Vec<f64> {
        self.x.matvec(w)
    }

    /// Mean squared error `‖Xw - y‖² / n` (no factor ½).
    pub fn mse(&self, w: &[f64]) -> f64 {
        let r = self.x.matvec(w);
        r.iter().zip(&self.y).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / self.y.len() as f64
    }
}

impl DifferentiableLoss for LinRegLoss {
    fn dim(&self) -> usize {
        self.x.cols()
    }

    fn loss_and_grad(&self, w: &[f64]) -> Result<(f64, ParamVector)> {
        check_len(self.dim(), w.len())?;
        let n = self.y.len() as f64;
        let mut r = self.x.matvec(w);
        r.iter_mut().zip(&self.y).for_each(|(a, b)| *a -= b);
        let loss = dot(&r, &r) / (2.0 * n);
        let mut g = self.x.t_matvec(&r);
        g.iter_mut().for_each(|v| *v /= n);
        Ok((loss, ParamVector::new(g)))
    }

    /// `λ_max(XᵀX) / n`.
    fn lipschitz(&self) -> Option<f64> {
        let n = self.y.len() as f64;
        Some(power_iteration(self.dim(), |v| self.x.t_matvec(&self.x.matvec(v))) / n)
    }
}

/// Mean binary cross-entropy of a logistic model, labels in `{0, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRegLoss {
    x: DenseMatrix,
    labels: Vec<f64>,
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LogRegLoss {
    pub fn new(x: DenseMatrix, labels: &[u8]) -> Result<Self> {
        check_len(x.rows(), labels.len())?;
        if x.rows() == 0 {
            return Err(Error::Config("logistic regression needs at least one sample".into()));
        }
        if let Some(bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::Config(format!("label {bad} not in {{0, 1}}")));
        }
        Ok(Self {
            x,
            labels: labels.iter().map(|&l| l as f64).collect(),
        })
    }

    pub fn design(&self) -> &DenseMatrix {
        &self.x
    }

    /// Fraction of samples classified correctly at threshold 0.5.
    pub fn accuracy(&self, w: &[f64]) -> f64 {
        let z = self.x.matvec(w);
        let hits = z
            .iter()
            .zip(&self.labels)
            .filter(|(z, y)| (**z > 0.0) == (**y > 0.5))
            .count();
        hits as f64 / self.labels.len() as f64
    }
}

impl DifferentiableLoss for LogRegLoss {
    fn dim(&self) -> usize {
        self.x.cols()
    }

    fn loss_and_grad(&self, w: &[f64]) -> Result<(f64, ParamVector)> {
        check_len(self.dim(), w.len())?;
        let n = self.labels.len() as f64;
        let z = self.x.matvec(w);
        let mut loss = 0.0;
        let mut r = Vec::with_capacity(z.len());
        for (&zi, &yi) in z.iter().zip(&self.labels) {
            loss += softplus(zi) - yi * zi;
            r.push(sigmoid(zi) - yi);
        }
        let mut g = self.x.t_matvec(&r);
        g.iter_mut().for_each(|v| *v /= n);
        Ok((loss / n, ParamVector::new(g)))
    }

    /// `λ_max(XᵀX) / (4n)`.
    fn lipschitz(&self) -> Option<f64> {
        let n = self.labels.len() as f64;
        Some(power_iteration(self.dim(), |v| self.x.t_matvec(&self.x.matvec(v))) / (4.0 * n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_design_linreg() {
        let m = LinRegLoss::new(DenseMatrix::zeros(2, 3), vec![3.0, 4.0]).unwrap();
        let (l, g) = m.loss_and_grad(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(l, 25.0 / 4.0);
        assert_eq!(g.as_slice(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn logreg_at_zero_is_ln2() {
        let x = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![-1.0, 0.5], vec![0.3, 0.3]]).unwrap();
        let m = LogRegLoss::new(x, &[1, 0, 1]).unwrap();
        let (l, _) = m.loss_and_grad(&[0.0, 0.0]).unwrap();
        assert!((l - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn logreg_rejects_bad_labels() {
        let x = DenseMatrix::zeros(1, 1);
        assert!(LogRegLoss::new(x, &[2]).is_err());
    }

    #[test]
    fn logreg_separable_scaled_up() {
        let x = DenseMatrix::from_rows(&[
            vec![1.0, 0.2],
            vec![2.0, -0.3],
            vec![-1.0, 0.1],
            vec![-0.5, -0.4],
        ])
        .unwrap();
        let m = LogRegLoss::new(x, &[1, 1, 0, 0]).unwrap();
        let (l, _) = m.loss_and_grad(&[20.0, 0.0]).unwrap();
        assert!(l < 1e-3, "{l}");
        assert_eq!(m.accuracy(&[20.0, 0.0]), 1.0);
    }

    #[test]
    fn stable_for_extreme_logits() {
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
        assert!((softplus(1000.0) - 1000.0).abs() < 1e-12);
        assert!(softplus(-1000.0) >= 0.0);
    }
}
