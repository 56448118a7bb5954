use crate::params::ParamVector;
use serde::{Deserialize, Serialize};

/// Plain gradient descent: the update is the gradient itself.
pub fn sgd_delta(g: &ParamVector) -> ParamVector {
    g.clone()
}

/// Adam moment estimates for one parameter group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: ParamVector,
    pub v: ParamVector,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    /// Defaults `β₁ = 0.9`, `β₂ = 0.999`, `ε = 1e-8`.
    pub fn new(len: usize) -> Self {
        Self::with_hyper(len, 0.9, 0.999, 1e-8)
    }

    pub fn with_hyper(len: usize, beta1: f64, beta2: f64, eps: f64) -> Self {
        Self {
            m: ParamVector::zeros(len),
            v: ParamVector::zeros(len),
            t: 0,
            beta1,
            beta2,
            eps,
        }
    }
}

/// One Adam step: updates the moments and returns the bias-corrected direction
/// `m̂ / (√v̂ + ε)`. The learning rate is applied by the caller.
pub fn adam_delta(state: &mut AdamState, g: &ParamVector) -> ParamVector {
    assert_eq!(state.m.len(), g.len(), "adam state and gradient lengths differ");
    state.t += 1;
    let t = state.t as i32;
    let (b1, b2) = (state.beta1, state.beta2);
    let c1 = 1.0 - b1.powi(t);
    let c2 = 1.0 - b2.powi(t);
    let mut out = Vec::with_capacity(g.len());
    for ((m, v), &gi) in state.m.iter_mut().zip(state.v.iter_mut()).zip(g.iter()) {
        *m = b1 * *m + (1.0 - b1) * gi;
        *v = b2 * *v + (1.0 - b2) * gi * gi;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        out.push(m_hat / (v_hat.sqrt() + state.eps));
    }
    ParamVector::new(out)
}
