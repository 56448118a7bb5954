//! Penalties, the auxiliary-variable formulation and decay factors.
//!
//! The bridge penalty `(λ/p) Σ|w_i|^p` is the lower envelope over `s > 0` of the
//! extended penalty `(λ/2) Σ [s_i w_i² + K(s_i)]` with
//! `K(s) = ((2-p)/p) s^(p/(p-2))`, attained at `s_i = |w_i|^(p-2)`.
//! Minimizing the extended objective in `w` at fixed `s` is a weighted L2
//! problem whose proximal map gives the pWD factor.

use crate::error::{check_len, Error, Result};
use crate::params::ElasticTerm;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub p: f64,
    pub lambda_p: f64,
}

impl PenaltySpec {
    pub fn new(p: f64, lambda_p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 2.0) {
            return Err(Error::Domain(format!("p = {p} outside (0, 2]")));
        }
        if !(lambda_p >= 0.0 && lambda_p.is_finite()) {
            return Err(Error::Domain(format!("lambda_p = {lambda_p} must be >= 0")));
        }
        Ok(Self { p, lambda_p })
    }

    fn require_extended(&self) -> Result<()> {
        if self.p < 2.0 {
            Ok(())
        } else {
            Err(Error::Domain(
                "the extended formulation needs p < 2".to_string(),
            ))
        }
    }
}

/// One auxiliary variable. `Divergent` stands for `s = +∞`, the optimal value at
/// an exactly-zero weight when `p < 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AuxEntry {
    Finite(f64),
    Divergent,
}

impl AuxEntry {
    pub fn is_divergent(&self) -> bool {
        matches!(self, AuxEntry::Divergent)
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            AuxEntry::Finite(s) => Some(s),
            AuxEntry::Divergent => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxVector(pub Vec<AuxEntry>);

impl AuxVector {
    pub fn from_finite(values: &[f64]) -> Result<Self> {
        values
            .iter()
            .map(|&s| {
                if s > 0.0 && s.is_finite() {
                    Ok(AuxEntry::Finite(s))
                } else {
                    Err(Error::Domain(format!("auxiliary s = {s} must be finite and > 0")))
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `(λ_p/p) Σ |w_i|^p`.
pub fn pnorm_penalty(w: &[f64], spec: PenaltySpec) -> f64 {
    if spec.lambda_p == 0.0 {
        return 0.0;
    }
    let sum: f64 = w.iter().map(|x| x.abs().powf(spec.p)).sum();
    spec.lambda_p / spec.p * sum
}

/// `K(s) = ((2-p)/p) s^(p/(p-2))` for `s > 0`, `0 < p < 2`.
pub fn aux_k(s: f64, p: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("K(s) needs s > 0, got {s}")));
    }
    if !(p > 0.0 && p < 2.0) {
        return Err(Error::Domain(format!("K(s) needs 0 < p < 2, got {p}")));
    }
    Ok(aux_k_unchecked(s, p))
}

#[inline]
pub(crate) fn aux_k_unchecked(s: f64, p: f64) -> f64 {
    (2.0 - p) / p * s.powf(p / (p - 2.0))
}

/// `(λ_p/2) Σ [s_i w_i² + K(s_i)]`. A divergent `s_i` contributes its limit `0`
/// when `w_i = 0` and makes the penalty infinite otherwise.
pub fn extended_penalty(w: &[f64], s: &AuxVector, spec: PenaltySpec) -> Result<f64> {
    check_len(w.len(), s.len())?;
    spec.require_extended()?;
    let mut sum = 0.0;
    for (i, (&wi, si)) in w.iter().zip(&s.0).enumerate() {
        match *si {
            AuxEntry::Finite(si) => {
                if !(si > 0.0) {
                    return Err(Error::Domain(format!("s[{i}] = {si} must be > 0")));
                }
                sum += si * wi * wi + aux_k_unchecked(si, spec.p);
            }
            AuxEntry::Divergent if wi == 0.0 => {}
            AuxEntry::Divergent => {
                return Err(Error::Evaluation(format!(
                    "divergent s[{i}] paired with nonzero weight {wi}"
                )))
            }
        }
    }
    Ok(spec.lambda_p / 2.0 * sum)
}

/// `s_i = |w_i|^(p-2)`, with zero weights mapped to [`AuxEntry::Divergent`].
pub fn optimal_s(w: &[f64], p: f64) -> Result<AuxVector> {
    if !(p > 0.0 && p < 2.0) {
        return Err(Error::Domain(format!("optimal s needs 0 < p < 2, got {p}")));
    }
    Ok(AuxVector(
        w.iter()
            .map(|&x| {
                if x == 0.0 {
                    AuxEntry::Divergent
                } else {
                    let s = x.abs().powf(p - 2.0);
                    if s.is_finite() {
                        AuxEntry::Finite(s)
                    } else {
                        AuxEntry::Divergent
                    }
                }
            })
            .collect(),
    ))
}

/// Proximal map of `(k/2)|·|²`: `w / (1 + k)`.
pub fn prox_l2(w: f64, k: f64) -> f64 {
    w / (1.0 + k)
}

/// Soft thresholding, the proximal map of `t|·|`.
pub fn prox_l1(w: f64, t: f64) -> f64 {
    let m = w.abs() - t;
    if m > 0.0 {
        m.copysign(w)
    } else {
        0.0
    }
}

/// pWD shrink factor `|w|^(2-p) / (|w|^(2-p) + k)` with `k = η α λ_p`.
///
/// `k = 0` gives exactly 1. For `p < 2` a zero weight gives exactly 0; for
/// `p = 2` the factor is `1/(1+k)` for every weight.
#[inline]
pub fn pwd_decay_factor(w_prev: f64, p: f64, k: f64) -> f64 {
    if k == 0.0 {
        return 1.0;
    }
    // powf(0, 0) == 1, so p = 2 needs no special case.
    let x = w_prev.abs().powf(2.0 - p);
    x / (x + k)
}

/// Decay factor `1 / (1 + ηα Σ_k λ_k |w|^(p_k - 2))` for a sum of bridge terms.
///
/// Evaluated as `x_r / (x_r + ηα Σ_k λ_k x_r/x_k)` with `x_k = |w|^(2-p_k)` and
/// `x_r` the smallest of them, so every ratio is at most 1. A single term
/// reproduces [`pwd_decay_factor`] bit for bit.
pub fn elastic_decay_factor(w_prev: f64, terms: &[ElasticTerm], eta_alpha: f64) -> f64 {
    if eta_alpha == 0.0 {
        return 1.0;
    }
    let a = w_prev.abs();
    let mut x_ref = f64::INFINITY;
    let mut any = false;
    for t in terms.iter().filter(|t| t.lambda > 0.0) {
        any = true;
        x_ref = x_ref.min(a.powf(2.0 - t.p));
    }
    if !any {
        return 1.0;
    }
    if x_ref == 0.0 {
        return 0.0;
    }
    let mut weighted = 0.0;
    for t in terms.iter().filter(|t| t.lambda > 0.0) {
        let x = a.powf(2.0 - t.p);
        weighted += eta_alpha * t.lambda * (x_ref / x);
    }
    x_ref / (x_ref + weighted)
}
