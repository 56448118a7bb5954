//! Flat parameter vectors and decay groups.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::ops::{Deref, DerefMut};

/// A fixed-length vector of 64-bit parameters.
///
/// Length is fixed at construction; `Deref` exposes it as a slice, so entries
/// can be mutated but the vector cannot grow or shrink.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamVector(Vec<f64>);

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Index of the first non-finite entry, if any.
    pub fn first_nonfinite(&self) -> Option<usize> {
        self.0.iter().position(|v| !v.is_finite())
    }
}

impl Deref for ParamVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for ParamVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for ParamVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// One `(p_k, λ_k)` term of an elastic decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElasticTerm {
    pub p: f64,
    pub lambda: f64,
}

impl ElasticTerm {
    pub fn new(p: f64, lambda: f64) -> Self {
        Self { p, lambda }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 2.0) {
            return Err(Error::Config(format!(
                "elastic term p = {} outside (0, 2]",
                self.p
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!(
                "elastic term lambda = {} must be finite and >= 0",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// A named parameter tensor (flattened) with its decay configuration.
///
/// When `elastic_terms` is non-empty the single `(p, lambda_p)` pair is ignored
/// by every decay operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamGroup {
    pub name: String,
    /// Tensor shape; a rank-1 shape marks bias-like parameters.
    pub shape: Vec<usize>,
    pub params: ParamVector,
    pub decay_eligible: bool,
    pub p: f64,
    pub lambda_p: f64,
    #[serde(default)]
    pub elastic_terms: Vec<ElasticTerm>,
}

impl ParamGroup {
    pub fn new(name: impl Into<String>, shape: Vec<usize>, params: ParamVector) -> Self {
        Self {
            name: name.into(),
            shape,
            params,
            decay_eligible: true,
            p: 2.0,
            lambda_p: 0.0,
            elastic_terms: Vec::new(),
        }
    }

    pub fn with_decay(mut self, p: f64, lambda_p: f64) -> Self {
        self.p = p;
        self.lambda_p = lambda_p;
        self
    }

    pub fn with_elastic(mut self, terms: Vec<ElasticTerm>) -> Self {
        self.elastic_terms = terms;
        self
    }

    pub fn ineligible(mut self) -> Self {
        self.decay_eligible = false;
        self
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    /// Checks `p`, `lambda_p` and any elastic terms.
    pub fn validate(&self) -> Result<()> {
        if self.elastic_terms.is_empty() {
            if !(self.p > 0.0 && self.p <= 2.0) {
                return Err(Error::Config(format!(
                    "group `{}`: p = {} outside (0, 2]",
                    self.name, self.p
                )));
            }
            if !(self.lambda_p >= 0.0 && self.lambda_p.is_finite()) {
                return Err(Error::Config(format!(
                    "group `{}`: lambda_p = {} must be finite and >= 0",
                    self.name, self.lambda_p
                )));
            }
        }
        self.elastic_terms.iter().try_for_each(ElasticTerm::validate)
    }
}

/// A named tensor before grouping.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedTensor {
    pub name: String,
    pub shape: Vec<usize>,
    pub values: ParamVector,
}

impl NamedTensor {
    pub fn new(name: impl Into<String>, shape: Vec<usize>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            shape,
            values: ParamVector::new(values),
        }
    }
}

/// Default eligibility rule: tensors of rank >= 2 decay, rank-1 tensors
/// (biases, normalization scales) and scalars do not.
pub fn default_eligibility(t: &NamedTensor) -> bool {
    t.shape.len() >= 2
}

/// Splits a model's tensors into one group per tensor, marking eligibility with
/// `rule`. Groups start with `p = 2`, `lambda_p = 0`; callers attach decay settings.
pub fn group_partition<F>(model_params: Vec<NamedTensor>, rule: F) -> Result<Vec<ParamGroup>>
where
    F: Fn(&NamedTensor) -> bool,
{
    let mut seen = HashSet::with_capacity(model_params.len());
    for t in &model_params {
        if !seen.insert(t.name.as_str()) {
            return Err(Error::Config(format!("duplicate parameter name `{}`", t.name)));
        }
        let numel: usize = t.shape.iter().product();
        if numel != t.values.len() {
            return Err(Error::Config(format!(
                "tensor `{}`: shape {:?} holds {} values, got {}",
                t.name,
                t.shape,
                numel,
                t.values.len()
            )));
        }
    }
    Ok(model_params
        .into_iter()
        .map(|t| {
            let eligible = rule(&t);
            let mut g = ParamGroup::new(t.name, t.shape, t.values);
            g.decay_eligible = eligible;
            g
        })
        .collect())
}

/// Sets `(p, lambda_p)` and elastic terms on every eligible group.
pub fn apply_decay(groups: &mut [ParamGroup], p: f64, lambda_p: f64, elastic: &[ElasticTerm]) {
    for g in groups.iter_mut().filter(|g| g.decay_eligible) {
        g.p = p;
        g.lambda_p = lambda_p;
        g.elastic_terms = elastic.to_vec();
    }
}
