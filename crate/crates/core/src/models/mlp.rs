//! Fully connected classifier with a softmax cross-entropy head.
//!
//! Parameters live in [`ParamGroup`]s named `layer{i}.weight` (shape
//! `[out, in]`, row-major, decay eligible) and `layer{i}.bias` (shape `[out]`,
//! never decayed). Hidden layers apply the activation; the last layer produces
//! raw logits.

use super::dense::DenseMatrix;
use crate::error::{check_len, Error, Result};
use crate::params::{ParamGroup, ParamVector};
use crate::rng::{mix64, Rng};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Tanh,
    Relu,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(0.0),
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpModel {
    /// Layer widths from input to output, e.g. `[2, 16, 16, 2]`.
    pub sizes: Vec<usize>,
    pub activation: Activation,
}

/// Forward-pass state needed by [`MlpModel::backward`].
#[derive(Debug, Clone)]
pub struct MlpCache {
    input: DenseMatrix,
    /// Pre-activations per layer (the last entry holds the logits).
    pre: Vec<DenseMatrix>,
    /// Activations per hidden layer.
    post: Vec<DenseMatrix>,
    fingerprint: u64,
}

impl MlpCache {
    pub fn logits(&self) -> &DenseMatrix {
        self.pre.last().expect("at least one layer")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitScheme {
    /// `N(0, 1/fan_in)` weights.
    LecunNormal,
    /// `N(0, std²)` weights.
    Gaussian { std: f64 },
}

fn fingerprint(params: &[ParamGroup]) -> u64 {
    params.iter().fold(0u64, |h, g| {
        g.params
            .iter()
            .fold(mix64(h ^ g.len() as u64), |h, v| mix64(h ^ v.to_bits()))
    })
}

fn softmax_row(z: &[f64], out: &mut [f64]) -> f64 {
    let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (o, &zi) in out.iter_mut().zip(z) {
        *o = (zi - m).exp();
        sum += *o;
    }
    out.iter_mut().for_each(|o| *o /= sum);
    m + sum.ln()
}

impl MlpModel {
    pub fn new(sizes: Vec<usize>, activation: Activation) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::Config(format!("invalid layer sizes {sizes:?}")));
        }
        Ok(Self { sizes, activation })
    }

    pub fn layers(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn classes(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    fn check_params(&self, params: &[ParamGroup]) -> Result<()> {
        check_len(2 * self.layers(), params.len())?;
        for l in 0..self.layers() {
            check_len(self.sizes[l] * self.sizes[l + 1], params[2 * l].len())?;
            check_len(self.sizes[l + 1], params[2 * l + 1].len())?;
        }
        Ok(())
    }

    /// Logits for a batch (`rows = samples`) plus the cache for backprop.
    pub fn forward(&self, params: &[ParamGroup], batch: &DenseMatrix) -> Result<(DenseMatrix, MlpCache)> {
        self.check_params(params)?;
        check_len(self.sizes[0], batch.cols())?;
        let n = batch.rows();
        let mut pre = Vec::with_capacity(self.layers());
        let mut post = Vec::with_capacity(self.layers() - 1);
        for l in 0..self.layers() {
            let (fan_in, fan_out) = (self.sizes[l], self.sizes[l + 1]);
            let w = &params[2 * l].params;
            let b = &params[2 * l + 1].params;
            let input = if l == 0 { batch } else { &post[l - 1] };
            let mut z = DenseMatrix::zeros(n, fan_out);
            for s in 0..n {
                let x = input.row(s);
                let zr = z.row_mut(s);
                for o in 0..fan_out {
                    let wr = &w[o * fan_in..(o + 1) * fan_in];
                    zr[o] = b[o] + wr.iter().zip(x).map(|(a, c)| a * c).sum::<f64>();
                }
            }
            if l + 1 < self.layers() {
                let mut a = z.clone();
                for r in 0..n {
                    a.row_mut(r).iter_mut().for_each(|v| *v = self.activation.apply(*v));
                }
                post.push(a);
            }
            pre.push(z);
        }
        let logits = pre.last().unwrap().clone();
        Ok((
            logits,
            MlpCache {
                input: batch.clone(),
                pre,
                post,
                fingerprint: fingerprint(params),
            },
        ))
    }

    /// Mean cross-entropy and its gradient, one vector per parameter group.
    pub fn backward(
        &self,
        params: &[ParamGroup],
        cache: &MlpCache,
        labels: &[usize],
    ) -> Result<(f64, Vec<ParamVector>)> {
        self.check_params(params)?;
        if cache.fingerprint != fingerprint(params) || cache.pre.len() != self.layers() {
            return Err(Error::StaleCache(
                "parameters changed since the forward pass".into(),
            ));
        }
        let n = cache.input.rows();
        check_len(n, labels.len())?;
        let classes = self.classes();
        if let Some(&bad) = labels.iter().find(|&&y| y >= classes) {
            return Err(Error::Config(format!("label {bad} >= {classes} classes")));
        }

        // dL/dlogits = (softmax - onehot) / n
        let logits = cache.logits();
        let mut delta = DenseMatrix::zeros(n, classes);
        let mut loss = 0.0;
        for s in 0..n {
            let d = delta.row_mut(s);
            let lse = softmax_row(logits.row(s), d);
            loss += lse - logits.get(s, labels[s]);
            d[labels[s]] -= 1.0;
            d.iter_mut().for_each(|v| *v /= n as f64);
        }
        loss /= n as f64;

        let mut grads: Vec<ParamVector> = params.iter().map(|g| ParamVector::zeros(g.len())).collect();
        for l in (0..self.layers()).rev() {
            let (fan_in, fan_out) = (self.sizes[l], self.sizes[l + 1]);
            let input = if l == 0 { &cache.input } else { &cache.post[l - 1] };
            {
                let (gw, rest) = grads.split_at_mut(2 * l + 1);
                let gw = &mut gw[2 * l];
                let gb = &mut rest[0];
                for s in 0..n {
                    let d = delta.row(s);
                    let x = input.row(s);
                    for o in 0..fan_out {
                        gb[o] += d[o];
                        let row = &mut gw[o * fan_in..(o + 1) * fan_in];
                        row.iter_mut().zip(x).for_each(|(g, xi)| *g += d[o] * xi);
                    }
                }
            }
            if l > 0 {
                let w = &params[2 * l].params;
                let z = &cache.pre[l - 1];
                let a = &cache.post[l - 1];
                let mut prev = DenseMatrix::zeros(n, fan_in);
                for s in 0..n {
                    let d = delta.row(s);
                    let p = prev.row_mut(s);
                    for o in 0..fan_out {
                        let wr = &w[o * fan_in..(o + 1) * fan_in];
                        p.iter_mut().zip(wr).for_each(|(pi, wi)| *pi += d[o] * wi);
                    }
                    for i in 0..fan_in {
                        p[i] *= self.activation.derivative(z.get(s, i), a.get(s, i));
                    }
                }
                delta = prev;
            }
        }
        Ok((loss, grads))
    }

    /// Mean cross-entropy without gradients.
    pub fn loss(&self, params: &[ParamGroup], batch: &DenseMatrix, labels: &[usize]) -> Result<f64> {
        let (logits, _) = self.forward(params, batch)?;
        check_len(batch.rows(), labels.len())?;
        let mut buf = vec![0.0; self.classes()];
        let mut loss = 0.0;
        for (s, &y) in labels.iter().enumerate() {
            loss += softmax_row(logits.row(s), &mut buf) - logits.get(s, y);
        }
        Ok(loss / labels.len().max(1) as f64)
    }

    /// Per-sample class probabilities.
    pub fn probabilities(&self, params: &[ParamGroup], batch: &DenseMatrix) -> Result<DenseMatrix> {
        let (logits, _) = self.forward(params, batch)?;
        let mut out = DenseMatrix::zeros(logits.rows(), logits.cols());
        for s in 0..logits.rows() {
            softmax_row(logits.row(s), out.row_mut(s));
        }
        Ok(out)
    }

    /// Fraction of samples whose arg-max logit matches the label.
    pub fn accuracy(&self, params: &[ParamGroup], batch: &DenseMatrix, labels: &[usize]) -> Result<f64> {
        let (logits, _) = self.forward(params, batch)?;
        check_len(batch.rows(), labels.len())?;
        let hits = labels
            .iter()
            .enumerate()
            .filter(|(s, &y)| argmax(logits.row(*s)) == y)
            .count();
        Ok(hits as f64 / labels.len().max(1) as f64)
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Fresh parameters: Gaussian weights, zero biases. Biases are marked ineligible
/// for decay, since the decay step keeps zero-initialized entries at zero.
pub fn init_params(model: &MlpModel, rng: &mut Rng, scheme: InitScheme) -> Vec<ParamGroup> {
    let mut out = Vec::with_capacity(2 * model.layers());
    for l in 0..model.layers() {
        let (fan_in, fan_out) = (model.sizes[l], model.sizes[l + 1]);
        let std = match scheme {
            InitScheme::LecunNormal => 1.0 / (fan_in as f64).sqrt(),
            InitScheme::Gaussian { std } => std,
        };
        let w: Vec<f64> = (0..fan_in * fan_out).map(|_| std * rng.gaussian()).collect();
        out.push(ParamGroup::new(
            format!("layer{l}.weight"),
            vec![fan_out, fan_in],
            ParamVector::new(w),
        ));
        out.push(
            ParamGroup::new(
                format!("layer{l}.bias"),
                vec![fan_out],
                ParamVector::zeros(fan_out),
            )
            .ineligible(),
        );
    }
    out
}

/// Mean cross-entropy on a fixed batch as a function of all parameters
/// flattened in group order, for use with generic gradient oracles.
#[derive(Debug, Clone)]
pub struct MlpObjective {
    pub model: MlpModel,
    pub template: Vec<ParamGroup>,
    pub batch: DenseMatrix,
    pub labels: Vec<usize>,
}

impl MlpObjective {
    pub fn flatten(groups: &[ParamGroup]) -> Vec<f64> {
        groups.iter().flat_map(|g| g.params.iter().copied()).collect()
    }

    /// Groups shaped like the template holding the values of `w`.
    pub fn unflatten(&self, w: &[f64]) -> Result<Vec<ParamGroup>> {
        check_len(self.dim_inner(), w.len())?;
        let mut out = self.template.clone();
        let mut offset = 0;
        for g in &mut out {
            let n = g.len();
            g.params.copy_from_slice(&w[offset..offset + n]);
            offset += n;
        }
        Ok(out)
    }

    fn dim_inner(&self) -> usize {
        self.template.iter().map(|g| g.len()).sum()
    }
}

impl super::DifferentiableLoss for MlpObjective {
    fn dim(&self) -> usize {
        self.dim_inner()
    }

    fn loss_and_grad(&self, w: &[f64]) -> Result<(f64, ParamVector)> {
        let params = self.unflatten(w)?;
        let (_, cache) = self.model.forward(&params, &self.batch)?;
        let (loss, grads) = self.model.backward(&params, &cache, &self.labels)?;
        let flat: Vec<f64> = grads.iter().flat_map(|g| g.iter().copied()).collect();
        Ok((loss, ParamVector::new(flat)))
    }
}
