//! Shared training loop for the regression and classification experiments.

use crate::config::{ExperimentConfig, ScanTarget};
use crate::error::{HarnessError, Result};
use crate::records::{RecoveryMetrics, RunRecord, ScanCell};
use pwd_core::datagen::{gen_gaussian_blobs, gen_linear_samples, gen_sparse_linear, ClassificationSet, RegressionSet};
use pwd_core::models::{init_params, DenseMatrix, DifferentiableLoss, InitScheme, LinRegLoss, LogRegLoss, MlpModel};
use pwd_core::optimizers::{magnitude_prune, PruneSchedule, PwdOptimizer};
use pwd_core::params::apply_decay;
use pwd_core::regularizers::{pnorm_penalty, PenaltySpec};
use pwd_core::rng::derive_seed;
use pwd_core::verification::{sparsity, sparsity_of, DEFAULT_TAU};
use pwd_core::{ParamGroup, ParamVector, Rng};

/// Stream index reserved for the held-out regression test set.
const TEST_STREAM: u64 = u64::MAX;

/// Hyperparameters that vary across scan cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellParams {
    pub index: usize,
    pub max_lr: f64,
    pub lambda_p: f64,
    pub p: f64,
    /// Seeds model initialization and mini-batch order.
    pub seed: u64,
}

impl CellParams {
    /// The configuration's own hyperparameters as cell 0.
    pub fn from_config(config: &ExperimentConfig) -> Self {
        Self {
            index: 0,
            max_lr: config.schedule.max_lr,
            lambda_p: config.pwd.lambda_p,
            p: config.pwd.p,
            seed: derive_seed(config.seed, 0),
        }
    }
}

/// Result of one training run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub records: Vec<RunRecord>,
    pub cell: ScanCell,
    /// Final parameters; empty if the run failed.
    pub groups: Vec<ParamGroup>,
}

/// Data for one experiment, generated once from the base seed and shared by
/// every cell.
#[derive(Debug, Clone)]
pub enum Prepared {
    Regression {
        train: RegressionSet,
        val: RegressionSet,
        test: RegressionSet,
    },
    Logreg {
        train: ClassificationSet,
        val: ClassificationSet,
    },
    Mlp {
        model: MlpModel,
        train: ClassificationSet,
        val: ClassificationSet,
    },
}

fn split_point(n: usize, val_fraction: f64) -> usize {
    n - ((n as f64 * val_fraction).round() as usize).min(n - 1)
}

impl Prepared {
    pub fn build(config: &ExperimentConfig, target: ScanTarget) -> Result<Self> {
        match target {
            ScanTarget::Bridge => {
                let s = &config.dataset.sparse_linear;
                let all = gen_sparse_linear(s.n, s.d, s.k, s.noise_std, config.seed)?;
                let (train, val) = all.split(split_point(s.n, config.val_fraction));
                let test = gen_linear_samples(&all.w_true, s.n_test.max(1), s.noise_std, derive_seed(config.seed, TEST_STREAM))?;
                Ok(Prepared::Regression { train, val, test })
            }
            ScanTarget::Logreg | ScanTarget::Mlp => {
                let b = &config.dataset.blobs;
                let all = gen_gaussian_blobs(b.n, b.classes, b.separation, b.std, config.seed)?;
                let (train, val) = all.split(split_point(b.n, config.val_fraction));
                if target == ScanTarget::Logreg {
                    if b.classes != 2 {
                        return Err(HarnessError::Config(format!(
                            "logistic regression needs 2 classes, got {}",
                            b.classes
                        )));
                    }
                    Ok(Prepared::Logreg { train, val })
                } else {
                    let mut sizes = vec![2];
                    sizes.extend(&config.model.hidden);
                    sizes.push(b.classes);
                    let model = MlpModel::new(sizes, config.model.activation)?;
                    Ok(Prepared::Mlp { model, train, val })
                }
            }
        }
    }

    fn n_train(&self) -> usize {
        match self {
            Prepared::Regression { train, .. } => train.y.len(),
            Prepared::Logreg { train, .. } | Prepared::Mlp { train, .. } => train.labels.len(),
        }
    }

    fn init(&self, rng: &mut Rng) -> Vec<ParamGroup> {
        match self {
            Prepared::Regression { train, .. } => {
                let d = train.x.cols();
                let std = 1.0 / (d as f64).sqrt();
                let w = (0..d).map(|_| std * rng.gaussian()).collect();
                vec![ParamGroup::new("weight", vec![1, d], ParamVector::new(w))]
            }
            Prepared::Logreg { .. } => {
                let w = (0..2).map(|_| rng.gaussian() / 2f64.sqrt()).collect();
                vec![
                    ParamGroup::new("weight", vec![1, 2], ParamVector::new(w)),
                    ParamGroup::new("bias", vec![1], ParamVector::zeros(1)).ineligible(),
                ]
            }
            Prepared::Mlp { model, .. } => init_params(model, rng, InitScheme::LecunNormal),
        }
    }

    /// Loss and gradients on the given training rows (all rows if `None`).
    fn loss_grad(&self, groups: &[ParamGroup], rows: Option<&[usize]>) -> Result<(f64, Vec<ParamVector>)> {
        match self {
            Prepared::Regression { train, .. } => {
                let (x, y) = match rows {
                    Some(r) => (train.x.select_rows(r), r.iter().map(|&i| train.y[i]).collect()),
                    None => (train.x.clone(), train.y.clone()),
                };
                let (l, g) = LinRegLoss::new(x, y)?.loss_and_grad(&groups[0].params)?;
                Ok((l, vec![g]))
            }
            Prepared::Logreg { train, .. } => {
                let sub;
                let set = match rows {
                    Some(r) => {
                        sub = train.subset(r);
                        &sub
                    }
                    None => train,
                };
                let loss = logreg_loss(set)?;
                let w = [groups[0].params[0], groups[0].params[1], groups[1].params[0]];
                let (l, g) = loss.loss_and_grad(&w)?;
                Ok((l, vec![ParamVector::new(vec![g[0], g[1]]), ParamVector::new(vec![g[2]])]))
            }
            Prepared::Mlp { model, train, .. } => {
                let (x, labels) = match rows {
                    Some(r) => (train.x.select_rows(r), r.iter().map(|&i| train.labels[i]).collect::<Vec<_>>()),
                    None => (train.x.clone(), train.labels.clone()),
                };
                let (_, cache) = model.forward(groups, &x)?;
                Ok(model.backward(groups, &cache, &labels)?)
            }
        }
    }

    /// Validation accuracy in `[0, 1]`, for classification.
    fn val_acc(&self, groups: &[ParamGroup]) -> Result<Option<f64>> {
        match self {
            Prepared::Regression { .. } => Ok(None),
            Prepared::Logreg { val, .. } => {
                let w = [groups[0].params[0], groups[0].params[1], groups[1].params[0]];
                Ok(Some(logreg_loss(val)?.accuracy(&w)))
            }
            Prepared::Mlp { model, val, .. } => Ok(Some(model.accuracy(groups, &val.x, &val.labels)?)),
        }
    }
}

/// Logistic regression with an intercept column appended to the features.
fn logreg_loss(set: &ClassificationSet) -> Result<LogRegLoss> {
    let n = set.labels.len();
    let mut data = Vec::with_capacity(3 * n);
    for r in 0..n {
        data.extend_from_slice(set.x.row(r));
        data.push(1.0);
    }
    let labels: Vec<u8> = set.labels.iter().map(|&l| l as u8).collect();
    Ok(LogRegLoss::new(DenseMatrix::new(n, 3, data)?, &labels)?)
}

/// Penalty `(λ/p) Σ |w|^p` over the decayed groups.
fn penalty(groups: &[ParamGroup], p: f64, lambda: f64) -> f64 {
    let spec = match PenaltySpec::new(p, lambda) {
        Ok(s) => s,
        Err(_) => return f64::NAN,
    };
    groups.iter().filter(|g| g.decay_eligible).map(|g| pnorm_penalty(&g.params, spec)).sum()
}

/// Cycles through shuffled epochs of the training rows.
struct Batcher {
    order: Vec<usize>,
    pos: usize,
    size: usize,
}

impl Batcher {
    fn next(&mut self, rng: &mut Rng) -> &[usize] {
        if self.pos + self.size > self.order.len() {
            rng.shuffle(&mut self.order);
            self.pos = 0;
        }
        let start = self.pos;
        self.pos += self.size;
        &self.order[start..self.pos]
    }
}

/// Trains one cell. Non-finite parameters end the run and mark the cell failed.
pub fn train_cell(
    config: &ExperimentConfig,
    data: &Prepared,
    cell: CellParams,
    prune: Option<&PruneSchedule>,
) -> Result<RunOutcome> {
    let mut rng = Rng::new(cell.seed);
    let mut groups = data.init(&mut rng);
    let mut pwd = config.pwd.clone();
    pwd.p = cell.p;
    pwd.lambda_p = cell.lambda_p;
    apply_decay(&mut groups, cell.p, cell.lambda_p, &pwd.elastic_terms);
    let mut spec = config.schedule;
    spec.max_lr = cell.max_lr;
    let schedule = spec.build(config.steps)?;
    let mut opt = PwdOptimizer::new(config.optimizer.base(), cell.max_lr, Some(schedule), pwd.clone(), &groups)?;

    let n = data.n_train();
    let mut batcher = config.batch_size.filter(|&b| b < n).map(|size| Batcher {
        order: (0..n).collect(),
        pos: n,
        size,
    });

    let mut records = Vec::new();
    let fail = |reason: String, records: Vec<RunRecord>| RunOutcome {
        records,
        cell: ScanCell::failed(cell.index, cell.max_lr, cell.lambda_p, cell.p, reason),
        groups: Vec::new(),
    };

    for t in 1..=config.steps {
        let rows = batcher.as_mut().map(|b| b.next(&mut rng).to_vec());
        let (loss, grads) = data.loss_grad(&groups, rows.as_deref())?;
        if !loss.is_finite() {
            return Ok(fail(format!("non-finite loss at step {t}"), records));
        }
        let eta = match opt.step(&mut groups, &grads) {
            Ok(eta) => eta,
            Err(e @ pwd_core::Error::Step { .. }) => return Ok(fail(e.to_string(), records)),
            Err(e) => return Err(e.into()),
        };
        if let Some(thr) = prune.and_then(|s| s.threshold_at(t, config.steps)) {
            magnitude_prune(&mut groups, thr);
        }
        if t % config.log_every == 0 || t == config.steps {
            let p_now = match &pwd.p_schedule {
                Some(s) => s.value(t),
                None => cell.p,
            };
            records.push(RunRecord {
                step: t,
                eta,
                loss,
                reg_loss: loss + penalty(&groups, p_now, cell.lambda_p),
                sparsity: sparsity(&groups, DEFAULT_TAU).fraction(),
                train_acc: None,
                val_acc: data.val_acc(&groups)?,
                p: pwd.p_schedule.as_ref().map(|_| p_now),
            });
        }
    }

    let sp = sparsity(&groups, DEFAULT_TAU).fraction();
    let cell_out = match data {
        Prepared::Regression { train, val, test } => {
            let w = &groups[0].params;
            let recovery = recovery_metrics(w, &train.w_true, val, test)?;
            ScanCell {
                index: cell.index,
                max_lr: cell.max_lr,
                lambda_p: cell.lambda_p,
                p: cell.p,
                final_acc: None,
                final_sparsity: sp,
                tradeoff: None,
                status: crate::records::CellStatus::Ok,
                reason: None,
                recovery: Some(recovery),
            }
        }
        _ => {
            let acc = data.val_acc(&groups)?.unwrap_or(0.0);
            ScanCell::classification(cell.index, cell.max_lr, cell.lambda_p, cell.p, acc, sp)
        }
    };
    Ok(RunOutcome {
        records,
        cell: cell_out,
        groups,
    })
}

/// Exact-zero recovery statistics of a regression estimate.
pub fn recovery_metrics(w: &[f64], w_true: &[f64], val: &RegressionSet, test: &RegressionSet) -> Result<RecoveryMetrics> {
    let true_zero: Vec<usize> = (0..w.len()).filter(|&i| w_true[i] == 0.0).collect();
    let zeroed = true_zero.iter().filter(|&&i| w[i] == 0.0).count();
    let predicted: Vec<bool> = w.iter().map(|&v| v != 0.0).collect();
    let tp = (0..w.len()).filter(|&i| predicted[i] && w_true[i] != 0.0).count() as f64;
    let fp = (0..w.len()).filter(|&i| predicted[i] && w_true[i] == 0.0).count() as f64;
    let fn_ = (0..w.len()).filter(|&i| !predicted[i] && w_true[i] != 0.0).count() as f64;
    let f1 = if tp == 0.0 { 0.0 } else { 2.0 * tp / (2.0 * tp + fp + fn_) };
    let mse = |set: &RegressionSet| -> Result<f64> { Ok(LinRegLoss::new(set.x.clone(), set.y.clone())?.mse(w)) };
    Ok(RecoveryMetrics {
        val_mse: if val.y.is_empty() { None } else { Some(mse(val)?) },
        test_mse: mse(test)?,
        true_zero_rate: if true_zero.is_empty() { 1.0 } else { zeroed as f64 / true_zero.len() as f64 },
        support_f1: f1,
        exact_zeros: (sparsity_of(w, 0.0) * w.len() as f64).round() as usize,
    })
}
