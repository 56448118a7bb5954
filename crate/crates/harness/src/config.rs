//! Experiment configuration: a single JSON document with every field spelled
//! out. Command-line flags override individual fields after loading.

use crate::error::{HarnessError, Result};
use pwd_core::models::Activation;
use pwd_core::optimizers::{BaseOptimizer, PruneSchedule, PwdConfig, Schedule};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Toy,
    Bridge,
    Logreg,
    Mlp,
    Scan,
    PruneBaseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

impl OptimizerKind {
    pub fn base(self) -> BaseOptimizer {
        match self {
            OptimizerKind::Sgd => BaseOptimizer::Sgd,
            OptimizerKind::Adam => BaseOptimizer::adam(),
        }
    }
}

/// Warmup + cosine schedule, sized relative to the run length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub max_lr: f64,
    /// Fraction of the run spent in linear warmup.
    pub warmup_frac: f64,
    /// `min_lr / max_lr`.
    pub min_lr_ratio: f64,
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        Self {
            max_lr: 1e-2,
            warmup_frac: 0.05,
            min_lr_ratio: 0.01,
        }
    }
}

impl ScheduleSpec {
    pub fn build(&self, steps: u64) -> Result<Schedule> {
        let warmup = ((self.warmup_frac * steps as f64).round() as u64).min(steps.saturating_sub(1));
        Ok(Schedule::with_min(
            self.max_lr,
            self.max_lr * self.min_lr_ratio,
            warmup,
            steps,
        )?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToyVariant {
    /// Plain gradient descent on the penalized loss.
    Naive,
    /// Gradient descent followed by the pWD step (cadence from `pwd.s_cadence`).
    Pwd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToySpec {
    pub variant: ToyVariant,
    pub w0: f64,
    pub alpha: f64,
}

impl Default for ToySpec {
    fn default() -> Self {
        Self {
            variant: ToyVariant::Pwd,
            w0: 2.0,
            alpha: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlobsSpec {
    pub n: usize,
    pub classes: usize,
    pub separation: f64,
    pub std: f64,
}

impl Default for BlobsSpec {
    fn default() -> Self {
        Self {
            n: 2000,
            classes: 4,
            separation: 2.0,
            std: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparseLinearSpec {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub noise_std: f64,
    /// Size of the held-out test set drawn with the same ground truth.
    pub n_test: usize,
}

impl Default for SparseLinearSpec {
    fn default() -> Self {
        Self {
            n: 200,
            d: 50,
            k: 5,
            noise_std: 0.1,
            n_test: 1000,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub blobs: BlobsSpec,
    pub sparse_linear: SparseLinearSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub hidden: Vec<usize>,
    pub activation: Activation,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            hidden: vec![16, 16],
            activation: Activation::Tanh,
        }
    }
}

/// Log-spaced axis `min, ..., max` with `points` entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogAxis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl LogAxis {
    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.min],
            n => {
                let (a, b) = (self.min.ln(), self.max.ln());
                (0..n)
                    .map(|i| {
                        if i == 0 {
                            self.min
                        } else if i + 1 == n {
                            self.max
                        } else {
                            (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                        }
                    })
                    .collect()
            }
        }
    }

    pub fn single(v: f64) -> Self {
        Self {
            min: v,
            max: v,
            points: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanTarget {
    Bridge,
    Logreg,
    Mlp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub target: ScanTarget,
    pub max_lr: LogAxis,
    pub lambda_p: LogAxis,
    pub p_values: Vec<f64>,
    /// Run cells on the rayon pool; results do not depend on this flag.
    pub parallel: bool,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self {
            target: ScanTarget::Mlp,
            max_lr: LogAxis {
                min: 1e-4,
                max: 1e-1,
                points: 5,
            },
            lambda_p: LogAxis {
                min: 1e-4,
                max: 1e1,
                points: 5,
            },
            p_values: vec![0.8, 1.2, 2.0],
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub optimizer: OptimizerKind,
    pub pwd: PwdConfig,
    pub schedule: ScheduleSpec,
    /// Optimizer steps per run.
    pub steps: u64,
    /// Mini-batch size; `None` trains on the full batch.
    pub batch_size: Option<usize>,
    /// Record every `log_every` steps (and always the last step).
    pub log_every: u64,
    /// Fraction of samples held out for validation.
    pub val_fraction: f64,
    pub model: ModelSpec,
    pub dataset: DatasetSpec,
    pub toy: ToySpec,
    pub scan: ScanSpec,
    pub prune: PruneSchedule,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults for each experiment kind.
    pub fn for_kind(kind: ExperimentKind) -> Self {
        let mut c = Self {
            kind,
            seed: 0,
            optimizer: OptimizerKind::Adam,
            pwd: PwdConfig::new(0.8, 1e-2),
            schedule: ScheduleSpec::default(),
            steps: 2000,
            batch_size: None,
            log_every: 10,
            val_fraction: 0.2,
            model: ModelSpec::default(),
            dataset: DatasetSpec::default(),
            toy: ToySpec::default(),
            scan: ScanSpec::default(),
            prune: PruneSchedule::default(),
            out_dir: None,
        };
        match kind {
            ExperimentKind::Toy => {
                c.optimizer = OptimizerKind::Sgd;
                c.pwd = PwdConfig::new(0.6, 1.0);
                c.log_every = 1;
            }
            ExperimentKind::Mlp | ExperimentKind::Scan | ExperimentKind::PruneBaseline => {
                c.batch_size = Some(64);
                c.steps = 3000;
            }
            ExperimentKind::Logreg => c.dataset.blobs.classes = 2,
            ExperimentKind::Bridge => {}
        }
        if kind == ExperimentKind::PruneBaseline {
            c.pwd = PwdConfig::new(2.0, 1e-2);
            c.prune.threshold = 0.1;
        }
        c
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| HarnessError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.pwd.validate()?;
        if self.steps == 0 {
            return Err(HarnessError::Config("steps must be >= 1".into()));
        }
        if self.log_every == 0 {
            return Err(HarnessError::Config("log_every must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.val_fraction) {
            return Err(HarnessError::Config("val_fraction must be in [0, 1)".into()));
        }
        if self.batch_size == Some(0) {
            return Err(HarnessError::Config("batch_size must be >= 1".into()));
        }
        if self.kind != ExperimentKind::Toy && self.steps > 1 {
            self.schedule.build(self.steps)?;
        }
        Ok(())
    }
}
