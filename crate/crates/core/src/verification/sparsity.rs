use crate::params::ParamGroup;
use serde::{Deserialize, Serialize};

/// Threshold below which a weight counts as zero.
pub const DEFAULT_TAU: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSparsity {
    pub name: String,
    pub total: usize,
    pub zeros: usize,
}

/// Zero counts over the decay-eligible groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityReport {
    pub total: usize,
    pub zeros: usize,
    pub tau: f64,
    pub groups: Vec<GroupSparsity>,
}

impl SparsityReport {
    /// `zeros / total`, or 0 when there is nothing to count.
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.zeros as f64 / self.total as f64
        }
    }
}

fn is_zero(w: f64, tau: f64) -> bool {
    w == 0.0 || w.abs() < tau
}

/// Counts entries with `|w| < tau` in every decay-eligible group. With
/// `tau = 0` only exact zeros count.
pub fn sparsity(groups: &[ParamGroup], tau: f64) -> SparsityReport {
    let groups: Vec<GroupSparsity> = groups
        .iter()
        .filter(|g| g.decay_eligible)
        .map(|g| GroupSparsity {
            name: g.name.clone(),
            total: g.len(),
            zeros: g.params.iter().filter(|&&w| is_zero(w, tau)).count(),
        })
        .collect();
    SparsityReport {
        total: groups.iter().map(|g| g.total).sum(),
        zeros: groups.iter().map(|g| g.zeros).sum(),
        tau,
        groups,
    }
}

/// Fraction of entries of a flat vector with `|w| < tau`.
pub fn sparsity_of(w: &[f64], tau: f64) -> f64 {
    if w.is_empty() {
        return 0.0;
    }
    w.iter().filter(|&&v| is_zero(v, tau)).count() as f64 / w.len() as f64
}

/// Accuracy in percent plus sparsity as a fraction: one accuracy point trades
/// against a full unit of sparsity.
pub fn tradeoff_metric(val_acc_percent: f64, sparsity_fraction: f64) -> f64 {
    val_acc_percent + sparsity_fraction
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{ParamGroup, ParamVector};

    fn group(v: Vec<f64>) -> ParamGroup {
        ParamGroup::new("w", vec![1, v.len()], ParamVector::new(v))
    }

    #[test]
    fn all_zero() {
        let r = sparsity(&[group(vec![0.0; 8])], DEFAULT_TAU);
        assert_eq!(r.fraction(), 1.0);
    }

    #[test]
    fn half_below_tau() {
        let r = sparsity(&[group(vec![1e-14, 1.0])], 1e-13);
        assert_eq!(r.fraction(), 0.5);
        assert_eq!(r.groups[0].zeros, 1);
    }

    #[test]
    fn tau_zero_counts_exact_zeros() {
        let mut rng = crate::rng::Rng::new(3);
        let v: Vec<f64> = (0..100).map(|_| rng.gaussian()).collect();
        assert_eq!(sparsity(&[group(v)], 0.0).fraction(), 0.0);
        assert_eq!(sparsity(&[group(vec![0.0, 1e-300])], 0.0).fraction(), 0.5);
    }

    #[test]
    fn ineligible_groups_skipped() {
        let bias = ParamGroup::new("b", vec![2], ParamVector::zeros(2)).ineligible();
        let r = sparsity(&[group(vec![1.0, 2.0]), bias], DEFAULT_TAU);
        assert_eq!((r.total, r.zeros), (2, 0));
    }

    #[test]
    fn tradeoff_convention() {
        assert!((tradeoff_metric(94.4, 0.90) - 95.3).abs() < 1e-12);
        assert_eq!(tradeoff_metric(0.0, 0.0), 0.0);
        assert_eq!(tradeoff_metric(50.0, 1.0) - tradeoff_metric(50.0, 0.0), 1.0);
    }
}
