use crate::params::ParamGroup;
use serde::{Deserialize, Serialize};

/// Zeroes every decay-eligible entry with `|w| < threshold`. Returns how many
/// nonzero entries were set to zero.
pub fn magnitude_prune(groups: &mut [ParamGroup], threshold: f64) -> usize {
    let mut pruned = 0;
    for g in groups.iter_mut().filter(|g| g.decay_eligible) {
        for w in g.params.iter_mut() {
            if w.abs() < threshold && *w != 0.0 {
                *w = 0.0;
                pruned += 1;
            }
        }
    }
    pruned
}

/// When and how hard to prune during training.
///
/// Pruning starts once `start_frac` of the run has elapsed; the threshold ramps
/// linearly from zero to `threshold` over the next `ramp_frac` of the run and
/// then stays there. Pruning happens every `every` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PruneSchedule {
    pub threshold: f64,
    pub every: u64,
    pub start_frac: f64,
    pub ramp_frac: f64,
}

impl Default for PruneSchedule {
    fn default() -> Self {
        Self {
            threshold: 1e-3,
            every: 10,
            start_frac: 0.1,
            ramp_frac: 0.1,
        }
    }
}

impl PruneSchedule {
    /// Threshold to apply after step `t` of `total`, or `None` if this is not a
    /// pruning step.
    pub fn threshold_at(&self, t: u64, total: u64) -> Option<f64> {
        if self.threshold <= 0.0 || self.every == 0 || t % self.every != 0 {
            return None;
        }
        let start = self.start_frac * total as f64;
        let t = t as f64;
        if t < start {
            return None;
        }
        let ramp = self.ramp_frac * total as f64;
        let scale = if ramp <= 0.0 { 1.0 } else { ((t - start) / ramp).min(1.0) };
        Some(self.threshold * scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParamVector;

    fn group(v: Vec<f64>) -> ParamGroup {
        ParamGroup::new("w", vec![1, v.len()], ParamVector::new(v))
    }

    #[test]
    fn prunes_small_entries() {
        let mut gs = vec![group(vec![1e-5, 0.5])];
        assert_eq!(magnitude_prune(&mut gs, 1e-3), 1);
        assert_eq!(gs[0].params.as_slice(), &[0.0, 0.5]);
        assert_eq!(gs[0].params[0].to_bits(), 0);
    }

    #[test]
    fn small_threshold_is_noop() {
        let mut gs = vec![group(vec![0.1, -0.2])];
        assert_eq!(magnitude_prune(&mut gs, 1e-3), 0);
        assert_eq!(gs[0].params.as_slice(), &[0.1, -0.2]);
    }

    #[test]
    fn idempotent() {
        let mut gs = vec![group(vec![1e-4, -2e-4, 3.0, -1e-9])];
        magnitude_prune(&mut gs, 1e-3);
        let once = gs.clone();
        assert_eq!(magnitude_prune(&mut gs, 1e-3), 0);
        assert_eq!(gs, once);
    }

    #[test]
    fn ineligible_groups_untouched() {
        let mut gs = vec![group(vec![1e-6]).ineligible()];
        assert_eq!(magnitude_prune(&mut gs, 1.0), 0);
        assert_eq!(gs[0].params[0], 1e-6);
    }

    #[test]
    fn schedule_ramps() {
        let s = PruneSchedule {
            threshold: 1.0,
            every: 10,
            start_frac: 0.1,
            ramp_frac: 0.1,
        };
        assert_eq!(s.threshold_at(50, 1000), None);
        assert_eq!(s.threshold_at(100, 1000), Some(0.0));
        assert_eq!(s.threshold_at(150, 1000), Some(0.5));
        assert_eq!(s.threshold_at(155, 1000), None);
        assert_eq!(s.threshold_at(900, 1000), Some(1.0));
        let off = PruneSchedule { threshold: 0.0, ..s };
        assert_eq!(off.threshold_at(500, 1000), None);
    }
}
