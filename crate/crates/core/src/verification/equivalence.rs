use crate::error::{Error, Result};
use crate::regularizers::aux_k_unchecked;
use serde::{Deserialize, Serialize};

/// Discretization for the brute-force searches: a uniform `w` grid and a
/// log-spaced `s` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub w_min: f64,
    pub w_max: f64,
    pub w_points: usize,
    pub s_min: f64,
    pub s_max: f64,
    pub s_points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            w_min: -1.0,
            w_max: 2.0,
            w_points: 3001,
            s_min: 1e-6,
            s_max: 1e6,
            s_points: 2001,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.w_points < 100 || self.s_points < 100 {
            return Err(Error::Config("grid resolutions must be at least 100 points".into()));
        }
        if !(self.w_min < self.w_max && self.w_min.is_finite() && self.w_max.is_finite()) {
            return Err(Error::Config("w range must be a finite, nonempty interval".into()));
        }
        if !(self.s_min > 0.0 && self.s_min < self.s_max && self.s_max.is_finite()) {
            return Err(Error::Config("s range must satisfy 0 < s_min < s_max < inf".into()));
        }
        Ok(())
    }

    /// The same ranges with both spacings halved.
    pub fn refined(&self) -> Self {
        Self {
            w_points: 2 * self.w_points - 1,
            s_points: 2 * self.s_points - 1,
            ..*self
        }
    }

    pub fn w_step(&self) -> f64 {
        (self.w_max - self.w_min) / (self.w_points - 1) as f64
    }

    /// Log-spacing of the `s` grid.
    pub fn log_s_step(&self) -> f64 {
        (self.s_max / self.s_min).ln() / (self.s_points - 1) as f64
    }

    /// `w` grid points: integer multiples of the step, so `0` is on the grid
    /// whenever it lies in range.
    pub fn w_grid(&self) -> Vec<f64> {
        let h = self.w_step();
        let lo = (self.w_min / h).ceil() as i64;
        let hi = (self.w_max / h).floor() as i64;
        (lo..=hi).map(|j| j as f64 * h).collect()
    }

    pub fn s_grid(&self) -> Vec<f64> {
        let d = self.log_s_step();
        let l0 = self.s_min.ln();
        (0..self.s_points)
            .map(|j| {
                if j + 1 == self.s_points {
                    self.s_max
                } else {
                    (l0 + j as f64 * d).exp()
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleStatus {
    Pass,
    Fail,
    /// The grid is too coarse for its error bound to meet the tolerance.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub p: f64,
    pub lambda_p: f64,
    pub min_original: f64,
    pub argmin_w: f64,
    pub min_extended: f64,
    pub argmin_w_extended: f64,
    pub argmin_s: f64,
    /// `min_extended - min_original`; nonnegative up to rounding.
    pub gap: f64,
    /// A priori bound on the gap implied by the `s` discretization.
    pub gap_bound: f64,
    /// `|argmin_w|^(p-2)` clamped to the `s` range.
    pub target_s: f64,
    pub w_argmin_within_cell: bool,
    pub s_argmin_within_cell: bool,
    pub status: OracleStatus,
}

/// `φ(r) = r - 1 + ((2-p)/p)(r^(p/(p-2)) - 1)`: the relative excess of the
/// extended penalty when `s` is off its optimum by the factor `r`.
fn excess(r: f64, p: f64) -> f64 {
    r - 1.0 + (2.0 - p) / p * (r.powf(p / (p - 2.0)) - 1.0)
}

fn gap_bound(w: f64, p: f64, lambda: f64, grid: &GridSpec) -> f64 {
    if w == 0.0 {
        return lambda / 2.0 * aux_k_unchecked(grid.s_max, p);
    }
    let s_star = w.abs().powf(p - 2.0);
    let phi = if s_star < grid.s_min {
        excess(grid.s_min / s_star, p)
    } else if s_star > grid.s_max {
        excess(grid.s_max / s_star, p)
    } else {
        let half = (grid.log_s_step() / 2.0).exp();
        excess(half, p).max(excess(1.0 / half, p))
    };
    lambda / 2.0 * w.abs().powf(p) * phi
}

/// `min_j (s_j w² + K_j)` and its index.
fn envelope(w: f64, s: &[f64], k: &[f64]) -> (f64, usize) {
    let w2 = w * w;
    let mut best = (f64::INFINITY, 0);
    for (j, (&sj, &kj)) in s.iter().zip(k).enumerate() {
        let v = sj * w2 + kj;
        if v < best.0 {
            best = (v, j);
        }
    }
    best
}

fn check_args(p: f64, lambda: f64, grid: &GridSpec) -> Result<()> {
    grid.validate()?;
    if !(p > 0.0 && p < 2.0) {
        return Err(Error::Domain(format!("equivalence needs 0 < p < 2, got {p}")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda_p = {lambda} must be >= 0")));
    }
    Ok(())
}

/// Minimizes `L(w) + (λ/p)|w|^p` over the `w` grid and
/// `L(w) + (λ/2)(s w² + K(s))` over the `w × s` grid, then checks that the
/// minima agree within the discretization bound, that the minimizing `w`
/// agree within one cell, and that the minimizing `s` sits within one log
/// cell of `|w*|^(p-2)` (the top cell when `w* = 0`).
///
/// Returns [`OracleStatus::Inconclusive`] when the bound exceeds `tolerance`.
pub fn equivalence_oracle(
    p: f64,
    lambda_p: f64,
    loss: &dyn Fn(f64) -> f64,
    grid: &GridSpec,
    tolerance: f64,
) -> Result<EquivalenceReport> {
    check_args(p, lambda_p, grid)?;
    let ws = grid.w_grid();
    let ss = grid.s_grid();
    let ks: Vec<f64> = ss.iter().map(|&s| aux_k_unchecked(s, p)).collect();
    let losses: Vec<f64> = ws.iter().map(|&w| loss(w)).collect();
    if let Some(i) = losses.iter().position(|l| !l.is_finite()) {
        return Err(Error::Evaluation(format!("loss not finite at w = {}", ws[i])));
    }

    let mut orig = (f64::INFINITY, 0usize);
    let mut ext = (f64::INFINITY, 0usize, 0usize);
    for (i, (&w, &l)) in ws.iter().zip(&losses).enumerate() {
        let fo = l + lambda_p / p * w.abs().powf(p);
        if fo < orig.0 {
            orig = (fo, i);
        }
        let (env, j) = envelope(w, &ss, &ks);
        let fe = l + lambda_p / 2.0 * env;
        if fe < ext.0 {
            ext = (fe, i, j);
        }
    }

    let w_orig = ws[orig.1];
    let w_ext = ws[ext.1];
    let gap = ext.0 - orig.0;
    let bound = gap_bound(w_orig, p, lambda_p, grid);
    let rounding = 1e-12 * (1.0 + orig.0.abs());

    let w_ok = (w_ext - w_orig).abs() <= grid.w_step() * (1.0 + 1e-9);
    let (target_s, s_ok) = if w_orig == 0.0 {
        (grid.s_max, ext.2 == ss.len() - 1)
    } else {
        let t = w_orig.abs().powf(p - 2.0).clamp(grid.s_min, grid.s_max);
        (t, (ss[ext.2].ln() - t.ln()).abs() <= grid.log_s_step() * (1.0 + 1e-9))
    };

    let status = if bound > tolerance {
        OracleStatus::Inconclusive
    } else if gap.abs() <= bound + rounding && w_ok && s_ok {
        OracleStatus::Pass
    } else {
        OracleStatus::Fail
    };

    Ok(EquivalenceReport {
        p,
        lambda_p,
        min_original: orig.0,
        argmin_w: w_orig,
        min_extended: ext.0,
        argmin_w_extended: w_ext,
        argmin_s: ss[ext.2],
        gap,
        gap_bound: bound,
        target_s,
        w_argmin_within_cell: w_ok,
        s_argmin_within_cell: s_ok,
        status,
    })
}

/// Largest excess of the discretized extended penalty over the bridge penalty,
/// `max_w [(λ/2) min_j (s_j w² + K_j) - (λ/p)|w|^p]`, over nonzero grid `w`
/// whose optimal `s` lies inside the `s` range. This isolates the error due to
/// `s` spacing from range truncation.
pub fn envelope_gap(p: f64, lambda_p: f64, grid: &GridSpec) -> Result<f64> {
    check_args(p, lambda_p, grid)?;
    let ss = grid.s_grid();
    let ks: Vec<f64> = ss.iter().map(|&s| aux_k_unchecked(s, p)).collect();
    let mut worst = 0.0f64;
    for w in grid.w_grid() {
        if w == 0.0 {
            continue;
        }
        let s_star = w.abs().powf(p - 2.0);
        if s_star < grid.s_min || s_star > grid.s_max {
            continue;
        }
        let (env, _) = envelope(w, &ss, &ks);
        worst = worst.max(lambda_p / 2.0 * env - lambda_p / p * w.abs().powf(p));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(w: f64) -> f64 {
        0.5 * (w - 1.0) * (w - 1.0)
    }

    #[test]
    fn grid_contains_zero() {
        let g = GridSpec::default();
        assert!(g.w_grid().contains(&0.0));
        let s = g.s_grid();
        assert_eq!(s.len(), g.s_points);
        assert_eq!(*s.last().unwrap(), g.s_max);
    }

    #[test]
    fn excess_vanishes_at_optimum() {
        for p in [0.5, 1.0, 1.5] {
            assert!(excess(1.0, p).abs() < 1e-15);
            assert!(excess(1.1, p) > 0.0 && excess(0.9, p) > 0.0);
        }
    }

    #[test]
    fn l1_soft_threshold() {
        let r = equivalence_oracle(1.0, 0.3, &toy, &GridSpec::default(), 0.05).unwrap();
        assert_eq!(r.status, OracleStatus::Pass, "{r:?}");
        assert!((r.argmin_w - 0.7).abs() < 1e-9);
    }

    #[test]
    fn strong_l1_gives_zero() {
        let r = equivalence_oracle(1.0, 1.5, &toy, &GridSpec::default(), 0.05).unwrap();
        assert_eq!(r.status, OracleStatus::Pass, "{r:?}");
        assert_eq!(r.argmin_w, 0.0);
        assert_eq!(r.argmin_w_extended, 0.0);
    }

    #[test]
    fn coarse_tolerance_is_inconclusive() {
        let r = equivalence_oracle(0.5, 1.5, &toy, &GridSpec::default(), 1e-6).unwrap();
        assert_eq!(r.status, OracleStatus::Inconclusive);
    }

    #[test]
    fn rejects_small_grids() {
        let g = GridSpec {
            w_points: 10,
            ..GridSpec::default()
        };
        assert!(equivalence_oracle(1.0, 0.3, &toy, &g, 0.05).is_err());
    }
}
