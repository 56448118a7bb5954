use crate::error::{Error, Result};
use crate::models::DifferentiableLoss;
use serde::{Deserialize, Serialize};

/// Regularized stationary point of a 1-D problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint {
    /// Global minimizer of `L(w) + (λ/p)|w|^p` among the candidates.
    pub w_star: f64,
    pub value: f64,
    /// Every stationary point found, `0` included when `p < 1`.
    pub candidates: Vec<f64>,
}

const MAX_DOUBLINGS: u32 = 60;
const SCAN_POINTS: usize = 20_000;

fn objective(loss: &dyn Fn(f64) -> (f64, f64), p: f64, lambda: f64, w: f64) -> f64 {
    loss(w).0 + lambda / p * w.abs().powf(p)
}

/// Derivative of the regularized objective for `w ≠ 0`.
fn reg_grad(loss: &dyn Fn(f64) -> (f64, f64), p: f64, lambda: f64, w: f64) -> f64 {
    loss(w).1 + lambda * w.signum() * w.abs().powf(p - 1.0)
}

/// Bisection for a sign change of `g` on `[lo, hi]` with `g(lo) < 0 < g(hi)`
/// (or the reverse).
fn bisect(g: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let neg_lo = g(lo) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        if (g(mid) < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Radius beyond which `L'` is positive to the right and negative to the left.
fn coercive_radius(loss: &dyn Fn(f64) -> (f64, f64)) -> Result<f64> {
    let mut r = 1.0f64;
    for _ in 0..MAX_DOUBLINGS {
        if loss(r).1 > 0.0 && loss(-r).1 < 0.0 {
            return Ok(r);
        }
        r *= 2.0;
    }
    Err(Error::Evaluation("loss is not coercive; no bracket found".into()))
}

/// Regularized stationary point for a convex 1-D loss, given as
/// `w -> (L(w), L'(w))`.
///
/// For `p ≥ 1` the objective is convex and its unique minimizer is found by
/// bisection on the (sub)derivative. For `p < 1` every interior root of
/// `L'(w) + λ sign(w)|w|^(p-1)` is located by a dense log-spaced scan plus
/// bisection, and the best of those and `w = 0` is returned.
pub fn stationary_point_oracle(
    loss: &dyn Fn(f64) -> (f64, f64),
    p: f64,
    lambda_p: f64,
) -> Result<StationaryPoint> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(Error::Domain(format!("p = {p} outside (0, 2]")));
    }
    if !(lambda_p >= 0.0 && lambda_p.is_finite()) {
        return Err(Error::Domain(format!("lambda_p = {lambda_p} must be >= 0")));
    }
    let g = |w: f64| reg_grad(loss, p, lambda_p, w);
    let d0 = loss(0.0).1;

    let candidates = if p >= 1.0 || lambda_p == 0.0 {
        // Subdifferential at zero is d0 + [-λ, λ] for p = 1 and {d0} for p > 1.
        let kink = if p == 1.0 { lambda_p } else { 0.0 };
        if d0.abs() <= kink {
            vec![0.0]
        } else {
            let mut r = 1.0f64;
            let mut found = None;
            for _ in 0..MAX_DOUBLINGS {
                let (lo, hi) = if d0 < 0.0 { (0.0, r) } else { (-r, 0.0) };
                let (glo, ghi) = if d0 < 0.0 { (d0 + kink, g(hi)) } else { (g(lo), d0 - kink) };
                if glo < 0.0 && ghi > 0.0 {
                    found = Some(bisect(&g_zero_safe(&g, d0 + kink, d0 - kink), lo, hi));
                    break;
                }
                r *= 2.0;
            }
            vec![found.ok_or_else(|| Error::Evaluation("no bracket for the stationary point".into()))?]
        }
    } else {
        let r = coercive_radius(loss)?;
        let mut c = vec![0.0];
        for side in [1.0f64, -1.0] {
            // On each half-line the gradient starts at +∞ (in the outward direction).
            let h = |t: f64| side * g(side * t);
            let ratio = (1e-15f64).powf(1.0 / (SCAN_POINTS - 1) as f64);
            let mut prev_t = r;
            let mut prev = h(prev_t);
            for k in 1..SCAN_POINTS {
                let t = r * ratio.powi(k as i32);
                let v = h(t);
                if (v < 0.0) != (prev < 0.0) {
                    c.push(side * bisect(&h, t, prev_t));
                }
                prev_t = t;
                prev = v;
            }
        }
        c
    };

    let (w_star, value) = candidates
        .iter()
        .map(|&w| (w, objective(loss, p, lambda_p, w)))
        .fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    Ok(StationaryPoint {
        w_star,
        value,
        candidates,
    })
}

/// Replaces the value at exactly zero by a one-sided limit so bisection does
/// not see the kink.
fn g_zero_safe<'a>(g: &'a dyn Fn(f64) -> f64, right: f64, left: f64) -> impl Fn(f64) -> f64 + 'a {
    move |w| {
        if w == 0.0 {
            if right < 0.0 {
                right
            } else {
                left
            }
        } else {
            g(w)
        }
    }
}

/// Cyclic coordinate minimization of `L(w) + (λ/p)‖w‖_p^p` for small `d`, each
/// coordinate solved exactly by [`stationary_point_oracle`]. Stops when a full
/// sweep moves no coordinate by more than `tol`.
pub fn stationary_point_nd(
    loss: &dyn DifferentiableLoss,
    p: f64,
    lambda_p: f64,
    w0: &[f64],
    tol: f64,
    max_sweeps: usize,
) -> Result<Vec<f64>> {
    let d = loss.dim();
    if d > 5 {
        return Err(Error::Config(format!("dense oracle limited to d <= 5, got {d}")));
    }
    crate::error::check_len(d, w0.len())?;
    let mut w = w0.to_vec();
    for _ in 0..max_sweeps {
        let mut moved = 0.0f64;
        for i in 0..d {
            let base = w.clone();
            let f = |t: f64| {
                let mut v = base.clone();
                v[i] = t;
                match loss.loss_and_grad(&v) {
                    Ok((l, g)) => (l, g[i]),
                    Err(_) => (f64::NAN, f64::NAN),
                }
            };
            let sp = stationary_point_oracle(&f, p, lambda_p)?;
            moved = moved.max((sp.w_star - w[i]).abs());
            w[i] = sp.w_star;
        }
        if moved <= tol {
            return Ok(w);
        }
    }
    Err(Error::Evaluation(format!("coordinate search did not settle in {max_sweeps} sweeps")))
}
