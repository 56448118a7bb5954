//! Seeded synthetic datasets.
//!
//! [`gen_sparse_linear`] builds regression problems with a known sparse ground
//! truth; [`gen_gaussian_blobs`] builds 2-D multi-class clusters. Both are fully
//! determined by their seed.

use crate::error::{Error, Result};
use crate::models::DenseMatrix;
use crate::rng::Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// `y = X w_true + ε` with a `k`-sparse `w_true`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionSet {
    pub x: DenseMatrix,
    pub y: Vec<f64>,
    pub w_true: Vec<f64>,
    pub noise_std: f64,
}

impl RegressionSet {
    /// Indices of the nonzero ground-truth coordinates, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.w_true.len()).filter(|&i| self.w_true[i] != 0.0).collect()
    }

    /// Splits off the first `n_first` samples.
    pub fn split(&self, n_first: usize) -> (RegressionSet, RegressionSet) {
        let n = self.y.len();
        let n_first = n_first.min(n);
        let a: Vec<usize> = (0..n_first).collect();
        let b: Vec<usize> = (n_first..n).collect();
        (self.subset(&a), self.subset(&b))
    }

    fn subset(&self, idx: &[usize]) -> RegressionSet {
        RegressionSet {
            x: self.x.select_rows(idx),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            w_true: self.w_true.clone(),
            noise_std: self.noise_std,
        }
    }

    /// CSV with columns `x0..x{d-1},y`.
    pub fn to_csv(&self) -> String {
        let d = self.x.cols();
        let mut out = String::new();
        for j in 0..d {
            let _ = write!(out, "x{j},");
        }
        out.push_str("y\n");
        for (r, y) in self.y.iter().enumerate() {
            for v in self.x.row(r) {
                let _ = write!(out, "{v},");
            }
            let _ = writeln!(out, "{y}");
        }
        out
    }
}

/// Points in the plane with integer class labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationSet {
    pub x: DenseMatrix,
    pub labels: Vec<usize>,
    pub means: Vec<[f64; 2]>,
    pub std: f64,
}

impl ClassificationSet {
    pub fn classes(&self) -> usize {
        self.means.len()
    }

    /// Splits off the first `n_first` samples. Labels cycle through the classes,
    /// so both parts stay balanced.
    pub fn split(&self, n_first: usize) -> (ClassificationSet, ClassificationSet) {
        let n = self.labels.len();
        let n_first = n_first.min(n);
        let a: Vec<usize> = (0..n_first).collect();
        let b: Vec<usize> = (n_first..n).collect();
        (self.subset(&a), self.subset(&b))
    }

    pub fn subset(&self, idx: &[usize]) -> ClassificationSet {
        ClassificationSet {
            x: self.x.select_rows(idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            means: self.means.clone(),
            std: self.std,
        }
    }

    /// CSV with columns `x0,x1,label`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x0,x1,label\n");
        for (r, l) in self.labels.iter().enumerate() {
            let row = self.x.row(r);
            let _ = writeln!(out, "{},{},{l}", row[0], row[1]);
        }
        out
    }
}

/// Sparse-ground-truth regression.
///
/// The support is a uniformly random `k`-subset of `0..d`; each nonzero entry
/// has magnitude uniform in `[0.5, 1.5]` and a random sign. Features are i.i.d.
/// standard normal.
pub fn gen_sparse_linear(n: usize, d: usize, k: usize, noise_std: f64, seed: u64) -> Result<RegressionSet> {
    if k > d {
        return Err(Error::Config(format!("support size {k} exceeds dimension {d}")));
    }
    if n == 0 {
        return Err(Error::Config("need at least one sample".into()));
    }
    if !(noise_std >= 0.0 && noise_std.is_finite()) {
        return Err(Error::Config(format!("noise std {noise_std} must be >= 0")));
    }
    let mut rng = Rng::new(seed);
    // Partial Fisher-Yates: the first k slots become the support.
    let mut idx: Vec<usize> = (0..d).collect();
    for i in 0..k {
        let j = i + rng.below((d - i) as u64) as usize;
        idx.swap(i, j);
    }
    let mut w_true = vec![0.0; d];
    for &i in &idx[..k] {
        let mag = rng.uniform_range(0.5, 1.5);
        w_true[i] = if rng.uniform() < 0.5 { -mag } else { mag };
    }
    draw_samples(&mut rng, w_true, n, noise_std)
}

fn draw_samples(rng: &mut Rng, w_true: Vec<f64>, n: usize, noise_std: f64) -> Result<RegressionSet> {
    let d = w_true.len();
    let data: Vec<f64> = (0..n * d).map(|_| rng.gaussian()).collect();
    let x = DenseMatrix::new(n, d, data)?;
    let mut y = x.matvec(&w_true);
    if noise_std > 0.0 {
        y.iter_mut().for_each(|v| *v += noise_std * rng.gaussian());
    }
    Ok(RegressionSet {
        x,
        y,
        w_true,
        noise_std,
    })
}

/// Fresh samples `y = X w_true + ε` for an existing ground truth, e.g. a
/// held-out test set.
pub fn gen_linear_samples(w_true: &[f64], n: usize, noise_std: f64, seed: u64) -> Result<RegressionSet> {
    if n == 0 {
        return Err(Error::Config("need at least one sample".into()));
    }
    if !(noise_std >= 0.0 && noise_std.is_finite()) {
        return Err(Error::Config(format!("noise std {noise_std} must be >= 0")));
    }
    draw_samples(&mut Rng::new(seed), w_true.to_vec(), n, noise_std)
}

/// Isotropic Gaussian clusters whose means sit evenly on a circle of radius
/// `separation`. Sample `i` belongs to class `i % classes`.
pub fn gen_gaussian_blobs(n: usize, classes: usize, separation: f64, std: f64, seed: u64) -> Result<ClassificationSet> {
    if classes < 2 {
        return Err(Error::Config(format!("need at least 2 classes, got {classes}")));
    }
    if !(std >= 0.0 && std.is_finite() && separation.is_finite()) {
        return Err(Error::Config("blob std and separation must be finite, std >= 0".into()));
    }
    let means: Vec<[f64; 2]> = (0..classes)
        .map(|c| {
            let th = 2.0 * std::f64::consts::PI * c as f64 / classes as f64;
            [separation * th.cos(), separation * th.sin()]
        })
        .collect();
    let mut rng = Rng::new(seed);
    let mut data = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % classes;
        data.push(means[c][0] + std * rng.gaussian());
        data.push(means[c][1] + std * rng.gaussian());
        labels.push(c);
    }
    Ok(ClassificationSet {
        x: DenseMatrix::new(n, 2, data)?,
        labels,
        means,
        std,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_support_gives_zero_targets() {
        let set = gen_sparse_linear(20, 5, 0, 0.0, 1).unwrap();
        assert!(set.y.iter().all(|&v| v == 0.0));
        assert!(set.support().is_empty());
    }

    #[test]
    fn support_size_and_magnitudes() {
        let set = gen_sparse_linear(10, 50, 5, 0.1, 3).unwrap();
        let s = set.support();
        assert_eq!(s.len(), 5);
        for &i in &s {
            let m = set.w_true[i].abs();
            assert!((0.5..=1.5).contains(&m));
        }
    }

    #[test]
    fn k_greater_than_d_rejected() {
        assert!(gen_sparse_linear(10, 3, 4, 0.0, 0).is_err());
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = gen_sparse_linear(30, 6, 2, 0.5, 9).unwrap();
        let b = gen_sparse_linear(30, 6, 2, 0.5, 9).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        let c = gen_gaussian_blobs(40, 3, 2.0, 0.5, 9).unwrap();
        let d = gen_gaussian_blobs(40, 3, 2.0, 0.5, 9).unwrap();
        assert_eq!(c.to_csv(), d.to_csv());
    }

    #[test]
    fn zero_std_blobs_sit_on_means() {
        let set = gen_gaussian_blobs(12, 4, 3.0, 0.0, 2).unwrap();
        for (r, &l) in set.labels.iter().enumerate() {
            assert_eq!(set.x.row(r), &set.means[l]);
        }
    }

    #[test]
    fn class_counts_balanced() {
        let set = gen_gaussian_blobs(103, 4, 1.0, 1.0, 0).unwrap();
        let mut counts = [0usize; 4];
        set.labels.iter().for_each(|&l| counts[l] += 1);
        let (mn, mx) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
        assert!(mx - mn <= 1);
    }

    #[test]
    fn fresh_samples_share_truth() {
        let set = gen_sparse_linear(10, 6, 2, 0.0, 5).unwrap();
        let test = gen_linear_samples(&set.w_true, 7, 0.0, 6).unwrap();
        assert_eq!(test.w_true, set.w_true);
        assert_eq!(test.y, test.x.matvec(&set.w_true));
    }

    #[test]
    fn csv_header() {
        let set = gen_sparse_linear(2, 3, 1, 0.0, 0).unwrap();
        assert!(set.to_csv().starts_with("x0,x1,x2,y\n"));
        assert_eq!(set.to_csv().lines().count(), 3);
    }
}
