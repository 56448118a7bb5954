//! Analytic gradients of every model against central finite differences, and
//! Lipschitz constants against an independent eigen-solver.

use nalgebra::DMatrix;
use pwd_core::datagen::{gen_gaussian_blobs, gen_sparse_linear};
use pwd_core::models::{
    init_params, Activation, DenseMatrix, DifferentiableLoss, InitScheme, LinRegLoss, LogRegLoss, MlpModel,
    MlpObjective, QuadraticLoss, ToyLoss,
};
use pwd_core::verification::grad_check_loss;
use pwd_core::Rng;

const POINTS: usize = 100;
const H: f64 = 1e-6;
const TOL: f64 = 1e-5;

fn random_point(rng: &mut Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d).map(|_| scale * rng.gaussian()).collect()
}

fn check_many(loss: &dyn DifferentiableLoss, seed: u64, scale: f64) -> f64 {
    let mut rng = Rng::new(seed);
    (0..POINTS)
        .map(|_| grad_check_loss(loss, &random_point(&mut rng, loss.dim(), scale), H).unwrap())
        .fold(0.0, f64::max)
}

fn random_spd(rng: &mut Rng, d: usize) -> DenseMatrix {
    let m: Vec<f64> = (0..d * d).map(|_| rng.gaussian()).collect();
    let mut a = DenseMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let v: f64 = (0..d).map(|k| m[k * d + i] * m[k * d + j]).sum::<f64>() / d as f64;
            a.set(i, j, v + if i == j { 0.1 } else { 0.0 });
        }
    }
    a
}

fn to_nalgebra(a: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.rows(), a.cols(), a.data())
}

#[test]
fn toy_gradient() {
    assert!(check_many(&ToyLoss, 1, 3.0) < TOL);
}

#[test]
fn quadratic_gradient() {
    let mut rng = Rng::new(2);
    let a = random_spd(&mut rng, 6);
    let b = random_point(&mut rng, 6, 1.0);
    let q = QuadraticLoss::new(a, b).unwrap();
    assert!(check_many(&q, 3, 2.0) < TOL);
}

#[test]
fn linreg_gradient() {
    let set = gen_sparse_linear(40, 8, 3, 0.1, 4).unwrap();
    let l = LinRegLoss::new(set.x, set.y).unwrap();
    assert!(check_many(&l, 5, 1.0) < TOL);
}

#[test]
fn logreg_gradient() {
    let set = gen_gaussian_blobs(60, 2, 1.5, 1.0, 6).unwrap();
    let labels: Vec<u8> = set.labels.iter().map(|&l| l as u8).collect();
    let l = LogRegLoss::new(set.x, &labels).unwrap();
    assert!(check_many(&l, 7, 1.0) < TOL);
}

#[test]
fn mlp_gradient_2_8_2() {
    let set = gen_gaussian_blobs(16, 2, 2.0, 1.0, 8).unwrap();
    let model = MlpModel::new(vec![2, 8, 2], Activation::Tanh).unwrap();
    let template = init_params(&model, &mut Rng::new(9), InitScheme::LecunNormal);
    let obj = MlpObjective {
        model,
        template,
        batch: set.x,
        labels: set.labels,
    };
    assert!(check_many(&obj, 10, 0.7) < TOL);
}

#[test]
fn mlp_gradient_relu_deep() {
    let set = gen_gaussian_blobs(16, 4, 2.0, 1.0, 11).unwrap();
    let model = MlpModel::new(vec![2, 6, 5, 4], Activation::Relu).unwrap();
    let template = init_params(&model, &mut Rng::new(12), InitScheme::LecunNormal);
    let obj = MlpObjective {
        model,
        template,
        batch: set.x,
        labels: set.labels,
    };
    // ReLU kinks are measure-zero; random points avoid them almost surely.
    let mut rng = Rng::new(13);
    for _ in 0..20 {
        let w = random_point(&mut rng, obj.dim(), 0.7);
        assert!(grad_check_loss(&obj, &w, H).unwrap() < TOL);
    }
}

#[test]
fn quadratic_lipschitz_matches_eigensolver() {
    let mut rng = Rng::new(14);
    for d in [1, 3, 7, 10] {
        let a = random_spd(&mut rng, d);
        let expect = to_nalgebra(&a).symmetric_eigen().eigenvalues.max();
        let q = QuadraticLoss::new(a, vec![0.0; d]).unwrap();
        let l = q.lipschitz().unwrap();
        assert!((l - expect).abs() <= 1e-9 * expect, "d={d}: {l} vs {expect}");
    }
}

#[test]
fn quadratic_gradient_is_lipschitz() {
    let mut rng = Rng::new(15);
    let a = random_spd(&mut rng, 5);
    let q = QuadraticLoss::new(a, random_point(&mut rng, 5, 1.0)).unwrap();
    let l = q.lipschitz().unwrap();
    for _ in 0..200 {
        let w = random_point(&mut rng, 5, 3.0);
        let v = random_point(&mut rng, 5, 3.0);
        let gw = q.loss_and_grad(&w).unwrap().1;
        let gv = q.loss_and_grad(&v).unwrap().1;
        let dg: f64 = gw.iter().zip(gv.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let dx: f64 = w.iter().zip(&v).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(dg <= l * dx * (1.0 + 1e-9));
    }
}

#[test]
fn linreg_lipschitz_matches_eigensolver() {
    let set = gen_sparse_linear(30, 6, 2, 0.0, 16).unwrap();
    let x = to_nalgebra(&set.x);
    let expect = (x.transpose() * &x).symmetric_eigen().eigenvalues.max() / 30.0;
    let l = LinRegLoss::new(set.x, set.y).unwrap().lipschitz().unwrap();
    assert!((l - expect).abs() <= 1e-9 * expect);
}

#[test]
fn noiseless_least_squares_recovers_truth() {
    let set = gen_sparse_linear(200, 10, 4, 0.0, 17).unwrap();
    let x = to_nalgebra(&set.x);
    let y = nalgebra::DVector::from_column_slice(&set.y);
    let w = (x.transpose() * &x).cholesky().unwrap().solve(&(x.transpose() * y));
    for (a, b) in w.iter().zip(&set.w_true) {
        assert!((a - b).abs() < 1e-8);
    }
}
