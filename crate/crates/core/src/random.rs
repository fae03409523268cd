//! Random-matrix and random-state samplers used as reference ensembles.

use faer::Mat;
use rand::Rng;
use rand_distr::StandardNormal;

/// GOE matrix with unit off-diagonal variance and diagonal variance 2.
pub fn goe_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat<f64> {
    let mut m = Mat::<f64>::zeros(n, n);
    for j in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        m[(j, j)] = d * std::f64::consts::SQRT_2;
        for i in j + 1..n {
            let v: f64 = rng.sample(StandardNormal);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// `n` independent uniform levels on `[0, n)`, sorted: unit mean spacing.
pub fn poisson_levels<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * n as f64).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Uniformly random real unit vector.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

/// Random orthogonal matrix (QR of a Gaussian matrix with sign fix).
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat<f64> {
    let g = Mat::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    Mat::from_fn(n, n, |i, j| if r[(j, j)] < 0.0 { -q[(i, j)] } else { q[(i, j)] })
}
