use faer::linalg::solvers::SolveLstsq;
use faer::Mat;

use crate::error::{Error, Result};

pub const DEFAULT_POLY_DEGREE: usize = 12;
pub const DEFAULT_TRIM_FRAC: f64 = 0.05;

/// Levels mapped through the smooth staircase, unit mean spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct UnfoldedSpectrum {
    values: Vec<f64>,
    trim_frac: f64,
    poly_degree: usize,
}

impl UnfoldedSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn trim_frac(&self) -> f64 {
        self.trim_frac
    }

    pub fn poly_degree(&self) -> usize {
        self.poly_degree
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacings(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn mean_spacing(&self) -> f64 {
        let n = self.values.len();
        (self.values[n - 1] - self.values[0]) / (n - 1) as f64
    }
}

// Legendre polynomials P_0..=P_degree at x ∈ [-1, 1].
fn legendre_row(x: f64, degree: usize, out: &mut [f64]) {
    out[0] = 1.0;
    if degree >= 1 {
        out[1] = x;
    }
    for k in 2..=degree {
        let kf = k as f64;
        out[k] = ((2.0 * kf - 1.0) * x * out[k - 1] - (kf - 1.0) * out[k - 2]) / kf;
    }
}

/// Unfolds `evals` with a least-squares polynomial fit of the staircase
/// function, then drops `trim_frac` of the levels at each edge.
pub fn unfold(evals: &[f64], poly_degree: usize, trim_frac: f64) -> Result<UnfoldedSpectrum> {
    let n = evals.len();
    if n < 50 {
        return Err(Error::InsufficientData(format!("unfolding needs at least 50 levels, got {n}")));
    }
    if !(0.0..0.3).contains(&trim_frac) {
        return Err(Error::Argument(format!("trim fraction {trim_frac} outside [0, 0.3)")));
    }
    if !(3..=20).contains(&poly_degree) {
        return Err(Error::Argument(format!("polynomial degree {poly_degree} outside 3..=20")));
    }
    if evals.iter().any(|e| !e.is_finite()) || evals.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Argument("levels must be finite and ascending".into()));
    }
    let (lo, hi) = (evals[0], evals[n - 1]);
    if hi <= lo {
        return Err(Error::Unfolding("all levels coincide".into()));
    }

    let scale = 2.0 / (hi - lo);
    let mut design = Mat::<f64>::zeros(n, poly_degree + 1);
    let mut row = vec![0.0; poly_degree + 1];
    for (i, &e) in evals.iter().enumerate() {
        legendre_row((e - lo) * scale - 1.0, poly_degree, &mut row);
        for (k, &p) in row.iter().enumerate() {
            design[(i, k)] = p;
        }
    }
    let staircase = Mat::<f64>::from_fn(n, 1, |i, _| i as f64 + 0.5);
    let coeffs = design.qr().solve_lstsq(&staircase);

    let fitted: Vec<f64> = (0..n)
        .map(|i| (0..=poly_degree).map(|k| design[(i, k)] * coeffs[(k, 0)]).sum())
        .collect();

    let cut = (trim_frac * n as f64).floor() as usize;
    let values = fitted[cut..n - cut].to_vec();
    if values.len() < 2 {
        return Err(Error::InsufficientData("trimming left fewer than 2 levels".into()));
    }
    if let Some(k) = values.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::Unfolding(format!(
            "fitted staircase decreases at retained level {} (degree {poly_degree} too high?)",
            k + cut
        )));
    }
    Ok(UnfoldedSpectrum { values, trim_frac, poly_degree })
}
