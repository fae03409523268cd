use std::f64::consts::PI;

use crate::error::{Error, Result};

const MAX_EM_ITERATIONS: usize = 500;
const EM_TOLERANCE: f64 = 1e-9;

/// Zero-mean Gaussian mixture fitted by maximum likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureFit {
    /// Component weights, summing to one.
    pub weights: Vec<f64>,
    /// Component widths, ascending.
    pub sigmas: Vec<f64>,
    pub log_likelihood: f64,
    /// `2p - 2 ln L` with p = 1 (one component) or 3 (two components).
    pub aic: f64,
    pub iterations: usize,
    /// Log-likelihood after every EM step, starting from the initial guess.
    pub log_likelihood_trace: Vec<f64>,
}

impl MixtureFit {
    pub fn components(&self) -> usize {
        self.weights.len()
    }

    pub fn density(&self, x: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.sigmas)
            .map(|(w, s)| w * (-0.5 * (x / s).powi(2)).exp() / (s * (2.0 * PI).sqrt()))
            .sum()
    }
}

fn log_normal0(x2: f64, sigma: f64) -> f64 {
    -0.5 * (2.0 * PI).ln() - sigma.ln() - 0.5 * x2 / (sigma * sigma)
}

fn mixture_log_likelihood(x2: &[f64], weights: &[f64], sigmas: &[f64]) -> f64 {
    x2.iter()
        .map(|&v| {
            let terms: Vec<f64> = weights
                .iter()
                .zip(sigmas)
                .map(|(w, s)| w.ln() + log_normal0(v, *s))
                .collect();
            log_sum_exp(&terms)
        })
        .sum()
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Fits a one- or two-component zero-mean Gaussian mixture by EM.
///
/// Iteration stops when the per-sample log-likelihood gains less than 1e-9
/// in a step, or after 500 steps.
pub fn fit_gaussian_mixture(samples: &[f64], components: usize) -> Result<MixtureFit> {
    if components != 1 && components != 2 {
        return Err(Error::Argument(format!("mixture needs 1 or 2 components, got {components}")));
    }
    if samples.len() < 100 {
        return Err(Error::InsufficientData(format!(
            "mixture fit needs at least 100 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::Argument("mixture samples must be finite".into()));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let second_moment = samples.iter().map(|v| v * v).sum::<f64>() / n;
    if var <= f64::MIN_POSITIVE || second_moment <= f64::MIN_POSITIVE {
        return Err(Error::DegenerateFit("all samples identical; width collapses to zero".into()));
    }
    let x2: Vec<f64> = samples.iter().map(|v| v * v).collect();

    if components == 1 {
        let sigma = second_moment.sqrt();
        let ll = mixture_log_likelihood(&x2, &[1.0], &[sigma]);
        return Ok(MixtureFit {
            weights: vec![1.0],
            sigmas: vec![sigma],
            log_likelihood: ll,
            aic: 2.0 - 2.0 * ll,
            iterations: 1,
            log_likelihood_trace: vec![ll],
        });
    }

    let s = var.sqrt();
    let mut weights = [0.5, 0.5];
    let mut sigmas = [0.3 * s, 1.5 * s];
    let mut ll = mixture_log_likelihood(&x2, &weights, &sigmas);
    let mut trace = vec![ll];
    let mut iterations = 0;
    while iterations < MAX_EM_ITERATIONS {
        iterations += 1;
        let mut resp_sum = [0.0; 2];
        let mut resp_x2 = [0.0; 2];
        for &v in &x2 {
            let l0 = weights[0].ln() + log_normal0(v, sigmas[0]);
            let l1 = weights[1].ln() + log_normal0(v, sigmas[1]);
            let norm = log_sum_exp(&[l0, l1]);
            let r0 = (l0 - norm).exp();
            let r1 = (l1 - norm).exp();
            resp_sum[0] += r0;
            resp_sum[1] += r1;
            resp_x2[0] += r0 * v;
            resp_x2[1] += r1 * v;
        }
        for k in 0..2 {
            if resp_sum[k] <= 0.0 || resp_x2[k] <= f64::MIN_POSITIVE {
                return Err(Error::DegenerateFit(format!("mixture component {k} collapsed")));
            }
            weights[k] = resp_sum[k] / n;
            sigmas[k] = (resp_x2[k] / resp_sum[k]).sqrt();
        }
        let next = mixture_log_likelihood(&x2, &weights, &sigmas);
        debug_assert!(next >= ll - 1e-9 * ll.abs().max(1.0), "EM decreased log-likelihood");
        trace.push(next);
        let gain = (next - ll) / n;
        ll = next;
        if gain < EM_TOLERANCE {
            break;
        }
    }
    if sigmas[0] > sigmas[1] {
        sigmas.swap(0, 1);
        weights.swap(0, 1);
    }
    Ok(MixtureFit {
        weights: weights.to_vec(),
        sigmas: sigmas.to_vec(),
        log_likelihood: ll,
        aic: 6.0 - 2.0 * ll,
        iterations,
        log_likelihood_trace: trace,
    })
}

/// Ordinary least-squares line `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::InsufficientData(format!("line fit needs >= 3 paired points, got {}", x.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Argument("line fit abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ok(LineFit {
        slope,
        intercept,
        slope_stderr: (ss_res / (n - 2.0) / sxx).sqrt(),
        residual: (ss_res / n).sqrt(),
    })
}

/// Exponential decay `v(ω) ≈ prefactor · e^{-η ω}` fitted on a frequency window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub eta: f64,
    pub eta_stderr: f64,
    pub prefactor: f64,
    pub fit_window: (f64, f64),
    /// RMS residual of `ln v`.
    pub residual: f64,
    pub points: usize,
}

impl DecayFit {
    pub fn evaluate(&self, omega: f64) -> f64 {
        self.prefactor * (-self.eta * omega).exp()
    }
}

/// Log-linear least squares of `variances` against `omegas` inside `window`.
pub fn fit_exponential_decay(omegas: &[f64], variances: &[f64], window: (f64, f64)) -> Result<DecayFit> {
    if omegas.len() != variances.len() {
        return Err(Error::Argument("omegas and variances differ in length".into()));
    }
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::Argument(format!("empty fit window [{lo}, {hi}]")));
    }
    let (x, v): (Vec<f64>, Vec<f64>) = omegas
        .iter()
        .zip(variances)
        .filter(|(w, _)| **w >= lo && **w <= hi)
        .map(|(w, v)| (*w, *v))
        .unzip();
    if x.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "{} points inside fit window [{lo}, {hi}], need 5",
            x.len()
        )));
    }
    if v.iter().any(|&val| !(val > 0.0)) {
        return Err(Error::Argument("variances must be positive inside the fit window".into()));
    }
    let y: Vec<f64> = v.iter().map(|val| val.ln()).collect();
    let line = fit_line(&x, &y)?;
    Ok(DecayFit {
        eta: -line.slope,
        eta_stderr: line.slope_stderr,
        prefactor: line.intercept.exp(),
        fit_window: window,
        residual: line.residual,
        points: x.len(),
    })
}
