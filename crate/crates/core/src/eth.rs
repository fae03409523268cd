//! Eigenstate-thermalization diagnostics on observables in the energy eigenbasis.

use crate::error::{Error, Result};
use crate::linalg::{fit_exponential_decay, DecayFit, EigenbasisObservable};
use crate::spectral::{histogram, HistogramData};

pub const DEFAULT_DELTA_EPS: f64 = 0.02;
pub const DEFAULT_PAIR_COUNT: usize = 200;
pub const DEFAULT_EBAR_WINDOW: (f64, f64) = (-0.5, 0.5);
pub const DEFAULT_VARIANCE_DELTA_OMEGA: f64 = 0.05;
pub const DEFAULT_GAUSSIANITY_DELTA_OMEGA: f64 = 0.1;
/// Frequency bins with fewer pairs are dropped.
pub const MIN_BIN_COUNT: usize = 10;
pub const OFFDIAG_HISTOGRAM_BINS: usize = 101;
pub const OFFDIAG_HISTOGRAM_SIGMAS: f64 = 5.0;
/// Lower edge of the large-frequency exponential regime.
pub const DECAY_REGIME_START: f64 = 16.0;

/// `(E − E_min) / (E_max − E_min)`
pub fn normalized_energies(evals: &[f64]) -> Result<Vec<f64>> {
    let (lo, hi) = evals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Argument("normalized energies need two distinct finite levels".into()));
    }
    Ok(evals.iter().map(|e| (e - lo) / (hi - lo)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalProfile {
    pub eps: Vec<f64>,
    pub values: Vec<f64>,
    pub micro_avg: Vec<f64>,
    pub delta_mic: Vec<f64>,
    pub window_halfwidth: f64,
}

/// Microcanonical average and mean absolute deviation of `Z_αα` in a
/// window of half-width `delta_eps` around every eigenstate.
pub fn diagonal_profile(z: &EigenbasisObservable, delta_eps: f64) -> Result<DiagonalProfile> {
    let n = z.dim();
    if n < 100 {
        return Err(Error::InsufficientData(format!("diagonal profile needs dim >= 100, got {n}")));
    }
    if !(delta_eps > 0.0 && delta_eps < 1.0) {
        return Err(Error::Argument(format!("window half-width {delta_eps} outside (0, 1)")));
    }
    let eps = normalized_energies(z.evals())?;
    let values = z.diagonal();
    let mut micro_avg = Vec::with_capacity(n);
    let mut delta_mic = Vec::with_capacity(n);
    let (mut lo, mut hi) = (0usize, 0usize);
    for &e in &eps {
        while eps[lo] < e - delta_eps {
            lo += 1;
        }
        while hi < n && eps[hi] <= e + delta_eps {
            hi += 1;
        }
        let window = &values[lo..hi];
        let avg = window.iter().sum::<f64>() / window.len() as f64;
        micro_avg.push(avg);
        delta_mic.push(window.iter().map(|v| (v - avg).abs()).sum::<f64>() / window.len() as f64);
    }
    Ok(DiagonalProfile { eps, values, micro_avg, delta_mic, window_halfwidth: delta_eps })
}

/// Strict upper-triangle elements among a block of mid-spectrum eigenstates.
#[derive(Debug, Clone, PartialEq)]
pub struct OffDiagonalSample {
    pub values: Vec<f64>,
    pub omega: Vec<f64>,
    pub ebar: Vec<f64>,
    /// Eigenstate index range the sample was drawn from.
    pub states: std::ops::Range<usize>,
}

pub fn offdiag_window(z: &EigenbasisObservable, state_count: usize) -> Result<OffDiagonalSample> {
    let n = z.dim();
    if state_count < 2 || state_count > n / 4 {
        return Err(Error::Argument(format!(
            "off-diagonal window of {state_count} states needs 2 <= count <= dim/4 = {}",
            n / 4
        )));
    }
    let start = n / 2 - state_count / 2;
    let states = start..start + state_count;
    let e = z.evals();
    let cap = state_count * (state_count - 1) / 2;
    let (mut values, mut omega, mut ebar) = (Vec::with_capacity(cap), Vec::with_capacity(cap), Vec::with_capacity(cap));
    for a in states.clone() {
        for b in a + 1..states.end {
            values.push(z.get(a, b));
            omega.push(e[b] - e[a]);
            ebar.push(0.5 * (e[a] + e[b]));
        }
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Computation { label: z.label().into(), reason: "non-finite matrix element".into() });
    }
    Ok(OffDiagonalSample { values, omega, ebar, states })
}

/// Density histogram with 101 symmetric bins spanning ±5 sample deviations.
pub fn offdiag_histogram(values: &[f64]) -> Result<HistogramData> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    if !(sd > 0.0) {
        return Err(Error::DegenerateFit("off-diagonal sample has zero spread".into()));
    }
    let half = OFFDIAG_HISTOGRAM_SIGMAS * sd;
    histogram(values, -half, half, OFFDIAG_HISTOGRAM_BINS)
}

/// Decay-fit frequency window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitWindow {
    /// `[16, 0.9 ω_max]` when non-empty, else `[0.6 ω_max, 0.9 ω_max]`.
    Auto,
    Explicit(f64, f64),
}

impl FitWindow {
    pub fn resolve(&self, omega_max: f64) -> (f64, f64) {
        match *self {
            Self::Explicit(lo, hi) => (lo, hi),
            Self::Auto if 0.9 * omega_max > DECAY_REGIME_START => (DECAY_REGIME_START, 0.9 * omega_max),
            Self::Auto => (0.6 * omega_max, 0.9 * omega_max),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceProfile {
    /// Bin centers.
    pub omega: Vec<f64>,
    /// `L · D · mean |Z_αβ|²` per bin.
    pub scaled_variance: Vec<f64>,
    pub counts: Vec<usize>,
    pub delta_omega: f64,
    pub decay: DecayFit,
}

struct BinnedPairs {
    sum_abs: Vec<f64>,
    sum_sq: Vec<f64>,
    counts: Vec<usize>,
}

// Accumulates |Z_αβ| and Z_αβ² per ω bin over α < β with Ē inside the window.
fn bin_pairs(z: &EigenbasisObservable, ebar_window: (f64, f64), delta_omega: f64) -> Result<BinnedPairs> {
    if !(delta_omega > 0.0) || !(ebar_window.0 < ebar_window.1) {
        return Err(Error::Argument("invalid frequency bin width or energy window".into()));
    }
    let e = z.evals();
    let m = z.matrix();
    let n = z.dim();
    let mut bins = BinnedPairs { sum_abs: Vec::new(), sum_sq: Vec::new(), counts: Vec::new() };
    let mut any = false;
    for a in 0..n {
        for b in a + 1..n {
            let ebar = 0.5 * (e[a] + e[b]);
            if ebar < ebar_window.0 || ebar > ebar_window.1 {
                continue;
            }
            any = true;
            let k = ((e[b] - e[a]) / delta_omega) as usize;
            if k >= bins.counts.len() {
                bins.sum_abs.resize(k + 1, 0.0);
                bins.sum_sq.resize(k + 1, 0.0);
                bins.counts.resize(k + 1, 0);
            }
            let v = m[(b, a)];
            bins.sum_abs[k] += v.abs();
            bins.sum_sq[k] += v * v;
            bins.counts[k] += 1;
        }
    }
    if !any {
        return Err(Error::InsufficientData(format!(
            "no eigenstate pairs with mean energy in [{}, {}]",
            ebar_window.0, ebar_window.1
        )));
    }
    Ok(bins)
}

/// Frequency-binned off-diagonal variance scaled by `L·D`, with its
/// exponential-decay fit.
pub fn variance_profile(
    z: &EigenbasisObservable,
    sites: usize,
    ebar_window: (f64, f64),
    delta_omega: f64,
    fit: FitWindow,
) -> Result<VarianceProfile> {
    let bins = bin_pairs(z, ebar_window, delta_omega)?;
    let scale = sites as f64 * z.dim() as f64;
    let (mut omega, mut scaled_variance, mut counts) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..bins.counts.len() {
        let c = bins.counts[k];
        if c < MIN_BIN_COUNT || !(bins.sum_sq[k] > 0.0) {
            continue;
        }
        omega.push((k as f64 + 0.5) * delta_omega);
        scaled_variance.push(scale * bins.sum_sq[k] / c as f64);
        counts.push(c);
    }
    let omega_max = omega.last().copied().ok_or_else(|| {
        Error::InsufficientData(format!("no frequency bin reaches {MIN_BIN_COUNT} pairs"))
    })?;
    let decay = fit_exponential_decay(&omega, &scaled_variance, fit.resolve(omega_max))?;
    Ok(VarianceProfile { omega, scaled_variance, counts, delta_omega, decay })
}

/// `mean|Z|² / (mean|Z|)²` per frequency bin; bins under the sample floor are omitted.
pub fn gaussianity_ratio(
    z: &EigenbasisObservable,
    ebar_window: (f64, f64),
    delta_omega: f64,
) -> Result<Vec<(f64, f64)>> {
    let bins = bin_pairs(z, ebar_window, delta_omega)?;
    Ok((0..bins.counts.len())
        .filter(|&k| bins.counts[k] >= MIN_BIN_COUNT && bins.sum_abs[k] > 0.0)
        .map(|k| {
            let c = bins.counts[k] as f64;
            let mean_abs = bins.sum_abs[k] / c;
            ((k as f64 + 0.5) * delta_omega, bins.sum_sq[k] / c / (mean_abs * mean_abs))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh_matrix, to_eigenbasis};
    use crate::models::SymmetricOperator;
    use crate::random::goe_matrix;
    use faer::Mat;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;
    use std::f64::consts::FRAC_PI_2;

    fn observable(matrix: Mat<f64>, evals: Vec<f64>) -> EigenbasisObservable {
        EigenbasisObservable::from_parts(matrix, evals, "z").unwrap()
    }

    fn uniform_levels(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn normalized_examples() {
        assert_eq!(normalized_energies(&[-3.0, 0.0, 1.0]).unwrap(), [0.0, 0.75, 1.0]);
        let e = [0.3, 1.7, 2.2, 9.0];
        let affine: Vec<f64> = e.iter().map(|x| 2.5 * x - 4.0).collect();
        let (a, b) = (normalized_energies(&e).unwrap(), normalized_energies(&affine).unwrap());
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-15));
        assert!(normalized_energies(&[1.0, 1.0]).is_err());
    }

    #[test]
    fn constant_diagonal_is_flat() {
        let z = observable(Mat::from_fn(200, 200, |i, j| if i == j { 0.7 } else { 0.0 }), uniform_levels(200, -1.0, 1.0));
        let p = diagonal_profile(&z, 0.02).unwrap();
        assert!(p.micro_avg.iter().all(|v| (v - 0.7).abs() < 1e-12));
        assert!(p.delta_mic.iter().all(|v| v.abs() < 1e-12));
        assert_eq!((p.eps[0], p.eps[199]), (0.0, 1.0));
    }

    #[test]
    fn linear_ramp_deviation_is_half_window() {
        let n = 2001;
        let evals = uniform_levels(n, 0.0, 1.0);
        let z = observable(Mat::from_fn(n, n, |i, j| if i == j { evals[i] } else { 0.0 }), evals.clone());
        let p = diagonal_profile(&z, 0.02).unwrap();
        for k in (n / 10..9 * n / 10).step_by(97) {
            assert!((p.delta_mic[k] - 0.01).abs() < 3e-4, "{}", p.delta_mic[k]);
        }
    }

    #[test]
    fn alternating_diagonal() {
        let n = 1000;
        let z = observable(
            Mat::from_fn(n, n, |i, j| if i == j { if i % 2 == 0 { 1.0 } else { -1.0 } } else { 0.0 }),
            uniform_levels(n, 0.0, 1.0),
        );
        let p = diagonal_profile(&z, 0.02).unwrap();
        assert!(p.micro_avg[500].abs() < 0.05);
        assert!((p.delta_mic[500] - 1.0).abs() < 0.01);
    }

    #[test]
    fn window_sizes() {
        let z = observable(Mat::from_fn(1000, 1000, |i, j| (i + j) as f64), uniform_levels(1000, 0.0, 1.0));
        assert_eq!(offdiag_window(&z, 2).unwrap().values.len(), 1);
        let w = offdiag_window(&z, 200).unwrap();
        assert_eq!(w.values.len(), 19_900);
        assert_eq!(w.states, 400..600);
        assert!(w.omega.iter().all(|&o| o > 0.0));
        assert!(offdiag_window(&z, 251).is_err());
    }

    #[test]
    fn offdiag_histogram_spans_five_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v: Vec<f64> = (0..20_000).map(|_| rng.sample(StandardNormal)).collect();
        let h = offdiag_histogram(&v).unwrap();
        assert_eq!(h.bins(), 101);
        assert!((h.bin_edges[0] + h.bin_edges[101]).abs() < 1e-12);
        assert!((h.bin_edges[101] - 5.0).abs() < 0.2);
    }

    fn synthetic_decay(n: usize, eta: f64, seed: u64) -> EigenbasisObservable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let evals = uniform_levels(n, -10.0, 10.0);
        let mut m = Mat::<f64>::zeros(n, n);
        for a in 0..n {
            for b in a + 1..n {
                let g: f64 = rng.sample(StandardNormal);
                let v = (-eta * (evals[b] - evals[a]) / 2.0).exp() * g;
                m[(a, b)] = v;
                m[(b, a)] = v;
            }
        }
        observable(m, evals)
    }

    #[test]
    fn synthetic_decay_exponent() {
        let z = synthetic_decay(1500, 0.4, 9);
        let p = variance_profile(&z, 10, DEFAULT_EBAR_WINDOW, 0.05, FitWindow::Explicit(2.0, 12.0)).unwrap();
        assert!((p.decay.eta - 0.4).abs() < 0.04, "{:?}", p.decay);
        assert!(p.counts.iter().all(|&c| c >= MIN_BIN_COUNT));
        assert!(p.scaled_variance.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn constant_offdiagonals_and_scaling() {
        let n = 400;
        let evals = uniform_levels(n, -4.0, 4.0);
        let c = 0.03;
        let z = observable(Mat::from_fn(n, n, |i, j| if i == j { 0.0 } else { c }), evals.clone());
        let p = variance_profile(&z, 8, DEFAULT_EBAR_WINDOW, 0.05, FitWindow::Auto).unwrap();
        let expect = 8.0 * n as f64 * c * c;
        assert!(p.scaled_variance.iter().all(|v| (v - expect).abs() < 1e-12 * expect));
        assert!(p.decay.eta.abs() < 1e-9);

        let base = synthetic_decay(600, 0.3, 2);
        let doubled = observable(Mat::from_fn(600, 600, |i, j| 2.0 * base.get(i, j)), base.evals().to_vec());
        let window = FitWindow::Explicit(1.0, 10.0);
        let a = variance_profile(&base, 6, DEFAULT_EBAR_WINDOW, 0.05, window).unwrap();
        let b = variance_profile(&doubled, 6, DEFAULT_EBAR_WINDOW, 0.05, window).unwrap();
        for (x, y) in a.scaled_variance.iter().zip(&b.scaled_variance) {
            assert!((4.0 * x - y).abs() < 1e-12 * y);
        }
        assert!((a.decay.eta - b.decay.eta).abs() < 1e-9);
    }

    #[test]
    fn empty_energy_window_errors() {
        let z = observable(Mat::from_fn(200, 200, |_, _| 1.0), uniform_levels(200, 5.0, 9.0));
        assert!(matches!(
            variance_profile(&z, 4, DEFAULT_EBAR_WINDOW, 0.05, FitWindow::Auto),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn gaussian_elements_give_half_pi() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 2000;
        let evals = uniform_levels(n, -1.0, 1.0);
        let m = goe_matrix(n, &mut rng);
        let z = observable(m, evals);
        let r = gaussianity_ratio(&z, DEFAULT_EBAR_WINDOW, 0.1).unwrap();
        assert!(!r.is_empty());
        for (w, ratio) in r.iter().filter(|(w, _)| *w < 0.9) {
            assert!((ratio / FRAC_PI_2 - 1.0).abs() < 0.05, "ω={w} R={ratio}");
        }
    }

    #[test]
    fn constant_magnitude_and_suppressed_mixture() {
        let n = 600;
        let evals = uniform_levels(n, -1.0, 1.0);
        let signs = observable(Mat::from_fn(n, n, |i, j| if (i * 7 + j * 7) % 3 == 0 { -0.2 } else { 0.2 }), evals.clone());
        for (_, r) in gaussianity_ratio(&signs, DEFAULT_EBAR_WINDOW, 0.1).unwrap() {
            assert!((r - 1.0).abs() < 1e-12);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut m = Mat::<f64>::zeros(n, n);
        for a in 0..n {
            for b in a + 1..n {
                let g: f64 = rng.sample(StandardNormal);
                let v = if rng.random_bool(0.9) { 0.01 * g } else { g };
                m[(a, b)] = v;
                m[(b, a)] = v;
            }
        }
        let mixed = observable(m, evals);
        for (_, r) in gaussianity_ratio(&mixed, DEFAULT_EBAR_WINDOW, 0.1).unwrap() {
            assert!(r > FRAC_PI_2);
        }
    }

    #[test]
    fn goe_delta_mic_follows_central_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let bulk = |dim: usize, rng: &mut ChaCha8Rng| {
            let h = goe_matrix(dim, rng);
            let spectrum = eigh_matrix(&h, "h").unwrap();
            let obs = SymmetricOperator::new(goe_matrix(dim, rng), "z").unwrap();
            let z = to_eigenbasis(&obs, &spectrum).unwrap();
            let p = diagonal_profile(&z, 0.02).unwrap();
            let mid = &p.delta_mic[dim / 4..3 * dim / 4];
            mid.iter().sum::<f64>() / mid.len() as f64
        };
        let d: Vec<f64> = [256, 512, 1024].iter().map(|&n| bulk(n, &mut rng)).collect();
        for (k, pair) in d.windows(2).enumerate() {
            let ratio = pair[0] / pair[1];
            assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.5, "step {k}: {ratio}");
        }
    }

    proptest! {
        #[test]
        fn ratio_is_scale_free(c in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0], seed in 0u64..50) {
            let base = synthetic_decay(120, 0.2, seed);
            let scaled = observable(Mat::from_fn(120, 120, |i, j| c * base.get(i, j)), base.evals().to_vec());
            let a = gaussianity_ratio(&base, (-5.0, 5.0), 0.5).unwrap();
            let b = gaussianity_ratio(&scaled, (-5.0, 5.0), 0.5).unwrap();
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x.1 - y.1).abs() < 1e-9 * x.1);
            }
        }
    }
}
