use statrs::function::gamma::ln_gamma;

use super::unfold::UnfoldedSpectrum;
use crate::error::{Error, Result};

/// Upper spacing cutoff used by [`nnsd`].
pub const DEFAULT_NNSD_RANGE: f64 = 5.0;

/// Normalized histogram: `Σ density · width = 1` over the in-range samples.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramData {
    pub bin_edges: Vec<f64>,
    pub densities: Vec<f64>,
    /// Samples that fell inside the histogram range.
    pub sample_count: usize,
}

impl HistogramData {
    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn bins(&self) -> usize {
        self.densities.len()
    }

    /// Largest absolute difference from `f` evaluated at bin centers.
    pub fn sup_distance(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.centers().iter().zip(&self.densities).map(|(&x, &d)| (d - f(x)).abs()).fold(0.0, f64::max)
    }

    /// Largest absolute bin-wise difference between two histograms on the same bins.
    pub fn sup_distance_to(&self, other: &HistogramData) -> Result<f64> {
        if self.bin_edges != other.bin_edges {
            return Err(Error::Argument("histograms use different bins".into()));
        }
        Ok(self.densities.iter().zip(&other.densities).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

/// Histogram of `values` on `[lo, hi]` with equal-width bins; the upper edge
/// is inclusive, values outside the range are ignored.
pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Result<HistogramData> {
    if bins == 0 || !(hi > lo) {
        return Err(Error::Argument(format!("invalid histogram range [{lo}, {hi}] with {bins} bins")));
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        if !(v >= lo && v <= hi) {
            continue;
        }
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let total: usize = counts.iter().sum();
    let densities = counts
        .iter()
        .map(|&c| if total == 0 { 0.0 } else { c as f64 / (total as f64 * width) })
        .collect();
    let bin_edges = (0..=bins).map(|k| lo + k as f64 * width).collect();
    Ok(HistogramData { bin_edges, densities, sample_count: total })
}

/// Nearest-neighbour spacing distribution on `[0, 5]`.
pub fn nnsd(u: &UnfoldedSpectrum, bins: usize) -> Result<HistogramData> {
    nnsd_with_range(u, bins, DEFAULT_NNSD_RANGE)
}

pub fn nnsd_with_range(u: &UnfoldedSpectrum, bins: usize, s_max: f64) -> Result<HistogramData> {
    if u.len() < 100 {
        return Err(Error::InsufficientData(format!("spacing histogram needs 100 levels, got {}", u.len())));
    }
    histogram(&u.spacings(), 0.0, s_max, bins)
}

/// Consecutive-spacing ratios `min(s_i, s_{i+1}) / max(s_i, s_{i+1})`.
///
/// A pair of zero spacings yields `r = 0`.
pub fn spacing_ratios(evals: &[f64]) -> Result<Vec<f64>> {
    if evals.len() < 3 {
        return Err(Error::Argument(format!("spacing ratios need 3 levels, got {}", evals.len())));
    }
    Ok(evals
        .windows(3)
        .map(|w| {
            let a = w[1] - w[0];
            let b = w[2] - w[1];
            let hi = a.max(b);
            if hi > 0.0 {
                a.min(b) / hi
            } else {
                0.0
            }
        })
        .collect())
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Level number variance Σ²(l) for each window length in `l_grid`.
///
/// Windows of length `l` slide across the unfolded levels in steps of `l/4`.
pub fn number_variance(u: &UnfoldedSpectrum, l_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if l_grid.is_empty() {
        return Err(Error::Argument("empty window-length grid".into()));
    }
    let v = u.values();
    if v.len() < 2 {
        return Err(Error::InsufficientData("number variance needs at least 2 levels".into()));
    }
    let (first, last) = (v[0], v[v.len() - 1]);
    let span = last - first;
    let l_max = l_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if l_grid.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::Argument("window lengths must be positive".into()));
    }
    if l_max > span / 10.0 {
        return Err(Error::InsufficientData(format!(
            "window length {l_max} exceeds a tenth of the unfolded span {span}"
        )));
    }
    let count_below = |x: f64| v.partition_point(|&e| e < x);
    Ok(l_grid
        .iter()
        .map(|&l| {
            let step = l / 4.0;
            let windows = ((span - l) / step).floor() as usize + 1;
            let counts: Vec<f64> = (0..windows)
                .map(|k| {
                    let x = first + k as f64 * step;
                    (count_below(x + l) - count_below(x)) as f64
                })
                .collect();
            let m = mean(&counts);
            let var = counts.iter().map(|c| (c - m).powi(2)).sum::<f64>() / counts.len() as f64;
            (l, var)
        })
        .collect())
}

/// Maximum-likelihood Brody parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct BrodyFit {
    pub gamma: f64,
    /// Normalization `b = Γ((γ+2)/(γ+1))^{γ+1}`.
    pub b: f64,
    pub log_likelihood: f64,
    pub warning: Option<String>,
}

fn brody_b(gamma: f64) -> f64 {
    ((gamma + 1.0) * ln_gamma((gamma + 2.0) / (gamma + 1.0))).exp()
}

fn brody_log_likelihood(spacings: &[f64], gamma: f64) -> f64 {
    let b = brody_b(gamma);
    let base = (gamma + 1.0).ln() + b.ln();
    spacings
        .iter()
        .map(|&s| {
            let log_pow = if s > 0.0 {
                gamma * s.ln()
            } else if gamma == 0.0 {
                0.0
            } else {
                f64::NEG_INFINITY
            };
            base + log_pow - b * s.powf(gamma + 1.0)
        })
        .sum()
}

/// Fits the Brody parameter γ ∈ [0, 1] by bounded golden-section maximization
/// of the likelihood.
pub fn brody_fit(spacings: &[f64]) -> Result<BrodyFit> {
    if spacings.len() < 500 {
        return Err(Error::InsufficientData(format!("Brody fit needs 500 spacings, got {}", spacings.len())));
    }
    if spacings.iter().any(|&s| !(s >= 0.0) || !s.is_finite()) {
        return Err(Error::Argument("spacings must be finite and non-negative".into()));
    }
    let m = mean(spacings);
    if !(0.8..=1.2).contains(&m) {
        return Err(Error::Argument(format!("mean spacing {m} is not close to 1; unfold first")));
    }
    let f = |g: f64| brody_log_likelihood(spacings, g);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-7 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let interior = 0.5 * (a + b);
    let candidates = [(0.0, f(0.0)), (interior, f(interior)), (1.0, f(1.0))];
    let (gamma, ll) = candidates
        .iter()
        .copied()
        .fold((f64::NAN, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });
    let (ll0, ll1) = (candidates[0].1, candidates[2].1);
    let flat = (ll0 - ll1).abs() <= 1e-9 * spacings.len() as f64 && (ll - ll0).abs() <= 1e-9 * spacings.len() as f64;
    let warning = flat.then(|| "likelihood is flat across [0, 1]; gamma is unconstrained".to_string());
    Ok(BrodyFit { gamma, b: brody_b(gamma), log_likelihood: ll, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::poisson_levels;
    use crate::spectral::unfold::unfold;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brody_samples(gamma: f64, n: usize, seed: u64) -> Vec<f64> {
        // inverse CDF of 1 - exp(-b s^{γ+1}), b from the Γ function directly
        let b = statrs::function::gamma::gamma((gamma + 2.0) / (gamma + 1.0)).powf(gamma + 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                (-(1.0 - u).ln() / b).powf(1.0 / (gamma + 1.0))
            })
            .collect()
    }

    #[test]
    fn ratios_basic() {
        let e: Vec<f64> = (0..10).map(f64::from).collect();
        assert!(spacing_ratios(&e).unwrap().iter().all(|&r| r == 1.0));
        assert_eq!(spacing_ratios(&[0.0, 0.0, 0.0]).unwrap(), [0.0]);
        assert_eq!(spacing_ratios(&[0.0, 1.0, 1.0]).unwrap(), [0.0]);
        assert!(spacing_ratios(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn poisson_mean_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = spacing_ratios(&poisson_levels(100_000, &mut rng)).unwrap();
        assert!((mean(&r) - (2.0 * 2f64.ln() - 1.0)).abs() < 0.005);
    }

    #[test]
    fn histogram_normalization() {
        let h = histogram(&[0.1, 0.2, 0.2, 0.9, 1.0, 3.0], 0.0, 1.0, 4).unwrap();
        assert_eq!(h.sample_count, 5);
        let w = 0.25;
        assert!((h.densities.iter().sum::<f64>() * w - 1.0).abs() < 1e-12);
        assert!(histogram(&[1.0], 1.0, 1.0, 3).is_err());
    }

    #[test]
    fn constant_spacing_single_bin() {
        let e: Vec<f64> = (0..500).map(f64::from).collect();
        let u = unfold(&e, 3, 0.0).unwrap();
        let h = nnsd_with_range(&u, 30, 4.0).unwrap();
        let occupied: Vec<usize> = (0..h.bins()).filter(|&k| h.densities[k] > 0.0).collect();
        assert_eq!(occupied.len(), 1);
        let k = occupied[0];
        assert!(h.bin_edges[k] <= 1.0 + 1e-6 && h.bin_edges[k + 1] >= 1.0 - 1e-6);
    }

    #[test]
    fn poisson_nnsd_matches_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = unfold(&poisson_levels(10_000, &mut rng), 5, 0.0).unwrap();
        let h = nnsd(&u, 25).unwrap();
        assert!(h.sup_distance(|s| (-s).exp()) < 0.1);
    }

    #[test]
    fn brody_limits_and_recovery() {
        let poisson = brody_samples(0.0, 100_000, 3);
        assert!(brody_fit(&poisson).unwrap().gamma <= 0.05);
        let wigner = brody_samples(1.0, 100_000, 4);
        assert!(brody_fit(&wigner).unwrap().gamma >= 0.95);
        let mid = brody_samples(0.5, 100_000, 5);
        assert!((brody_fit(&mid).unwrap().gamma - 0.5).abs() <= 0.05);
    }

    #[test]
    fn brody_monotone_in_true_gamma() {
        let fitted: Vec<f64> = [0.0, 0.25, 0.5, 0.75, 1.0]
            .iter()
            .enumerate()
            .map(|(k, &g)| brody_fit(&brody_samples(g, 20_000, 10 + k as u64)).unwrap().gamma)
            .collect();
        assert!(fitted.windows(2).all(|w| w[1] > w[0]), "{fitted:?}");
    }

    #[test]
    fn brody_preconditions() {
        assert!(matches!(brody_fit(&[1.0; 100]), Err(Error::InsufficientData(_))));
        assert!(brody_fit(&[5.0; 600]).is_err());
        let mut s = vec![1.0; 600];
        s[3] = -0.1;
        assert!(brody_fit(&s).is_err());
    }

    #[test]
    fn number_variance_limits() {
        let e: Vec<f64> = (0..2000).map(f64::from).collect();
        let u = unfold(&e, 3, 0.0).unwrap();
        let grid: Vec<f64> = (1..=20).map(|k| k as f64 * 0.7).collect();
        for (_, v) in number_variance(&u, &grid).unwrap() {
            assert!(v <= 0.25 + 1e-12);
        }
        assert!(number_variance(&u, &[]).is_err());
        assert!(number_variance(&u, &[500.0]).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = unfold(&poisson_levels(100_000, &mut rng), 5, 0.0).unwrap();
        let grid: Vec<f64> = (1..=20).map(f64::from).collect();
        for (l, v) in number_variance(&u, &grid).unwrap() {
            assert!((v / l - 1.0).abs() < 0.1, "l={l} var={v}");
        }
    }
}
