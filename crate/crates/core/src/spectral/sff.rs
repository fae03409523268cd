use crate::error::{Error, Result};
use crate::linalg::{fit_line, LineFit};

pub const DEFAULT_SFF_T_MIN: f64 = 1e-2;
pub const DEFAULT_SFF_T_MAX: f64 = 1e3;
pub const DEFAULT_SFF_POINTS: usize = 400;

/// Ensemble-averaged spectral form factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SffCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Standard deviation across ensemble members at each time.
    pub std_dev: Vec<f64>,
    pub window_size: usize,
    pub window_count: usize,
}

/// `points` logarithmically spaced times from `t_min` to `t_max` inclusive.
pub fn log_time_grid(t_min: f64, t_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min) || points < 2 {
        return Err(Error::Argument(format!("invalid time grid [{t_min}, {t_max}] x {points}")));
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    Ok((0..points).map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp()).collect())
}

fn single_window(levels: &[f64], times: &[f64]) -> Vec<f64> {
    let n = levels.len() as f64;
    times
        .iter()
        .map(|&t| {
            let (mut re, mut im) = (0.0, 0.0);
            for &e in levels {
                let (s, c) = (e * t).sin_cos();
                re += c;
                im += s;
            }
            (re * re + im * im) / n
        })
        .collect()
}

/// `|Σ_m e^{i E_m t}|² / N` per window, averaged over windows.
///
/// Windows are expected to hold unfolded levels and must share one size.
pub fn sff(windows: &[Vec<f64>], times: &[f64]) -> Result<SffCurve> {
    let Some(first) = windows.first() else {
        return Err(Error::Argument("no eigenvalue windows".into()));
    };
    let size = first.len();
    if size == 0 || windows.iter().any(|w| w.len() != size) {
        return Err(Error::Argument("eigenvalue windows must be non-empty and equally sized".into()));
    }
    if times.is_empty() || times.iter().any(|&t| !(t > 0.0)) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument("time grid must be positive and increasing".into()));
    }

    #[cfg(feature = "parallel")]
    let per_window: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        windows.par_iter().map(|w| single_window(w, times)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_window: Vec<Vec<f64>> = windows.iter().map(|w| single_window(w, times)).collect();

    let m = windows.len() as f64;
    let mut values = vec![0.0; times.len()];
    for w in &per_window {
        values.iter_mut().zip(w).for_each(|(acc, v)| *acc += v);
    }
    values.iter_mut().for_each(|v| *v /= m);
    let std_dev = (0..times.len())
        .map(|k| {
            let var = per_window.iter().map(|w| (w[k] - values[k]).powi(2)).sum::<f64>() / m;
            var.sqrt()
        })
        .collect();
    Ok(SffCurve { times: times.to_vec(), values, std_dev, window_size: size, window_count: windows.len() })
}

/// Centered moving average; the window shrinks symmetrically at the ends.
pub fn moving_average(values: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 || window % 2 == 0 {
        return Err(Error::Argument(format!("smoothing window must be odd and positive, got {window}")));
    }
    let half = window / 2;
    let n = values.len();
    Ok((0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            let slice = &values[i - h..=i + h];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect())
}

/// SFF of one unfolded spectrum plus its moving average over the time grid.
pub fn sff_single_realization(levels: &[f64], times: &[f64], smooth_window: usize) -> Result<(SffCurve, SffCurve)> {
    if smooth_window == 0 || smooth_window % 2 == 0 {
        return Err(Error::Argument(format!("smoothing window must be odd and positive, got {smooth_window}")));
    }
    let raw = sff(&[levels.to_vec()], times)?;
    let smoothed_values = moving_average(&raw.values, smooth_window)?;
    let smoothed = SffCurve { values: smoothed_values, ..raw.clone() };
    Ok((raw, smoothed))
}

/// Contiguous equal-size windows, remainder discarded evenly at both edges.
pub fn partition_spectrum(evals: &[f64], window_size: usize) -> Result<Vec<Vec<f64>>> {
    if window_size <= 1 {
        return Err(Error::Argument(format!("window size must exceed 1, got {window_size}")));
    }
    if window_size > evals.len() {
        return Err(Error::Argument(format!("window size {window_size} exceeds {} levels", evals.len())));
    }
    let count = evals.len() / window_size;
    let offset = (evals.len() - count * window_size) / 2;
    Ok((0..count)
        .map(|k| evals[offset + k * window_size..offset + (k + 1) * window_size].to_vec())
        .collect())
}

/// Steepest log-log decade `[t, 10t]` inside `[t_start, t_end]` whose fitted
/// slope is positive and exceeds `sigmas` standard errors.
pub fn detect_ramp(curve: &SffCurve, t_start: f64, t_end: f64, sigmas: f64) -> Option<(f64, LineFit)> {
    let logs: Vec<(f64, f64)> = curve
        .times
        .iter()
        .zip(&curve.values)
        .filter(|(t, v)| **t >= t_start && **t <= t_end && **v > 0.0)
        .map(|(t, v)| (t.log10(), v.log10()))
        .collect();
    let mut best: Option<(f64, LineFit)> = None;
    for i in 0..logs.len() {
        let end = logs[i].0 + 1.0;
        if logs.last().map_or(true, |l| l.0 < end - 1e-12) {
            break;
        }
        let (x, y): (Vec<f64>, Vec<f64>) = logs[i..].iter().take_while(|p| p.0 <= end + 1e-12).copied().unzip();
        let Ok(fit) = fit_line(&x, &y) else { continue };
        if fit.slope > 0.0 && fit.slope > sigmas * fit.slope_stderr && best.as_ref().map_or(true, |b| fit.slope > b.1.slope) {
            best = Some((10f64.powf(logs[i].0), fit));
        }
    }
    best
}
