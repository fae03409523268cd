//! Per-sweep-point computations shared by the table writers and the acceptance suite.

use std::cell::OnceCell;

use ethspec::basis::{boson_basis, spin_basis};
use ethspec::entanglement::{mean_entropy_curve, mid_spectrum_indices, EntropyCurve};
use ethspec::eth::{
    diagonal_profile, gaussianity_ratio, offdiag_histogram, offdiag_window, variance_profile, DiagonalProfile,
    VarianceProfile,
};
use ethspec::linalg::{eigh, fit_gaussian_mixture, to_eigenbasis, EigenbasisObservable, MixtureFit, Spectrum};
use ethspec::models::{build_bose_hubbard, build_obs_bh, build_obs_o, build_obs_t, build_xxz, BoseHubbardParams, XxzParams};
use ethspec::spectral::{
    brody_fit, histogram, log_time_grid, nnsd, number_variance, partition_spectrum, sff, sff_single_realization,
    spacing_ratios, unfold, BrodyFit, HistogramData, SffCurve, UnfoldedSpectrum,
};
use ethspec::submatrix::{
    block_as_hamiltonian, block_magnitude_dump, block_offsets, default_edge_drop, ensemble_nnsd, ensemble_sff,
    ensemble_spacing_ratios, extract_blocks, variance_ratio, BlockUnfolding,
};

use crate::cache::SpectrumCache;
use crate::config::ExperimentConfig;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    T,
    O,
}

impl Observable {
    pub const BOTH: [Observable; 2] = [Observable::T, Observable::O];

    pub fn name(&self) -> &'static str {
        match self {
            Self::T => "T",
            Self::O => "O",
        }
    }
}

fn block_trim(cfg: &ExperimentConfig, dim: usize) -> usize {
    (cfg.analysis.block_trim_frac * dim as f64).round() as usize
}

/// Rejects analyses that cannot run at the configured chain length before
/// any diagonalization starts.
pub fn check_xxz_feasibility(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let l = cfg.xxz.sites;
    let basis = spin_basis(l)?;
    if l % 2 != 0 {
        return Err(CliError::Config(format!("xxz.sites: chain length must be even, got {l}")));
    }
    let dim = basis.dim();
    let a = &cfg.analysis;
    let trim = block_trim(cfg, dim);
    let infeasible = |what: String| Err(CliError::Feasibility(format!("{what} at L={l} (dim {dim})")));
    for (name, size, count) in [
        ("analysis.small_block_*", a.small_block_size, a.small_block_count),
        ("analysis.nnsd_block_*", a.nnsd_block_size, a.nnsd_block_count),
        ("analysis.entropy_block_size", a.entropy_block_size, 1),
        ("analysis.magnitude_block_size", a.magnitude_block_size, 1),
    ] {
        if let Err(e) = block_offsets(dim, size, count, trim) {
            return infeasible(format!("{name}: {e}"));
        }
    }
    for &m in &a.sff_window_sizes {
        if m < 128 || 2 * trim + m > dim {
            return infeasible(format!("analysis.sff_window_sizes: window {m} needs 128 <= M <= dim - 2*trim"));
        }
    }
    if a.nnsd_block_size < 256 {
        return infeasible("analysis.nnsd_block_size: block NNSD needs M >= 256".into());
    }
    if !a.entropy_block_size.is_power_of_two() || a.entropy_block_states > a.entropy_block_size {
        return infeasible("analysis.entropy_block_*: block must be 2^k and hold the requested states".into());
    }
    if a.entropy_states > dim {
        return infeasible(format!("analysis.entropy_states: {} exceeds the spectrum", a.entropy_states));
    }
    if a.offdiag_states > dim / 4 {
        return infeasible(format!("analysis.offdiag_states: {} exceeds dim/4", a.offdiag_states));
    }
    if a.small_block_size < 2 * default_edge_drop(a.small_block_size) + 4 {
        return infeasible("analysis.small_block_size: too small after dropping edge eigenvalues".into());
    }
    let span = dim as f64 * (1.0 - 2.0 * a.trim_frac);
    if a.numvar_l_max > span / 10.0 {
        return infeasible(format!("analysis.numvar_l_max: {} exceeds a tenth of the unfolded span", a.numvar_l_max));
    }
    Ok(())
}

/// One point of the field sweep: spectrum plus lazily rotated observables.
pub struct XxzPoint {
    pub field: f64,
    pub sites: usize,
    pub spectrum: Spectrum,
    /// Eigendecompositions performed (not read from the cache) for this point.
    pub diagonalizations: usize,
    t: OnceCell<EigenbasisObservable>,
    o: OnceCell<EigenbasisObservable>,
}

impl XxzPoint {
    pub fn compute(cfg: &ExperimentConfig, field: f64, cache: &SpectrumCache) -> Result<Self, CliError> {
        let params = XxzParams { sites: cfg.xxz.sites, coupling: cfg.xxz.coupling, anisotropy: cfg.xxz.anisotropy, field };
        let basis = spin_basis(params.sites)?;
        let key = format!("xxz L={} J={:?} Delta={:?} h={:?}", params.sites, params.coupling, params.anisotropy, field);
        let mut diagonalizations = 0;
        let spectrum = cache.get_or_compute(&key, || {
            diagonalizations += 1;
            let h = build_xxz(&params, &basis)?;
            Ok(eigh(&h)?)
        })?;
        Ok(Self { field, sites: params.sites, spectrum, diagonalizations, t: OnceCell::new(), o: OnceCell::new() })
    }

    pub fn evals(&self) -> &[f64] {
        self.spectrum.evals()
    }

    pub fn observable(&self, which: Observable) -> Result<&EigenbasisObservable, CliError> {
        let cell = match which {
            Observable::T => &self.t,
            Observable::O => &self.o,
        };
        if let Some(z) = cell.get() {
            return Ok(z);
        }
        let basis = spin_basis(self.sites)?;
        let op = match which {
            Observable::T => build_obs_t(&basis)?,
            Observable::O => build_obs_o(&basis)?,
        };
        let rotated = to_eigenbasis(&op, &self.spectrum)?;
        Ok(cell.get_or_init(|| rotated))
    }
}

/// Spacing ratios of the raw levels with `trim_frac` removed at each edge.
pub fn bulk_ratios(evals: &[f64], trim_frac: f64) -> Result<Vec<f64>, CliError> {
    let cut = (trim_frac * evals.len() as f64).floor() as usize;
    Ok(spacing_ratios(&evals[cut..evals.len() - cut])?)
}

pub fn ratio_histogram(ratios: &[f64], bins: usize) -> Result<HistogramData, CliError> {
    Ok(histogram(ratios, 0.0, 1.0, bins)?)
}

pub struct SpectrumAnalysis {
    pub unfolded: UnfoldedSpectrum,
    pub nnsd: HistogramData,
    pub number_variance: Vec<(f64, f64)>,
    pub brody: BrodyFit,
    pub ratios: Vec<f64>,
}

pub fn analyze_spectrum(cfg: &ExperimentConfig, evals: &[f64]) -> Result<SpectrumAnalysis, CliError> {
    let a = &cfg.analysis;
    let unfolded = unfold(evals, a.poly_degree, a.trim_frac)?;
    let nnsd = nnsd(&unfolded, a.nnsd_bins)?;
    let number_variance = number_variance(&unfolded, &cfg.numvar_grid())?;
    let brody = brody_fit(&unfolded.spacings())?;
    let ratios = bulk_ratios(evals, a.trim_frac)?;
    Ok(SpectrumAnalysis { unfolded, nnsd, number_variance, brody, ratios })
}

pub struct OffDiagonalAnalysis {
    pub histogram: HistogramData,
    pub single: MixtureFit,
    pub double: MixtureFit,
    pub mean: f64,
    pub stderr: f64,
}

pub struct EthAnalysis {
    pub observable: Observable,
    pub diagonal: DiagonalProfile,
    pub offdiag: OffDiagonalAnalysis,
    pub variance: VarianceProfile,
    pub gaussianity: Vec<(f64, f64)>,
}

pub fn analyze_eth(cfg: &ExperimentConfig, point: &XxzPoint, which: Observable) -> Result<EthAnalysis, CliError> {
    let a = &cfg.analysis;
    let z = point.observable(which)?;
    let window = (a.ebar_window[0], a.ebar_window[1]);
    let diagonal = diagonal_profile(z, a.delta_eps)?;
    let sample = offdiag_window(z, a.offdiag_states)?;
    let n = sample.values.len() as f64;
    let mean = sample.values.iter().sum::<f64>() / n;
    let var = sample.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let offdiag = OffDiagonalAnalysis {
        histogram: offdiag_histogram(&sample.values)?,
        single: fit_gaussian_mixture(&sample.values, 1)?,
        double: fit_gaussian_mixture(&sample.values, 2)?,
        mean,
        stderr: (var / n).sqrt(),
    };
    let variance = variance_profile(z, point.sites, window, a.variance_delta_omega, a.variance_fit_window.resolve())?;
    let gaussianity = gaussianity_ratio(z, window, a.gaussianity_delta_omega)?;
    Ok(EthAnalysis { observable: which, diagonal, offdiag, variance, gaussianity })
}

pub struct SubmatrixAnalysis {
    pub observable: Observable,
    pub ratios: Vec<f64>,
    pub degenerate_blocks: Vec<usize>,
    /// `None` where the off-diagonal variance vanishes.
    pub variance_ratios: Vec<Option<f64>>,
    pub nnsd: HistogramData,
    pub skipped_nnsd_blocks: usize,
    pub magnitude: Vec<Vec<f64>>,
}

pub fn analyze_submatrix(cfg: &ExperimentConfig, point: &XxzPoint, which: Observable) -> Result<SubmatrixAnalysis, CliError> {
    let a = &cfg.analysis;
    let z = point.observable(which)?;
    let trim = block_trim(cfg, z.dim());
    let small = extract_blocks(z, a.small_block_size, a.small_block_count, trim)?;
    let pool = ensemble_spacing_ratios(&small, default_edge_drop(a.small_block_size))?;
    let variance_ratios = small.blocks.iter().map(variance_ratio).collect::<Result<Vec<_>, _>>()?;
    drop(small);
    let large = extract_blocks(z, a.nnsd_block_size, a.nnsd_block_count, trim)?;
    let unfolding = BlockUnfolding { poly_degree: a.poly_degree, trim_frac: a.trim_frac };
    let (nnsd, skipped) = ensemble_nnsd(&large, unfolding, a.nnsd_bins)?;
    drop(large);
    let central = extract_blocks(z, a.magnitude_block_size, 1, 0)?;
    Ok(SubmatrixAnalysis {
        observable: which,
        ratios: pool.ratios,
        degenerate_blocks: pool.degenerate_blocks,
        variance_ratios,
        nnsd,
        skipped_nnsd_blocks: skipped.len(),
        magnitude: block_magnitude_dump(&central, 0)?,
    })
}

pub struct SffEntry {
    /// `hamiltonian`, `T` or `O`.
    pub source: String,
    /// Configured window or block size, before any unfolding trim.
    pub size: usize,
    pub curve: SffCurve,
    pub skipped: usize,
}

pub struct SffAnalysis {
    pub entries: Vec<SffEntry>,
    pub single_raw: SffCurve,
    pub single_smoothed: SffCurve,
}

pub fn time_grid(cfg: &ExperimentConfig) -> Result<Vec<f64>, CliError> {
    let a = &cfg.analysis;
    Ok(log_time_grid(a.sff_t_min, a.sff_t_max, a.sff_points)?)
}

/// Windows of the Hamiltonian spectrum unfolded one by one without trimming.
pub fn hamiltonian_window_sff(cfg: &ExperimentConfig, evals: &[f64], size: usize, times: &[f64]) -> Result<SffEntry, CliError> {
    let mut windows = Vec::new();
    let mut skipped = 0;
    for w in partition_spectrum(evals, size)? {
        match unfold(&w, cfg.analysis.poly_degree, 0.0) {
            Ok(u) => windows.push(u.into_values()),
            Err(ethspec::Error::Unfolding(_)) => skipped += 1,
            Err(e) => return Err(e.into()),
        }
    }
    if windows.is_empty() {
        return Err(CliError::Computation(ethspec::Error::Unfolding(format!("no window of {size} levels unfolds"))));
    }
    Ok(SffEntry { source: "hamiltonian".into(), size, curve: sff(&windows, times)?, skipped })
}

pub fn analyze_sff(cfg: &ExperimentConfig, point: &XxzPoint) -> Result<SffAnalysis, CliError> {
    let a = &cfg.analysis;
    let times = time_grid(cfg)?;
    let mut entries = Vec::new();
    for &m in &a.sff_window_sizes {
        entries.push(hamiltonian_window_sff(cfg, point.evals(), m, &times)?);
        for which in Observable::BOTH {
            let z = point.observable(which)?;
            let trim = block_trim(cfg, z.dim());
            let count = (z.dim() - 2 * trim) / m;
            let ens = extract_blocks(z, m, count.max(1), trim)?;
            // block spectra end in semicircle-like edges that a global polynomial cannot follow
            let unfolding = BlockUnfolding { poly_degree: a.poly_degree, trim_frac: a.trim_frac };
            let (curve, skipped) = ensemble_sff(&ens, unfolding, &times)?;
            entries.push(SffEntry { source: which.name().into(), size: m, curve, skipped: skipped.len() });
        }
    }
    let unfolded = unfold(point.evals(), a.poly_degree, a.trim_frac)?;
    let (single_raw, single_smoothed) = sff_single_realization(unfolded.values(), &times, a.sff_smooth_window)?;
    Ok(SffAnalysis { entries, single_raw, single_smoothed })
}

pub struct EntropyAnalysis {
    pub hamiltonian: EntropyCurve,
    pub blocks: Vec<(Observable, EntropyCurve)>,
}

pub fn hamiltonian_entropy(cfg: &ExperimentConfig, point: &XxzPoint) -> Result<EntropyCurve, CliError> {
    let states: Vec<Vec<f64>> = mid_spectrum_indices(point.spectrum.dim(), cfg.analysis.entropy_states)?
        .map(|k| point.spectrum.eigenvector(k))
        .collect();
    Ok(mean_entropy_curve(&states, point.sites)?)
}

pub fn analyze_entropy(cfg: &ExperimentConfig, point: &XxzPoint) -> Result<EntropyAnalysis, CliError> {
    let a = &cfg.analysis;
    let hamiltonian = hamiltonian_entropy(cfg, point)?;
    let mut blocks = Vec::new();
    for which in Observable::BOTH {
        let z = point.observable(which)?;
        let central = extract_blocks(z, a.entropy_block_size, 1, 0)?;
        let label = format!("{} central block", which.name());
        blocks.push((which, block_as_hamiltonian(&central.blocks[0], a.entropy_block_states, &label)?));
    }
    Ok(EntropyAnalysis { hamiltonian, blocks })
}

pub struct BoseHubbardAnalysis {
    pub interaction: f64,
    pub block_ratios: Vec<f64>,
    pub hamiltonian_ratios: Vec<f64>,
    pub degenerate_blocks: usize,
    pub block_count: usize,
    pub diagonalizations: usize,
}

/// Pools block and Hamiltonian spacing ratios over the disorder realizations at one U/J.
pub fn analyze_bose_hubbard(cfg: &ExperimentConfig, uj: f64, cache: &SpectrumCache) -> Result<BoseHubbardAnalysis, CliError> {
    let bh = &cfg.bose_hubbard;
    let a = &cfg.analysis;
    let basis = boson_basis(bh.sites, bh.particles)?;
    let kind = bh.observable_kind().ok_or_else(|| CliError::Config("bose_hubbard.observable".into()))?;
    let obs = build_obs_bh(&basis, kind)?;
    let dim = basis.dim();
    let trim = block_trim(cfg, dim);
    let count = match a.bh_block_count {
        Some(c) => c,
        None => (dim.saturating_sub(2 * trim) / a.bh_block_size).max(1),
    };
    let mut out = BoseHubbardAnalysis {
        interaction: uj,
        block_ratios: Vec::new(),
        hamiltonian_ratios: Vec::new(),
        degenerate_blocks: 0,
        block_count: 0,
        diagonalizations: 0,
    };
    for r in 0..cfg.sweep.realizations {
        let mut params = BoseHubbardParams::new(bh.sites, bh.particles, bh.hopping, uj * bh.hopping, cfg.sweep.seed + r as u64);
        params.disorder_bound = bh.disorder_bound;
        let key = format!(
            "bose-hubbard L={} N={} J={:?} U={:?} w={:?} seed={}",
            params.sites, params.particles, params.hopping, params.interaction, params.disorder_bound, params.seed
        );
        let spectrum = cache.get_or_compute(&key, || {
            out.diagonalizations += 1;
            Ok(eigh(&build_bose_hubbard(&params, &basis)?)?)
        })?;
        let z = to_eigenbasis(&obs, &spectrum)?;
        let ens = extract_blocks(&z, a.bh_block_size, count, trim)?;
        let pool = ensemble_spacing_ratios(&ens, default_edge_drop(a.bh_block_size))?;
        out.block_ratios.extend(pool.ratios);
        out.degenerate_blocks += pool.degenerate_blocks.len();
        out.block_count += ens.len();
        out.hamiltonian_ratios.extend(bulk_ratios(spectrum.evals(), a.trim_frac)?);
    }
    Ok(out)
}
