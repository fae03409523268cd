//! Experiment configuration, read from TOML with strict key checking.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const FIELD_GRID: [f64; 6] = [0.01, 0.05, 0.1, 0.2, 0.4, 0.7];
pub const INTERACTION_GRID: [f64; 6] = [0.02, 0.08, 0.4, 1.8, 5.0, 9.0];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub xxz: XxzSection,
    pub bose_hubbard: BoseHubbardSection,
    pub sweep: SweepSection,
    pub analysis: AnalysisSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct XxzSection {
    pub sites: usize,
    pub coupling: f64,
    pub anisotropy: f64,
}

impl Default for XxzSection {
    fn default() -> Self {
        Self { sites: 14, coupling: 1.0, anisotropy: std::f64::consts::FRAC_PI_4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoseHubbardSection {
    pub sites: usize,
    pub particles: usize,
    pub hopping: f64,
    pub disorder_bound: f64,
    /// `total`, `half_chain` or `site:<i>`.
    pub observable: String,
}

impl Default for BoseHubbardSection {
    fn default() -> Self {
        Self { sites: 8, particles: 8, hopping: 1.0, disorder_bound: 0.05, observable: "half_chain".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Local field strengths h.
    pub field: Vec<f64>,
    /// Interaction ratios U/J.
    pub interaction: Vec<f64>,
    pub seed: u64,
    /// Disorder realizations pooled per U/J point.
    pub realizations: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { field: FIELD_GRID.to_vec(), interaction: INTERACTION_GRID.to_vec(), seed: 20_240_601, realizations: 1 }
    }
}

/// `"auto"` or an explicit `[lo, hi]` frequency interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FitWindowSpec {
    Named(AutoWindow),
    Explicit([f64; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoWindow {
    Auto,
}

impl FitWindowSpec {
    pub fn resolve(&self) -> ethspec::eth::FitWindow {
        match *self {
            Self::Named(AutoWindow::Auto) => ethspec::eth::FitWindow::Auto,
            Self::Explicit([lo, hi]) => ethspec::eth::FitWindow::Explicit(lo, hi),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub poly_degree: usize,
    pub trim_frac: f64,
    pub nnsd_bins: usize,
    pub numvar_l_min: f64,
    pub numvar_l_max: f64,
    pub numvar_l_step: f64,
    pub delta_eps: f64,
    pub offdiag_states: usize,
    pub ebar_window: [f64; 2],
    pub variance_delta_omega: f64,
    pub gaussianity_delta_omega: f64,
    pub variance_fit_window: FitWindowSpec,
    pub ratio_bins: usize,
    /// Fraction of the spectrum excluded at each edge before placing blocks.
    pub block_trim_frac: f64,
    pub small_block_size: usize,
    pub small_block_count: usize,
    pub nnsd_block_size: usize,
    pub nnsd_block_count: usize,
    pub sff_window_sizes: Vec<usize>,
    pub sff_t_min: f64,
    pub sff_t_max: f64,
    pub sff_points: usize,
    pub sff_smooth_window: usize,
    pub entropy_states: usize,
    pub entropy_block_size: usize,
    pub entropy_block_states: usize,
    pub magnitude_block_size: usize,
    pub bh_block_size: usize,
    /// Omitted: tile the trimmed spectrum without overlap.
    pub bh_block_count: Option<usize>,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            poly_degree: ethspec::spectral::DEFAULT_POLY_DEGREE,
            trim_frac: ethspec::spectral::DEFAULT_TRIM_FRAC,
            nnsd_bins: 50,
            numvar_l_min: 0.5,
            numvar_l_max: 20.0,
            numvar_l_step: 0.5,
            delta_eps: ethspec::eth::DEFAULT_DELTA_EPS,
            offdiag_states: ethspec::eth::DEFAULT_PAIR_COUNT,
            ebar_window: [-0.5, 0.5],
            variance_delta_omega: ethspec::eth::DEFAULT_VARIANCE_DELTA_OMEGA,
            gaussianity_delta_omega: ethspec::eth::DEFAULT_GAUSSIANITY_DELTA_OMEGA,
            variance_fit_window: FitWindowSpec::Named(AutoWindow::Auto),
            ratio_bins: 10,
            block_trim_frac: 0.03,
            small_block_size: 21,
            small_block_count: 700,
            nnsd_block_size: 1024,
            nnsd_block_count: 16,
            sff_window_sizes: vec![512, 1024],
            sff_t_min: ethspec::spectral::DEFAULT_SFF_T_MIN,
            sff_t_max: ethspec::spectral::DEFAULT_SFF_T_MAX,
            sff_points: ethspec::spectral::DEFAULT_SFF_POINTS,
            sff_smooth_window: 11,
            entropy_states: 100,
            entropy_block_size: 1024,
            entropy_block_states: 20,
            magnitude_block_size: 64,
            bh_block_size: 50,
            bh_block_count: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub format: Format,
    /// Keep eigendecompositions under `<dir>/cache` for reuse across runs.
    pub cache: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("results"), format: Format::Csv, cache: true }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Canonical TOML text; the hash of this text identifies a run.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks values that parse but cannot describe an experiment.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |key: &str, why: &str| Err(CliError::Config(format!("{key}: {why}")));
        if self.sweep.field.is_empty() {
            return bad("sweep.field", "sweep list is empty");
        }
        if self.sweep.interaction.is_empty() {
            return bad("sweep.interaction", "sweep list is empty");
        }
        if self.sweep.field.iter().chain(&self.sweep.interaction).any(|v| !v.is_finite()) {
            return bad("sweep", "sweep values must be finite");
        }
        if self.sweep.realizations == 0 {
            return bad("sweep.realizations", "must be at least 1");
        }
        if self.bose_hubbard.observable_kind().is_none() {
            return bad("bose_hubbard.observable", "expected total, half_chain or site:<i>");
        }
        let a = &self.analysis;
        if !(a.numvar_l_min > 0.0 && a.numvar_l_step > 0.0 && a.numvar_l_max >= a.numvar_l_min) {
            return bad("analysis.numvar_l_*", "need 0 < l_min <= l_max and a positive step");
        }
        if !(a.ebar_window[0] < a.ebar_window[1]) {
            return bad("analysis.ebar_window", "lower bound must be below upper bound");
        }
        if !(0.0..0.5).contains(&a.block_trim_frac) {
            return bad("analysis.block_trim_frac", "must lie in [0, 0.5)");
        }
        if a.sff_window_sizes.is_empty() {
            return bad("analysis.sff_window_sizes", "list is empty");
        }
        if a.sff_smooth_window % 2 == 0 {
            return bad("analysis.sff_smooth_window", "must be odd");
        }
        if a.nnsd_bins == 0 || a.ratio_bins == 0 {
            return bad("analysis.*_bins", "bin counts must be positive");
        }
        Ok(())
    }

    pub fn numvar_grid(&self) -> Vec<f64> {
        let a = &self.analysis;
        let steps = ((a.numvar_l_max - a.numvar_l_min) / a.numvar_l_step + 1e-9).floor() as usize;
        (0..=steps).map(|k| a.numvar_l_min + k as f64 * a.numvar_l_step).collect()
    }
}

impl BoseHubbardSection {
    pub fn observable_kind(&self) -> Option<ethspec::models::OccupationObservable> {
        use ethspec::models::OccupationObservable as O;
        match self.observable.as_str() {
            "total" => Some(O::Total),
            "half_chain" => Some(O::HalfChain),
            s => s.strip_prefix("site:").and_then(|i| i.parse().ok()).map(O::Site),
        }
    }
}
