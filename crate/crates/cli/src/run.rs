//! Subcommand driver: sweeps the configured grid and writes one table per family and point.

use std::path::{Path, PathBuf};

use crate::analysis::{
    analyze_bose_hubbard, analyze_entropy, analyze_eth, analyze_spectrum, analyze_sff, analyze_submatrix,
    check_xxz_feasibility, Observable, XxzPoint,
};
use crate::cache::{sha256_hex, SpectrumCache};
use crate::config::{ExperimentConfig, OutputSection};
use crate::error::CliError;
use crate::families;
use crate::table::ResultTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Eth,
    Submatrix,
    Sff,
    Entropy,
    BoseHubbard,
    All,
}

impl Command {
    fn wants(&self, other: Command) -> bool {
        *self == Command::All || *self == other
    }

    fn needs_xxz(&self) -> bool {
        *self != Command::BoseHubbard
    }
}

#[derive(Debug, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    /// Eigendecompositions performed rather than loaded from the cache.
    pub diagonalizations: usize,
}

/// Hash of the canonical config with the output section reset, so that the
/// same experiment written to different directories carries the same id.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let mut c = cfg.clone();
    c.output = OutputSection::default();
    sha256_hex(&c.to_toml())
}

struct Writer<'a> {
    cfg: &'a ExperimentConfig,
    dir: &'a Path,
    hash: String,
    report: RunReport,
}

impl Writer<'_> {
    fn write(&mut self, family: &str, param: &str, value: f64, table: ResultTable) -> Result<(), CliError> {
        let format = self.cfg.output.format;
        let path = self.dir.join(format!("{family}_{param}={value}.{}", format.extension()));
        let table = table
            .meta("family", family)
            .meta(param, value)
            .meta("config_hash", &self.hash)
            .meta("seed", self.cfg.sweep.seed)
            .meta("version", env!("CARGO_PKG_VERSION"));
        table.write(&path, format)?;
        self.report.files.push(path);
        Ok(())
    }
}

pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    if command.needs_xxz() {
        check_xxz_feasibility(cfg)?;
    }
    let dir = cfg.output.dir.as_path();
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let cache = if cfg.output.cache { SpectrumCache::at(dir.join("cache")) } else { SpectrumCache::disabled() };
    let mut w = Writer { cfg, dir, hash: config_hash(cfg), report: RunReport::default() };

    // Points run one after another; each diagonalization is itself multithreaded
    // and holding several dense eigenbases at once would multiply peak memory.
    if command.needs_xxz() {
        for &h in &cfg.sweep.field {
            let point = XxzPoint::compute(cfg, h, &cache)?;
            w.report.diagonalizations += point.diagonalizations;
            xxz_families(command, cfg, &point, &mut w)?;
        }
    }
    if command.wants(Command::BoseHubbard) {
        for &uj in &cfg.sweep.interaction {
            let b = analyze_bose_hubbard(cfg, uj, &cache)?;
            w.report.diagonalizations += b.diagonalizations;
            w.write("fig11_bh_spacing_ratios", "uj", uj, families::bose_hubbard_table(&b, cfg.analysis.ratio_bins)?)?;
        }
    }
    Ok(w.report)
}

fn xxz_families(command: Command, cfg: &ExperimentConfig, point: &XxzPoint, w: &mut Writer) -> Result<(), CliError> {
    let h = point.field;
    let needs_spectrum = command.wants(Command::Spectrum) || command.wants(Command::Submatrix);
    let spectrum = if needs_spectrum { Some(analyze_spectrum(cfg, point.evals())?) } else { None };
    if command.wants(Command::Spectrum) {
        let s = spectrum.as_ref().expect("computed above");
        w.write("fig2a_nnsd", "h", h, families::nnsd_table(s))?;
        w.write("fig2b_numvar", "h", h, families::numvar_table(s))?;
    }
    if command.wants(Command::Eth) {
        let eth = Observable::BOTH.iter().map(|&o| analyze_eth(cfg, point, o)).collect::<Result<Vec<_>, _>>()?;
        w.write("fig3_diagonals", "h", h, families::diagonals_table(&eth))?;
        w.write("fig4_offdiag_hist_and_fits", "h", h, families::offdiag_table(&eth))?;
        w.write("fig5_variance_decay", "h", h, families::variance_table(&eth))?;
        w.write("fig9_gaussianity_ratio", "h", h, families::gaussianity_table(&eth))?;
    }
    if command.wants(Command::Submatrix) {
        let s = spectrum.as_ref().expect("computed above");
        let subs = Observable::BOTH.iter().map(|&o| analyze_submatrix(cfg, point, o)).collect::<Result<Vec<_>, _>>()?;
        let table = families::spacing_ratio_table(&s.ratios, &s.nnsd, &subs, cfg.analysis.ratio_bins)?;
        w.write("fig6_spacing_ratios", "h", h, table)?;
        w.write("fig1b_block_magnitude", "h", h, families::magnitude_table(&subs))?;
    }
    if command.wants(Command::Sff) {
        let s = analyze_sff(cfg, point)?;
        w.write("fig7_sff", "h", h, families::sff_table(&s))?;
        w.write("fig10_sff_single", "h", h, families::sff_single_table(&s))?;
    }
    if command.wants(Command::Entropy) {
        w.write("fig8_entropy", "h", h, families::entropy_table(&analyze_entropy(cfg, point)?))?;
    }
    Ok(())
}
