//! Conversion of analysis results into the tables written for each figure family.

use ethspec::entanglement::{page_curve, EntropyCurve};
use ethspec::linalg::MixtureFit;
use ethspec::spectral::{mean, HistogramData, ReferenceCurve, SffCurve};

use crate::analysis::{
    ratio_histogram, BoseHubbardAnalysis, EntropyAnalysis, EthAnalysis, SffAnalysis, SpectrumAnalysis,
    SubmatrixAnalysis,
};
use crate::error::CliError;
use crate::table::ResultTable;

fn repeat(text: &str, n: usize) -> Vec<String> {
    vec![text.to_string(); n]
}

/// Rows of a long-format `source, x, y` table.
#[derive(Default)]
struct Long {
    panel: Vec<String>,
    source: Vec<String>,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Long {
    fn push(&mut self, panel: &str, source: &str, x: f64, y: f64) {
        self.panel.push(panel.into());
        self.source.push(source.into());
        self.x.push(x);
        self.y.push(y);
    }

    fn histogram(&mut self, panel: &str, source: &str, h: &HistogramData) {
        for (x, y) in h.centers().into_iter().zip(&h.densities) {
            self.push(panel, source, x, *y);
        }
    }

    fn reference(&mut self, panel: &str, curve: ReferenceCurve, grid: &[f64]) {
        for &x in grid {
            self.push(panel, curve.name(), x, curve.eval(x));
        }
    }

    fn table(self, with_panel: bool) -> ResultTable {
        let t = ResultTable::new();
        let t = if with_panel { t.text("panel", self.panel) } else { t };
        t.text("source", self.source).float("x", self.x).float("y", self.y)
    }
}

pub fn nnsd_table(s: &SpectrumAnalysis) -> ResultTable {
    let centers = s.nnsd.centers();
    let ev = |c: ReferenceCurve| centers.iter().map(|&x| c.eval(x)).collect::<Vec<_>>();
    let brody = centers.iter().map(|&x| ethspec::spectral::brody_density(s.brody.gamma, x)).collect();
    ResultTable::new()
        .float("s", centers.clone())
        .float("density", s.nnsd.densities.clone())
        .float("poisson", ev(ReferenceCurve::NnsdPoisson))
        .float("wigner", ev(ReferenceCurve::NnsdWigner))
        .float("brody", brody)
        .meta("brody_gamma", s.brody.gamma)
        .meta("brody_warning", s.brody.warning.as_deref().unwrap_or("none"))
        .meta("mean_ratio", mean(&s.ratios))
        .meta("unfolded_levels", s.unfolded.len())
}

pub fn numvar_table(s: &SpectrumAnalysis) -> ResultTable {
    let (l, v): (Vec<f64>, Vec<f64>) = s.number_variance.iter().copied().unzip();
    let ev = |c: ReferenceCurve| l.iter().map(|&x| c.eval(x)).collect::<Vec<_>>();
    ResultTable::new()
        .float("l", l.clone())
        .float("sigma2", v)
        .float("poisson", ev(ReferenceCurve::NumberVariancePoisson))
        .float("goe", ev(ReferenceCurve::NumberVarianceGoe))
}

pub fn diagonals_table(eth: &[EthAnalysis]) -> ResultTable {
    let mut out = ResultTable::new();
    for e in eth {
        let d = &e.diagonal;
        let n = d.eps.len();
        let t = ResultTable::new()
            .text("observable", repeat(e.observable.name(), n))
            .float("eps", d.eps.clone())
            .float("value", d.values.clone())
            .float("micro_avg", d.micro_avg.clone())
            .float("delta_mic", d.delta_mic.clone());
        out.append(t);
    }
    out
}

fn mixture_meta(mut t: ResultTable, prefix: &str, fit: &MixtureFit) -> ResultTable {
    let list = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(" ");
    t = t.meta(&format!("{prefix}_sigmas"), list(&fit.sigmas));
    t = t.meta(&format!("{prefix}_weights"), list(&fit.weights));
    t.meta(&format!("{prefix}_aic"), fit.aic)
}

pub fn offdiag_table(eth: &[EthAnalysis]) -> ResultTable {
    let mut out = ResultTable::new();
    let mut meta = Vec::new();
    for e in eth {
        let o = &e.offdiag;
        let x = o.histogram.centers();
        let n = x.len();
        let name = e.observable.name();
        out.append(
            ResultTable::new()
                .text("observable", repeat(name, n))
                .float("x", x.clone())
                .float("density", o.histogram.densities.clone())
                .float("single_gaussian", x.iter().map(|&v| o.single.density(v)).collect())
                .float("double_gaussian", x.iter().map(|&v| o.double.density(v)).collect()),
        );
        meta.push((name, o));
    }
    for (name, o) in meta {
        out = mixture_meta(out, &format!("{name}_single"), &o.single);
        out = mixture_meta(out, &format!("{name}_double"), &o.double);
        out = out.meta(&format!("{name}_mean"), o.mean).meta(&format!("{name}_mean_stderr"), o.stderr);
    }
    out
}

pub fn variance_table(eth: &[EthAnalysis]) -> ResultTable {
    let mut out = ResultTable::new();
    for e in eth {
        let v = &e.variance;
        let n = v.omega.len();
        out.append(
            ResultTable::new()
                .text("observable", repeat(e.observable.name(), n))
                .float("omega", v.omega.clone())
                .float("scaled_variance", v.scaled_variance.clone())
                .int("count", v.counts.iter().map(|&c| c as i64).collect())
                .float("fit", v.omega.iter().map(|&w| v.decay.evaluate(w)).collect()),
        );
    }
    for e in eth {
        let (name, d) = (e.observable.name(), &e.variance.decay);
        out = out
            .meta(&format!("{name}_eta"), d.eta)
            .meta(&format!("{name}_eta_stderr"), d.eta_stderr)
            .meta(&format!("{name}_fit_window"), format!("{} {}", d.fit_window.0, d.fit_window.1));
    }
    out
}

pub fn gaussianity_table(eth: &[EthAnalysis]) -> ResultTable {
    let mut out = ResultTable::new();
    for e in eth {
        let (w, r): (Vec<f64>, Vec<f64>) = e.gaussianity.iter().copied().unzip();
        out.append(
            ResultTable::new().text("observable", repeat(e.observable.name(), w.len())).float("omega", w).float("ratio", r),
        );
    }
    out.meta("gaussian_value", std::f64::consts::FRAC_PI_2)
}

pub fn spacing_ratio_table(
    hamiltonian_ratios: &[f64],
    hamiltonian_nnsd: &HistogramData,
    subs: &[SubmatrixAnalysis],
    bins: usize,
) -> Result<ResultTable, CliError> {
    let mut long = Long::default();
    long.histogram("ratio", "hamiltonian", &ratio_histogram(hamiltonian_ratios, bins)?);
    for s in subs {
        long.histogram("ratio", s.observable.name(), &ratio_histogram(&s.ratios, bins)?);
    }
    let grid: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
    long.reference("ratio", ReferenceCurve::RatioPoisson, &grid);
    long.reference("ratio", ReferenceCurve::RatioGoe, &grid);
    long.histogram("nnsd", "hamiltonian", hamiltonian_nnsd);
    for s in subs {
        long.histogram("nnsd", s.observable.name(), &s.nnsd);
    }
    for s in subs {
        for (k, r) in s.variance_ratios.iter().enumerate() {
            long.push("variance_ratio", s.observable.name(), k as f64, r.unwrap_or(f64::NAN));
        }
    }
    let mut t = long.table(true).meta("hamiltonian_mean_ratio", mean(hamiltonian_ratios));
    for s in subs {
        let name = s.observable.name();
        let vr: Vec<f64> = s.variance_ratios.iter().flatten().copied().collect();
        t = t
            .meta(&format!("{name}_mean_ratio"), mean(&s.ratios))
            .meta(&format!("{name}_degenerate_blocks"), s.degenerate_blocks.len())
            .meta(&format!("{name}_mean_variance_ratio"), if vr.is_empty() { f64::NAN } else { mean(&vr) })
            .meta(&format!("{name}_skipped_nnsd_blocks"), s.skipped_nnsd_blocks);
    }
    Ok(t)
}

pub fn magnitude_table(subs: &[SubmatrixAnalysis]) -> ResultTable {
    let mut out = ResultTable::new();
    for s in subs {
        let (mut i, mut j, mut v) = (Vec::new(), Vec::new(), Vec::new());
        for (a, row) in s.magnitude.iter().enumerate() {
            for (b, &m) in row.iter().enumerate() {
                i.push(a as i64);
                j.push(b as i64);
                v.push(m);
            }
        }
        out.append(
            ResultTable::new()
                .text("observable", repeat(s.observable.name(), v.len()))
                .int("i", i)
                .int("j", j)
                .float("magnitude", v),
        );
    }
    out
}

fn sff_rows(source: &str, size: usize, c: &SffCurve) -> ResultTable {
    let n = c.times.len();
    ResultTable::new()
        .text("source", repeat(source, n))
        .int("window_size", vec![size as i64; n])
        .int("levels", vec![c.window_size as i64; n])
        .int("window_count", vec![c.window_count as i64; n])
        .float("t", c.times.clone())
        .float("sff", c.values.clone())
        .float("std_dev", c.std_dev.clone())
}

pub fn sff_table(s: &SffAnalysis) -> ResultTable {
    let mut out = ResultTable::new();
    for e in &s.entries {
        out.append(sff_rows(&e.source, e.size, &e.curve));
    }
    for e in &s.entries {
        out = out.meta(&format!("skipped_{}_{}", e.source, e.size), e.skipped);
    }
    out
}

pub fn sff_single_table(s: &SffAnalysis) -> ResultTable {
    ResultTable::new()
        .float("t", s.single_raw.times.clone())
        .float("raw", s.single_raw.values.clone())
        .float("smoothed", s.single_smoothed.values.clone())
        .meta("levels", s.single_raw.window_size)
}

fn entropy_rows(source: &str, c: &EntropyCurve) -> ResultTable {
    let l_a: Vec<i64> = c.subsystem_sizes().iter().map(|&a| a as i64).collect();
    let page: Vec<f64> = c.subsystem_sizes().iter().map(|&a| page_curve(a, c.sites)).collect();
    let n = l_a.len();
    ResultTable::new()
        .text("source", repeat(source, n))
        .int("sites", vec![c.sites as i64; n])
        .int("l_a", l_a)
        .float("mean_entropy", c.mean_entropy.clone())
        .float("normalized", c.normalized())
        .float("page", page)
}

pub fn entropy_table(e: &EntropyAnalysis) -> ResultTable {
    let mut out = entropy_rows("hamiltonian", &e.hamiltonian);
    for (obs, c) in &e.blocks {
        out.append(entropy_rows(obs.name(), c));
    }
    out = out.meta("hamiltonian_states", e.hamiltonian.states_averaged);
    for (obs, c) in &e.blocks {
        out = out.meta(&format!("{}_block_states", obs.name()), c.states_averaged);
    }
    out
}

pub fn bose_hubbard_table(b: &BoseHubbardAnalysis, bins: usize) -> Result<ResultTable, CliError> {
    let mut long = Long::default();
    long.histogram("", "blocks", &ratio_histogram(&b.block_ratios, bins)?);
    long.histogram("", "hamiltonian", &ratio_histogram(&b.hamiltonian_ratios, bins)?);
    let grid: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
    long.reference("", ReferenceCurve::RatioPoisson, &grid);
    long.reference("", ReferenceCurve::RatioGoe, &grid);
    Ok(long
        .table(false)
        .meta("blocks_mean_ratio", mean(&b.block_ratios))
        .meta("hamiltonian_mean_ratio", mean(&b.hamiltonian_ratios))
        .meta("block_count", b.block_count)
        .meta("degenerate_blocks", b.degenerate_blocks))
}
