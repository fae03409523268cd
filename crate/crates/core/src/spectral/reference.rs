use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// ⟨r⟩ for uncorrelated levels, 2 ln 2 − 1.
pub const MEAN_RATIO_POISSON: f64 = 0.386_294_361_119_890_6;
/// ⟨r⟩ of the GOE surmise, 4 − 2√3.
pub const MEAN_RATIO_GOE: f64 = 0.535_898_384_862_245_4;

/// Analytic reference statistics for uncorrelated and GOE spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceCurve {
    /// `e^{-s}`
    NnsdPoisson,
    /// `(πs/2) e^{-πs²/4}`
    NnsdWigner,
    /// `2 / (1 + r)²`
    RatioPoisson,
    /// `(27/4) (r + r²) / (1 + r + r²)^{5/2}`, normalized on `[0, 1]`
    RatioGoe,
    /// `Σ²(l) = l`
    NumberVariancePoisson,
    /// `(2/π²) [ln(2πl) + γ_e + 1 − π²/8]`
    NumberVarianceGoe,
}

impl ReferenceCurve {
    pub fn name(&self) -> &'static str {
        match self {
            Self::NnsdPoisson => "nnsd_poisson",
            Self::NnsdWigner => "nnsd_wigner",
            Self::RatioPoisson => "pr_poisson",
            Self::RatioGoe => "pr_goe",
            Self::NumberVariancePoisson => "nv_poisson",
            Self::NumberVarianceGoe => "nv_goe",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            Self::NnsdPoisson,
            Self::NnsdWigner,
            Self::RatioPoisson,
            Self::RatioGoe,
            Self::NumberVariancePoisson,
            Self::NumberVarianceGoe,
        ]
        .into_iter()
        .find(|c| c.name() == name)
    }

    /// Pointwise value; `x` must lie in the curve's domain.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::NnsdPoisson => (-x).exp(),
            Self::NnsdWigner => 0.5 * PI * x * (-0.25 * PI * x * x).exp(),
            Self::RatioPoisson => 2.0 / (1.0 + x).powi(2),
            Self::RatioGoe => ratio_goe(x),
            Self::NumberVariancePoisson => x,
            Self::NumberVarianceGoe => 2.0 / (PI * PI) * ((2.0 * PI * x).ln() + EULER_GAMMA + 1.0 - PI * PI / 8.0),
        }
    }

    fn check(&self, x: f64) -> Result<()> {
        let ok = match self {
            Self::NnsdPoisson | Self::NnsdWigner | Self::NumberVariancePoisson => x >= 0.0,
            Self::RatioPoisson | Self::RatioGoe => (0.0..=1.0).contains(&x),
            Self::NumberVarianceGoe => x > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Argument(format!("{x} outside the domain of {}", self.name())))
        }
    }
}

fn ratio_goe(r: f64) -> f64 {
    27.0 / 4.0 * (r + r * r) / (1.0 + r + r * r).powf(2.5)
}

/// Evaluates `kind` on every grid point.
pub fn reference_curves(kind: ReferenceCurve, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    grid.iter()
        .map(|&x| {
            kind.check(x)?;
            Ok((x, kind.eval(x)))
        })
        .collect()
}

/// Brody spacing density for parameter `gamma`.
pub fn brody_density(gamma: f64, s: f64) -> f64 {
    let b = ((gamma + 1.0) * ln_gamma((gamma + 2.0) / (gamma + 1.0))).exp();
    (gamma + 1.0) * b * s.powf(gamma) * (-b * s.powf(gamma + 1.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let inner: f64 = (1..n).map(|k| f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 }).sum();
        h / 3.0 * (f(a) + inner + f(b))
    }

    #[test]
    fn point_values() {
        assert_eq!(ReferenceCurve::RatioPoisson.eval(0.0), 2.0);
        let w = ReferenceCurve::NnsdWigner.eval(1.0);
        assert!((w - 0.5 * PI * (-PI / 4.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn densities_normalize() {
        for kind in [ReferenceCurve::RatioGoe, ReferenceCurve::RatioPoisson] {
            let total = simpson(|r| kind.eval(r), 0.0, 1.0, 2000);
            assert!((total - 1.0).abs() < 1e-6, "{kind:?}: {total}");
        }
        let wigner = simpson(|s| ReferenceCurve::NnsdWigner.eval(s), 0.0, 12.0, 4000);
        assert!((wigner - 1.0).abs() < 1e-9);
        for g in [0.0, 0.3, 1.0] {
            let total = simpson(|s| brody_density(g, s), 1e-12, 40.0, 200_000);
            assert!((total - 1.0).abs() < 1e-4, "gamma {g}: {total}");
        }
    }

    #[test]
    fn mean_ratio_constants() {
        let poi = simpson(|r| r * ReferenceCurve::RatioPoisson.eval(r), 0.0, 1.0, 2000);
        let goe = simpson(|r| r * ReferenceCurve::RatioGoe.eval(r), 0.0, 1.0, 2000);
        assert!((poi - MEAN_RATIO_POISSON).abs() < 1e-9);
        assert!((goe - MEAN_RATIO_GOE).abs() < 1e-9);
    }

    #[test]
    fn domain_checks() {
        assert!(reference_curves(ReferenceCurve::NnsdPoisson, &[-0.1]).is_err());
        assert!(reference_curves(ReferenceCurve::RatioGoe, &[1.5]).is_err());
        let pts = reference_curves(ReferenceCurve::NumberVariancePoisson, &[1.0, 2.0]).unwrap();
        assert_eq!(pts, [(1.0, 1.0), (2.0, 2.0)]);
        assert_eq!(ReferenceCurve::from_name("pr_goe"), Some(ReferenceCurve::RatioGoe));
    }
}
