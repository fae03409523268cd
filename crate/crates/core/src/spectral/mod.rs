//! Spectral-fluctuation statistics of ascending eigenvalue lists.

mod reference;
mod sff;
mod stats;
mod unfold;

pub use reference::{
    brody_density, reference_curves, ReferenceCurve, EULER_GAMMA, MEAN_RATIO_GOE, MEAN_RATIO_POISSON,
};
pub use sff::{
    detect_ramp, log_time_grid, moving_average, partition_spectrum, sff, sff_single_realization, SffCurve,
    DEFAULT_SFF_POINTS, DEFAULT_SFF_T_MAX, DEFAULT_SFF_T_MIN,
};
pub use stats::{
    brody_fit, histogram, mean, nnsd, nnsd_with_range, number_variance, spacing_ratios, BrodyFit, HistogramData,
    DEFAULT_NNSD_RANGE,
};
pub use unfold::{unfold, UnfoldedSpectrum, DEFAULT_POLY_DEGREE, DEFAULT_TRIM_FRAC};
