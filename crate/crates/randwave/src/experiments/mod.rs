//! Numerical experiments: fitted smoothing rates, the two non-smoothing
//! constructions, tail statistics and the linear space-time estimates.
//!
//! Every experiment is a pure function of its inputs. Ensemble members are
//! evaluated in parallel on the ambient rayon pool and collected in member
//! order, so the reported statistics do not depend on the worker count.

mod counterexample;
mod estimates;
mod fit;
mod smoothing;
mod stats;
mod tails;
mod variation;

pub use counterexample::{
    box_convolution_bound, box_field, sup_phase, trilinear_nonsmoothing, z3_data_scaling,
    z3_nonsmoothing_counterexample,
    BoxConvolution, CounterexampleOptions, CounterexampleSpec, FrequencyBox, TrilinearReport,
    TrilinearRow, Z3Counterexample, Z3Row,
};
pub use estimates::{
    bilinear_strichartz, bilinear_sweep, dispersive_decay, gaussian_bump, integrability_gain,
    wave_packet, BilinearRow, BilinearSweep, DispersiveReport, DispersiveWindow, GainAxis, GainReport,
    GainSpec,
};
pub use fit::{linear_fit, loglog_fit, FitResult};
pub use smoothing::{profiled_data, smoothing_fit, smoothing_study, SmoothingOptions, SmoothingStudy};
pub use stats::{median, pairwise_sum, quantile, Summary};
pub use tails::{admissible_check, hs_tail, strichartz_tail, TailCurve, TailStudy};
pub use variation::{discrete_variation_norm, discrete_variation_norm_with, xnorm_proxy};

use crate::evolution::EvolutionError;
use crate::expansion::ExpansionError;
use crate::spectral::SpectralError;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error("fit needs at least 3 usable points, got {0}")]
    TooFewPoints(usize),
    #[error("non-finite fit: {0}")]
    DegenerateFit(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("frequency {frequency} beyond the usable limit {limit}")]
    BeyondNyquist { frequency: f64, limit: f64 },
    #[error("no sample lies inside the valid window [{lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error("ensemble of {have} members is too small for fitting (need {need})")]
    EnsembleTooSmall { have: usize, need: usize },
    #[error("phase bound violated: |Φ|·t = {0} > 0.1")]
    PhaseTooLarge(f64),
}
