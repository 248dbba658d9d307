//! Fourier representation of fields on the periodic box `[0, 2πR)³`.
//!
//! Fields are stored as Fourier-series coefficients `c_ξ` with
//! `f(x) = Σ_ξ c_ξ e^{i x·ξ}` over the lattice `ξ = m/R`, `-M/2 <= m_i < M/2`.
//! With this convention a plane wave `a e^{i x·ξ₀}` has the single coefficient
//! `a`, and every norm carries the box volume `(2πR)³` explicitly.

mod fft;
mod field;
mod grid;
mod lp;
mod norms;
mod padded;
mod snapshot;
mod trajectory;

pub use fft::Fft3;
pub use field::{forward_transform, inverse_transform, SpectralField};
pub use grid::GridSpec;
pub(crate) use grid::smooth_size;
pub use lp::{dyadic_blocks, dyadic_profile, eta, eta_block, littlewood_paley, DyadicProfile};
pub use norms::{
    energy, homogeneous_sobolev_norm, lebesgue_norm, lebesgue_norm_samples, scaling_transform,
    sobolev_norm, spacetime_norm,
};
pub use padded::{analyze_padded, pointwise_cubic, synthesize_padded, trilinear_product};
pub use snapshot::{load_snapshot, read_snapshot, save_snapshot, write_snapshot, SNAPSHOT_MAGIC};
pub use trajectory::{FieldTrajectory, TimeGrid};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("array has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("{0} is not a dyadic block size (power of two >= 1)")]
    NotDyadic(u64),
    #[error("homogeneous norm of order {0} < 0 is undefined for a field with nonzero mean")]
    DegenerateInput(f64),
    #[error("dilation by {factor} pushes mode {mode:?} off the lattice")]
    ScalingOverflow { factor: u32, mode: [i64; 3] },
    #[error("invalid exponent {0}")]
    InvalidExponent(f64),
    #[error("time {t} exceeds trajectory horizon {horizon}")]
    ExceedsHorizon { t: f64, horizon: f64 },
    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),
    #[error("trajectories use different time grids")]
    TimeGridMismatch,
    #[error("snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
