use rayon::prelude::*;
use serde::Serialize;

use super::fit::{linear_fit, FitResult};
use super::ExperimentError;
use crate::evolution::free_evolution;
use crate::randomization::{wiener_randomize, EnsembleSpec, WindowSpec};
use crate::spectral::{sobolev_norm, spacetime_norm, SpectralField, TimeGrid};

/// Smallest ensemble on which tail fits are attempted.
pub const MIN_FIT_ENSEMBLE: usize = 50;

/// Empirical exceedance probabilities `P(X > λ)` over a threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailCurve {
    pub lambdas: Vec<f64>,
    pub exceedance: Vec<f64>,
    pub ensemble_size: usize,
}

impl TailCurve {
    /// Exceedance of `samples` at the sorted `lambdas`; nonincreasing by construction
    /// because every threshold is compared against the same sorted sample set.
    pub fn from_samples(samples: &[f64], lambdas: &[f64]) -> Self {
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut lambdas = lambdas.to_vec();
        lambdas.sort_by(f64::total_cmp);
        let n = sorted.len();
        let exceedance = lambdas
            .iter()
            .map(|&l| {
                let at_most = sorted.partition_point(|&x| x <= l);
                if n == 0 {
                    0.0
                } else {
                    (n - at_most) as f64 / n as f64
                }
            })
            .collect();
        Self { lambdas, exceedance, ensemble_size: n }
    }

    /// `count` equispaced thresholds on `[0, max sample]`.
    pub fn thresholds_spanning(samples: &[f64], count: usize) -> Vec<f64> {
        let top = samples.iter().copied().fold(0.0, f64::max);
        let steps = count.max(2) - 1;
        // `j / steps` is exactly 1 at the last step, so the top threshold equals the largest sample
        (0..=steps).map(|j| top * (j as f64 / steps as f64)).collect()
    }

    /// Linear fit of `ln P` against `λ²` over thresholds with `0 < P < 1`.
    pub fn log_fit(&self) -> Result<FitResult, ExperimentError> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .lambdas
            .iter()
            .zip(&self.exceedance)
            .filter(|(_, p)| **p > 0.0 && **p < 1.0)
            .map(|(l, p)| (l * l, p.ln()))
            .unzip();
        linear_fit(&xs, &ys)
    }
}

/// A tail curve, its `ln P` versus `λ²` fit when one exists, and the raw samples.
#[derive(Debug, Clone, Serialize)]
pub struct TailStudy {
    pub curve: TailCurve,
    pub fit: Option<FitResult>,
    pub samples: Vec<f64>,
}

fn study(samples: Vec<f64>, lambdas: &[f64]) -> TailStudy {
    let curve = TailCurve::from_samples(&samples, lambdas);
    let fit = curve.log_fit().ok();
    TailStudy { curve, fit, samples }
}

fn check_ensemble(ens: &EnsembleSpec) -> Result<(), ExperimentError> {
    if ens.count < MIN_FIT_ENSEMBLE {
        return Err(ExperimentError::EnsembleTooSmall { have: ens.count, need: MIN_FIT_ENSEMBLE });
    }
    Ok(())
}

/// Tail of `‖S(t)φ^ω‖_{L^q([0,T]; L^r)}` over the ensemble, `T` being the
/// horizon of `tg`.
pub fn strichartz_tail(
    phi: &SpectralField,
    window: WindowSpec,
    ens: &EnsembleSpec,
    q: f64,
    r: f64,
    tg: TimeGrid,
    lambdas: &[f64],
) -> Result<TailStudy, ExperimentError> {
    if !(q.is_finite() && q >= 2.0 && r.is_finite() && r >= 2.0) {
        return Err(ExperimentError::InvalidParameter(format!("need finite q, r >= 2, got ({q}, {r})")));
    }
    check_ensemble(ens)?;
    let samples: Vec<f64> = (0..ens.count)
        .into_par_iter()
        .map(|i| {
            let data = wiener_randomize(phi, window, ens.law, ens.member(i));
            spacetime_norm(&free_evolution(&data, tg), q, r, tg.horizon())
        })
        .collect::<Result<_, _>>()?;
    Ok(study(samples, lambdas))
}

/// Tail of `‖φ^ω‖_{H^s}` over the ensemble.
pub fn hs_tail(
    phi: &SpectralField,
    window: WindowSpec,
    ens: &EnsembleSpec,
    s: f64,
    lambdas: &[f64],
) -> Result<TailStudy, ExperimentError> {
    check_ensemble(ens)?;
    let samples: Vec<f64> = (0..ens.count)
        .into_par_iter()
        .map(|i| sobolev_norm(&wiener_randomize(phi, window, ens.law, ens.member(i)), s))
        .collect();
    Ok(study(samples, lambdas))
}

/// `2/q + 3/r = 3/2` (to 1e−12) with `2 <= q, r <= ∞`.
pub fn admissible_check(q: f64, r: f64) -> bool {
    let in_range = |p: f64| p >= 2.0 && !p.is_nan();
    let inv = |p: f64| if p.is_infinite() { 0.0 } else { 1.0 / p };
    in_range(q) && in_range(r) && (2.0 * inv(q) + 3.0 * inv(r) - 1.5).abs() <= 1e-12
}
