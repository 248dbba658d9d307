use rayon::prelude::*;
use serde::Serialize;

use super::fit::{loglog_fit, FitResult};
use super::stats::Summary;
use super::ExperimentError;
use crate::evolution::{free_evolution, Quadrature};
use crate::expansion::build_zeta_terms;
use crate::randomization::{sharp_cube_of, wiener_randomize, EnsembleSpec, WindowSpec};
use crate::spectral::{dyadic_blocks, dyadic_profile, DyadicProfile, GridSpec, SpectralField, TimeGrid};

/// Data whose dyadic profile is `‖P_N φ‖_{L²} = N^{−(s+δ)}`.
///
/// The support is the union of the randomization cubes (unit cubes centred at
/// integer points `n`) that lie entirely in the retained region and have
/// `|n| <= K/R`. Starting from the radial guess `max(|ξ|,1)^{−s−δ−3/2}`, the
/// amplitude is corrected eight times by the log-ratio of target to measured
/// block norms, interpolated linearly in `log₂|ξ|` between block centres.
/// Only blocks whose symbol support lies inside the data support are corrected.
pub fn profiled_data(grid: GridSpec, s: f64, delta: f64) -> Result<SpectralField, ExperimentError> {
    let exponent = s + delta;
    if !exponent.is_finite() || exponent < 0.0 {
        return Err(ExperimentError::InvalidParameter(format!("profile exponent {exponent}")));
    }
    let r = grid.oversampling() as i64;
    let k = grid.dealias_cutoff();
    let radius = k as f64 / r as f64;
    let cube_inside = |n: i64| {
        // m ranges over (nR − R/2, nR + R/2]
        let hi = (2 * n * r + r).div_euclid(2);
        let lo = (2 * n * r - r).div_euclid(2) + 1;
        hi <= k && lo >= -k
    };
    let mut phi = SpectralField::from_fn(grid, |m, xi| {
        let n = [sharp_cube_of(m[0], r), sharp_cube_of(m[1], r), sharp_cube_of(m[2], r)];
        let centre2 = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]) as f64;
        if !n.iter().all(|&c| cube_inside(c)) || centre2.sqrt() > radius || !grid.is_retained(m) {
            return num_complex::Complex64::new(0.0, 0.0);
        }
        let a = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt().max(1.0);
        num_complex::Complex64::new(a.powf(-exponent - 1.5), 0.0)
    });
    let corrected: Vec<u64> =
        dyadic_blocks(&grid).into_iter().filter(|&n| 1.6 * n as f64 <= radius || n == 1).collect();
    if corrected.len() < 2 {
        return Err(ExperimentError::InvalidParameter("grid too small for a dyadic profile".into()));
    }
    let centres: Vec<f64> = corrected.iter().map(|&n| (n as f64).log2()).collect();
    for _ in 0..8 {
        let prof = dyadic_profile(&phi, 0.0);
        let corr: Vec<f64> = corrected
            .iter()
            .map(|&n| ((n as f64).powf(-exponent) / prof.get(n).unwrap_or(0.0)).log2())
            .collect();
        if corr.iter().any(|c| !c.is_finite()) {
            return Err(ExperimentError::InvalidParameter("empty dyadic block in the data support".into()));
        }
        phi.apply_symbol(|xi| {
            let a = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt().max(1.0).log2();
            interp(a, &centres, &corr).exp2()
        });
    }
    Ok(phi)
}

/// Piecewise-linear interpolation clamped at both ends.
fn interp(x: f64, xs: &[f64], ys: &[f64]) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    for w in 1..xs.len() {
        if x <= xs[w] {
            let t = (x - xs[w - 1]) / (xs[w] - xs[w - 1]);
            return ys[w - 1] + t * (ys[w] - ys[w - 1]);
        }
    }
    ys[ys.len() - 1]
}

/// Parameters of an ensemble smoothing study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothingOptions {
    pub t_eval: f64,
    /// Time nodes on `[0, t_eval]`.
    pub nodes: usize,
    /// Deepest tower index `k`; orders `1, 3, …, 2k − 1` are profiled.
    pub k_max: usize,
    pub quadrature: Quadrature,
    pub window: WindowSpec,
    /// Dyadic blocks `lo <= N <= hi` entering the slope fits.
    pub fit_window: (u64, u64),
}

impl Default for SmoothingOptions {
    fn default() -> Self {
        Self {
            t_eval: 0.35,
            nodes: 17,
            k_max: 4,
            quadrature: Quadrature::Trapezoid,
            window: WindowSpec::SharpCube,
            fit_window: (4, 16),
        }
    }
}

/// Ensemble profiles of the unbalanced tower at `t_eval`.
#[derive(Debug, Clone, Serialize)]
pub struct SmoothingStudy {
    pub blocks: Vec<u64>,
    /// `profiles[l][j]`: statistics of `‖P_N ζ_{2l+1}(t_eval)‖_{L²}` at `blocks[j]`.
    pub profiles: Vec<Vec<Summary>>,
    /// Fit of the median profile over the fit window, per order.
    pub fits: Vec<Option<FitResult>>,
    pub members: usize,
    pub options: SmoothingOptions,
}

impl SmoothingStudy {
    /// Fitted slope of order `2l + 1`.
    pub fn fit(&self, order: usize) -> Option<&FitResult> {
        if order % 2 == 0 {
            return None;
        }
        self.fits.get(order / 2).and_then(Option::as_ref)
    }
}

fn member_profiles(
    phi: &SpectralField,
    ens: &EnsembleSpec,
    i: usize,
    opts: &SmoothingOptions,
) -> Result<Vec<DyadicProfile>, ExperimentError> {
    let data = wiener_randomize(phi, opts.window, ens.law, ens.member(i));
    let z1 = free_evolution(&data, TimeGrid::new(opts.t_eval, opts.nodes)?);
    let tower = build_zeta_terms(&z1, opts.k_max, opts.quadrature)?;
    Ok(tower.terms().iter().map(|t| dyadic_profile(t.last(), 0.0)).collect())
}

/// Randomize `φ` over the ensemble, build `ζ₁, …, ζ_{2k−1}` and fit the
/// median dyadic profiles at `t_eval`.
pub fn smoothing_study(
    ens: &EnsembleSpec,
    phi: &SpectralField,
    opts: &SmoothingOptions,
) -> Result<SmoothingStudy, ExperimentError> {
    if ens.count == 0 {
        return Err(ExperimentError::EnsembleTooSmall { have: 0, need: 1 });
    }
    let per_member: Vec<Vec<DyadicProfile>> = (0..ens.count)
        .into_par_iter()
        .map(|i| member_profiles(phi, ens, i, opts))
        .collect::<Result<_, _>>()?;
    let blocks = dyadic_blocks(phi.grid());
    let mut profiles = Vec::new();
    let mut fits = Vec::new();
    for l in 0..opts.k_max {
        let row: Vec<Summary> = blocks
            .iter()
            .map(|&n| {
                let vals: Vec<f64> = per_member.iter().map(|p| p[l].get(n).unwrap_or(0.0)).collect();
                Summary::of(&vals)
            })
            .collect();
        let (xs, ys): (Vec<f64>, Vec<f64>) = blocks
            .iter()
            .zip(&row)
            .filter(|(n, _)| **n >= opts.fit_window.0 && **n <= opts.fit_window.1)
            .map(|(n, s)| (*n as f64, s.median))
            .unzip();
        fits.push(loglog_fit(&xs, &ys).ok());
        profiles.push(row);
    }
    Ok(SmoothingStudy { blocks, profiles, fits, members: ens.count, options: *opts })
}

/// Fitted dyadic slope of the order-`order` term (`order = 2k − 1`).
pub fn smoothing_fit(
    ens: &EnsembleSpec,
    phi: &SpectralField,
    order: usize,
    opts: &SmoothingOptions,
) -> Result<FitResult, ExperimentError> {
    if order % 2 == 0 {
        return Err(ExperimentError::InvalidParameter(format!("order {order} is even")));
    }
    let opts = SmoothingOptions { k_max: order / 2 + 1, ..*opts };
    let study = smoothing_study(ens, phi, &opts)?;
    let usable = study.blocks.iter().filter(|&&n| n >= opts.fit_window.0 && n <= opts.fit_window.1).count();
    study.fit(order).copied().ok_or(ExperimentError::TooFewPoints(usable))
}
