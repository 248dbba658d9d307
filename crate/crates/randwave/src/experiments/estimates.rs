use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::fit::{loglog_fit, FitResult};
use super::stats::Summary;
use super::ExperimentError;
use crate::evolution::{free_evolution, Quadrature};
use crate::expansion::build_zeta_terms;
use crate::randomization::{wiener_randomize, EnsembleSpec, WindowSpec};
use crate::spectral::{
    lebesgue_norm, littlewood_paley, smooth_size, sobolev_norm, spacetime_norm, Fft3,
    FieldTrajectory, GridSpec, SpectralField, TimeGrid,
};

/// Coefficients of the periodization of `exp(−|x − x₀|²/(2w²)) e^{i x·ξ₀}`,
/// truncated where the Gaussian factor drops below `e^{−40}`.
pub fn wave_packet(grid: GridSpec, centre: [f64; 3], xi0: [f64; 3], width: f64) -> Result<SpectralField, ExperimentError> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(ExperimentError::InvalidParameter(format!("packet width {width}")));
    }
    let norm = (2.0 * PI).powf(1.5) * width.powi(3) / grid.box_volume();
    Ok(SpectralField::from_fn(grid, |_, xi| {
        let d2: f64 = (0..3).map(|d| (xi[d] - xi0[d]).powi(2)).sum();
        let e = 0.5 * width * width * d2;
        if e > 40.0 {
            return Complex64::new(0.0, 0.0);
        }
        let phase: f64 = (0..3).map(|d| xi[d] * centre[d]).sum();
        Complex64::from_polar(norm * (-e).exp(), -phase)
    }))
}

/// A Gaussian bump of width `w` centred at the origin.
pub fn gaussian_bump(grid: GridSpec, width: f64) -> Result<SpectralField, ExperimentError> {
    wave_packet(grid, [0.0; 3], [0.0; 3], width)
}

/// Times on which a free evolution behaves as on the whole space.
///
/// For a bump of width `w` the profile has width `w(1 + 4t²/w⁴)^{1/2}`.
/// `lo = 1.2 w²` puts the evolution in the far-field regime (width ≳ 2.6 w);
/// `hi = πRw/4.5` keeps the spreading front `2t/w` within `1/2.25` of the
/// half period `πR`, before wrap-around tails return.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersiveWindow {
    pub lo: f64,
    pub hi: f64,
}

impl DispersiveWindow {
    pub fn for_bump(grid: &GridSpec, width: f64) -> Self {
        Self { lo: 1.2 * width * width, hi: PI * grid.oversampling() as f64 * width / 4.5 }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DispersiveReport {
    pub r: f64,
    pub window: DispersiveWindow,
    /// `(t, ‖S(t)f‖_{L^r})` over every requested time, inside the window or not.
    pub rows: Vec<(f64, f64)>,
    /// Fit over the times inside the window.
    pub fit: FitResult,
    /// `−(3/2)(1 − 2/r)`.
    pub predicted: f64,
}

/// Decay exponent of `t ↦ ‖S(t)f‖_{L^r}` over the window.
pub fn dispersive_decay(
    f: &SpectralField,
    ts: &[f64],
    r: f64,
    window: DispersiveWindow,
) -> Result<DispersiveReport, ExperimentError> {
    if !(r >= 2.0) {
        return Err(ExperimentError::InvalidParameter(format!("dispersive exponent r = {r} below 2")));
    }
    let inside: Vec<f64> = ts.iter().copied().filter(|t| window.contains(*t)).collect();
    if inside.is_empty() {
        return Err(ExperimentError::EmptyWindow { lo: window.lo, hi: window.hi });
    }
    let rows: Vec<(f64, f64)> = ts
        .par_iter()
        .map(|&t| Ok((t, lebesgue_norm(&crate::evolution::evolve_linear(f, t), r)?)))
        .collect::<Result<_, ExperimentError>>()?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows.iter().copied().filter(|(t, _)| window.contains(*t)).unzip();
    let fit = loglog_fit(&xs, &ys)?;
    let predicted = if r.is_infinite() { -1.5 } else { -1.5 * (1.0 - 2.0 / r) };
    Ok(DispersiveReport { r, window, rows, fit, predicted })
}

/// `‖P_{N₁}S(t)φ₁ · P_{N₂}S(t)φ₂‖_{L²([0,T]×box)}` for normalized projections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BilinearRow {
    pub n1: u64,
    pub n2: u64,
    pub value: f64,
    /// `value / (N₁ N₂^{−1/2})`.
    pub ratio: f64,
}

/// Samples of `Σ c e^{−it|ξ|²} e^{ix·ξ}` on the `P`-point grid of `fft`.
fn evolve_free_sparse(fft: &Fft3, modes: &[[i64; 3]], coefs: &[Complex64], k2: &[f64], t: f64) -> Vec<Complex64> {
    let p = fft.size();
    let pi = p as i64;
    let mut data = vec![Complex64::new(0.0, 0.0); p * p * p];
    for ((m, c), q) in modes.iter().zip(coefs).zip(k2) {
        let w = |v: i64| v.rem_euclid(pi) as usize;
        data[(w(m[0]) * p + w(m[1])) * p + w(m[2])] += c * Complex64::from_polar(1.0, -t * q);
    }
    fft.inverse(&mut data);
    data
}

/// Non-zero coefficients of a field with their modes.
struct Sparse {
    modes: Vec<[i64; 3]>,
    coefs: Vec<Complex64>,
    k2: Vec<f64>,
    extent: i64,
}

fn sparse(f: &SpectralField) -> Sparse {
    let grid = f.grid();
    let xi2 = grid.frequency_squares();
    let mut out = Sparse { modes: Vec::new(), coefs: Vec::new(), k2: Vec::new(), extent: 0 };
    for (i, c) in f.coefficients().iter().enumerate() {
        if c.norm_sqr() > 0.0 {
            let m = grid.modes(i);
            out.extent = out.extent.max(m.iter().map(|v| v.abs()).max().unwrap_or(0));
            out.modes.push(m);
            out.coefs.push(*c);
            out.k2.push(xi2[i]);
        }
    }
    out
}

fn normalized_projection(phi: &SpectralField, n: u64) -> Result<Option<SpectralField>, ExperimentError> {
    let p = littlewood_paley(phi, n)?;
    let norm = sobolev_norm(&p, 0.0);
    if norm == 0.0 {
        return Ok(None);
    }
    Ok(Some(p.scaled(Complex64::new(1.0 / norm, 0.0))))
}

/// One bilinear measurement. Both projections are normalized in `L²`.
///
/// The product is evaluated on a grid of `P >= 2(K₁ + K₂) + 1` points per
/// axis, `K_j` being the largest coefficient index of each projection, where
/// the discrete `L²` norm of the product is exact. Time integration uses the
/// trapezoid rule over the nodes of `tg`.
pub fn bilinear_strichartz(
    phi1: &SpectralField,
    phi2: &SpectralField,
    n1: u64,
    n2: u64,
    tg: TimeGrid,
) -> Result<BilinearRow, ExperimentError> {
    phi1.ensure_same_grid(phi2)?;
    let grid = *phi1.grid();
    if n1 > n2 {
        return Err(ExperimentError::InvalidParameter(format!("N1 = {n1} exceeds N2 = {n2}")));
    }
    let limit = 0.5 * grid.nyquist();
    if n2 as f64 > limit {
        return Err(ExperimentError::BeyondNyquist { frequency: n2 as f64, limit });
    }
    let ratio_of = |value: f64| value / (n1 as f64 * (n2 as f64).powf(-0.5));
    let (Some(p1), Some(p2)) = (normalized_projection(phi1, n1)?, normalized_projection(phi2, n2)?) else {
        return Ok(BilinearRow { n1, n2, value: 0.0, ratio: 0.0 });
    };
    let (s1, s2) = (sparse(&p1), sparse(&p2));
    drop((p1, p2));
    let p = smooth_size((2 * (s1.extent + s2.extent) + 1) as usize);
    let fft = Fft3::plan(p);
    let scale = grid.box_volume() / (p * p * p) as f64;
    let slice: Vec<f64> = tg
        .times()
        .into_iter()
        .map(|t| {
            let a = evolve_free_sparse(&fft, &s1.modes, &s1.coefs, &s1.k2, t);
            let b = evolve_free_sparse(&fft, &s2.modes, &s2.coefs, &s2.k2, t);
            a.iter().zip(&b).map(|(x, y)| (x * y).norm_sqr()).sum::<f64>() * scale
        })
        .collect();
    let h = tg.dt();
    let integral: f64 = slice.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum();
    let value = integral.sqrt();
    Ok(BilinearRow { n1, n2, value, ratio: ratio_of(value) })
}

#[derive(Debug, Clone, Serialize)]
pub struct BilinearSweep {
    pub rows: Vec<BilinearRow>,
    /// Log-log fit of `value` against `N₂`.
    pub fit: FitResult,
}

/// Sweep `N₂` with `φ₂` built on demand for each `N₂`.
pub fn bilinear_sweep(
    phi1: &SpectralField,
    n1: u64,
    n2s: &[u64],
    tg: TimeGrid,
    mut phi2_for: impl FnMut(u64) -> Result<SpectralField, ExperimentError>,
) -> Result<BilinearSweep, ExperimentError> {
    let mut rows = Vec::with_capacity(n2s.len());
    for &n2 in n2s {
        let phi2 = phi2_for(n2)?;
        rows.push(bilinear_strichartz(phi1, &phi2, n1, n2, tg)?);
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.n2 as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let fit = loglog_fit(&xs, &ys)?;
    Ok(BilinearSweep { rows, fit })
}

/// Abscissa of an integrability-gain study.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GainAxis {
    /// Sweep the block `N` at the fixed horizon of the time grid (`r >= 6`).
    Frequency { ns: Vec<u64> },
    /// Sweep the horizon `T` (each at most the time-grid horizon), optionally on
    /// one block (`r < 6`).
    Time { ts: Vec<f64>, block: Option<u64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainSpec {
    /// Tower index: the term is `ζ_{2k−1}`, `2 <= k <= 5`.
    pub k: usize,
    pub q: f64,
    pub r: f64,
    pub time_grid: TimeGrid,
    pub quadrature: Quadrature,
    pub window: WindowSpec,
    pub axis: GainAxis,
}

#[derive(Debug, Clone, Serialize)]
pub struct GainReport {
    pub spec: GainSpec,
    /// `(abscissa, ensemble statistics of the space-time norm)`.
    pub rows: Vec<(f64, Summary)>,
    /// Log-log fit of the median against the abscissa.
    pub fit: FitResult,
    /// `1/2 − 3/r` for the frequency sweep, `3/r − 1/2` for the time sweep.
    pub predicted: f64,
}

/// Space-time integrability of `ζ_{2k−1}` over the ensemble.
pub fn integrability_gain(
    ens: &EnsembleSpec,
    phi: &SpectralField,
    spec: &GainSpec,
) -> Result<GainReport, ExperimentError> {
    if !(2..=5).contains(&spec.k) {
        return Err(ExperimentError::InvalidParameter(format!("tower index {} outside 2..=5", spec.k)));
    }
    if ens.count == 0 {
        return Err(ExperimentError::EnsembleTooSmall { have: 0, need: 1 });
    }
    let predicted = match &spec.axis {
        GainAxis::Frequency { .. } if spec.r >= 6.0 => 0.5 - 3.0 / spec.r,
        GainAxis::Time { .. } if spec.r < 6.0 => 3.0 / spec.r - 0.5,
        GainAxis::Frequency { .. } => {
            return Err(ExperimentError::InvalidParameter("frequency sweeps need r >= 6".into()))
        }
        GainAxis::Time { .. } => return Err(ExperimentError::InvalidParameter("time sweeps need r < 6".into())),
    };
    let horizon = spec.time_grid.horizon();
    let project = |traj: &FieldTrajectory, n: u64| -> Result<FieldTrajectory, ExperimentError> {
        let snaps = traj.snapshots().iter().map(|f| littlewood_paley(f, n)).collect::<Result<Vec<_>, _>>()?;
        Ok(FieldTrajectory::new(*traj.time_grid(), snaps)?)
    };
    let per_member: Vec<Vec<f64>> = (0..ens.count)
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>, ExperimentError> {
            let data = wiener_randomize(phi, spec.window, ens.law, ens.member(i));
            let tower = build_zeta_terms(&free_evolution(&data, spec.time_grid), spec.k, spec.quadrature)?;
            let term = tower.order(2 * spec.k - 1).expect("tower built to depth k");
            match &spec.axis {
                GainAxis::Frequency { ns } => ns
                    .iter()
                    .map(|&n| Ok(spacetime_norm(&project(term, n)?, spec.q, spec.r, horizon)?))
                    .collect(),
                GainAxis::Time { ts, block } => {
                    let traj = match block {
                        Some(n) => project(term, *n)?,
                        None => term.clone(),
                    };
                    ts.iter().map(|&t| Ok(spacetime_norm(&traj, spec.q, spec.r, t)?)).collect()
                }
            }
        })
        .collect::<Result<_, _>>()?;
    let xs: Vec<f64> = match &spec.axis {
        GainAxis::Frequency { ns } => ns.iter().map(|&n| n as f64).collect(),
        GainAxis::Time { ts, .. } => ts.clone(),
    };
    let rows: Vec<(f64, Summary)> = xs
        .iter()
        .enumerate()
        .map(|(j, &x)| (x, Summary::of(&per_member.iter().map(|v| v[j]).collect::<Vec<_>>())))
        .collect();
    let fit = loglog_fit(&xs, &rows.iter().map(|(_, s)| s.median).collect::<Vec<_>>())?;
    Ok(GainReport { spec: spec.clone(), rows, fit, predicted })
}
