use num_complex::Complex64;

use super::padded::synthesize_full;
use super::{inverse_transform, FieldTrajectory, GridSpec, SpectralError, SpectralField};

/// `‖f‖_{H^s} = (V Σ ⟨ξ⟩^{2s} |c_ξ|²)^{1/2}`, `V = (2πR)³`.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    let grid = f.grid();
    let xi2 = grid.frequency_squares();
    let sum: f64 = if s == 0.0 {
        f.coefficient_energy()
    } else {
        f.coefficients().iter().zip(&xi2).map(|(c, k2)| (1.0 + k2).powf(s) * c.norm_sqr()).sum()
    };
    (sum * grid.box_volume()).sqrt()
}

/// `‖ |∇|^s f ‖_{L²}`.
pub fn homogeneous_sobolev_norm(f: &SpectralField, s: f64) -> Result<f64, SpectralError> {
    let grid = f.grid();
    if s < 0.0 && f.coefficients()[0].norm_sqr() > 0.0 {
        return Err(SpectralError::DegenerateInput(s));
    }
    let xi2 = grid.frequency_squares();
    let sum: f64 = f
        .coefficients()
        .iter()
        .zip(&xi2)
        .filter(|(_, &k2)| k2 > 0.0 || s == 0.0)
        .map(|(c, &k2)| if s == 0.0 { c.norm_sqr() } else { k2.powf(s) * c.norm_sqr() })
        .sum();
    Ok((sum * grid.box_volume()).sqrt())
}

fn check_exponent(r: f64) -> Result<(), SpectralError> {
    if r >= 1.0 && !r.is_nan() {
        Ok(())
    } else {
        Err(SpectralError::InvalidExponent(r))
    }
}

/// `(Σ_j |f(x_j)|^r Δx³)^{1/r}` on the native grid; `r = ∞` is the grid maximum.
pub fn lebesgue_norm_samples(
    grid: &GridSpec,
    samples: &[Complex64],
    r: f64,
) -> Result<f64, SpectralError> {
    check_exponent(r)?;
    if r.is_infinite() {
        return Ok(samples.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let sum: f64 = if r == 2.0 {
        samples.iter().map(|z| z.norm_sqr()).sum()
    } else {
        samples.iter().map(|z| z.norm().powf(r)).sum()
    };
    Ok((sum * grid.cell_volume()).powf(1.0 / r))
}

pub fn lebesgue_norm(f: &SpectralField, r: f64) -> Result<f64, SpectralError> {
    lebesgue_norm_samples(f.grid(), &inverse_transform(f), r)
}

/// `‖u‖_{L^q([0,T]; L^r)}` with the trapezoid rule over the time nodes.
///
/// A horizon `T` between nodes is handled by linear interpolation of the
/// integrand on the last partial interval.
pub fn spacetime_norm(traj: &FieldTrajectory, q: f64, r: f64, t: f64) -> Result<f64, SpectralError> {
    check_exponent(q)?;
    check_exponent(r)?;
    let tg = traj.time_grid();
    if !(t >= 0.0) || t > tg.horizon() * (1.0 + 1e-12) {
        return Err(SpectralError::ExceedsHorizon { t, horizon: tg.horizon() });
    }
    let dt = tg.dt();
    let last = ((t / dt) * (1.0 + 1e-12)).floor() as usize;
    let last = last.min(tg.nodes() - 1);
    let needed = if tg.node(last) < t * (1.0 - 1e-12) { last + 1 } else { last };
    let mut g = Vec::with_capacity(needed + 1);
    for m in 0..=needed {
        g.push(lebesgue_norm(traj.snapshot(m), r)?);
    }
    if q.is_infinite() {
        return Ok(g.iter().copied().fold(0.0, f64::max));
    }
    let p: Vec<f64> = g.iter().map(|v| v.powf(q)).collect();
    let mut integral = 0.0;
    for m in 1..=last {
        integral += 0.5 * dt * (p[m - 1] + p[m]);
    }
    if needed > last {
        let h = t - tg.node(last);
        let theta = h / dt;
        let end = p[last] + theta * (p[needed] - p[last]);
        integral += 0.5 * h * (p[last] + end);
    }
    Ok(integral.powf(1.0 / q))
}

/// `E(f) = ½∫|∇f|² + ¼∫|f|⁴`, the quartic term integrated exactly on a padded grid.
pub fn energy(f: &SpectralField) -> f64 {
    let grid = f.grid();
    let vol = grid.box_volume();
    let xi2 = grid.frequency_squares();
    let kinetic: f64 = f.coefficients().iter().zip(&xi2).map(|(c, k2)| k2 * c.norm_sqr()).sum();
    let (samples, p) = synthesize_full(f, 4);
    let quartic: f64 =
        samples.iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum::<f64>() / (p * p * p) as f64;
    0.5 * kinetic * vol + 0.25 * quartic * vol
}

/// Lattice form of the dilation `f ↦ λ f(λ·)`: the coefficient at `ξ` moves to
/// `λξ` and is multiplied by `λ^{-1/2}`.
///
/// The factor is the continuum symbol weight `λ^{-2}` times the `λ³` density
/// ratio of the sparse sublattice, so `L²` scales by `λ^{-1/2}` and `Ḣ^{1/2}`
/// is invariant exactly as for the dilation on the whole space.
pub fn scaling_transform(f: &SpectralField, lambda: u32) -> Result<SpectralField, SpectralError> {
    if lambda == 0 || !lambda.is_power_of_two() {
        return Err(SpectralError::NotDyadic(lambda as u64));
    }
    if lambda == 1 {
        return Ok(f.clone());
    }
    let grid = *f.grid();
    let l = lambda as i64;
    let factor = (lambda as f64).powf(-0.5);
    let mut out = SpectralField::zeros(grid);
    for (i, c) in f.coefficients().iter().enumerate() {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let m = grid.modes(i);
        let target = [m[0] * l, m[1] * l, m[2] * l];
        let j = grid
            .flat_index(target)
            .ok_or(SpectralError::ScalingOverflow { factor: lambda, mode: m })?;
        out.coefficients_mut()[j] = c * factor;
    }
    Ok(out)
}
