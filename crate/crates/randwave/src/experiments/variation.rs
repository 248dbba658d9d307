use super::ExperimentError;
use crate::evolution::Propagator;
use crate::spectral::{sobolev_norm, FieldTrajectory, SpectralError};

/// `max_{t_m <= T} ‖u(t_m)‖_{H^σ}`: a lower-bound proxy for the `X^σ([0,T])` norm,
/// exact for free evolutions because the flow conserves every `H^σ` norm.
pub fn xnorm_proxy(traj: &FieldTrajectory, sigma: f64, t: f64) -> Result<f64, ExperimentError> {
    let tg = traj.time_grid();
    if !(t >= 0.0) || t > tg.horizon() * (1.0 + 1e-12) {
        return Err(SpectralError::ExceedsHorizon { t, horizon: tg.horizon() }.into());
    }
    Ok(traj
        .snapshots()
        .iter()
        .enumerate()
        .take_while(|(m, _)| tg.node(*m) <= t * (1.0 + 1e-12))
        .map(|(_, f)| sobolev_norm(f, sigma))
        .fold(0.0, f64::max))
}

/// `p`-variation in `L²` over partitions drawn from the time nodes.
pub fn discrete_variation_norm(traj: &FieldTrajectory, p: f64, twisted: bool) -> Result<f64, ExperimentError> {
    discrete_variation_norm_with(traj, p, twisted, 0.0)
}

/// `sup_{partitions} (Σ_j ‖w(t_{j+1}) − w(t_j)‖^p_{H^σ})^{1/p}` over partitions
/// whose points are time nodes, with `w = S(−t)u` when `twisted`.
///
/// The supremum over the finite partition lattice is computed exactly by
/// dynamic programming over the last partition point; it is a lower bound of
/// the continuum variation.
pub fn discrete_variation_norm_with(
    traj: &FieldTrajectory,
    p: f64,
    twisted: bool,
    sigma: f64,
) -> Result<f64, ExperimentError> {
    if !(p >= 1.0) {
        return Err(ExperimentError::InvalidParameter(format!("variation exponent {p} below 1")));
    }
    let tg = traj.time_grid();
    let w: Vec<_> = if twisted {
        let prop = Propagator::new(*traj.grid());
        traj.snapshots()
            .iter()
            .enumerate()
            .map(|(m, f)| {
                let mut g = f.clone();
                prop.apply_uncached(&mut g, -tg.node(m));
                g
            })
            .collect()
    } else {
        traj.snapshots().to_vec()
    };
    let n = w.len();
    let mut best = vec![0.0f64; n];
    for j in 1..n {
        let mut top = 0.0f64;
        for i in 0..j {
            let mut d = w[j].clone();
            d.axpy(num_complex::Complex64::new(-1.0, 0.0), &w[i]);
            top = top.max(best[i] + sobolev_norm(&d, sigma).powf(p));
        }
        best[j] = top;
    }
    Ok(best.iter().copied().fold(0.0, f64::max).powf(1.0 / p))
}
