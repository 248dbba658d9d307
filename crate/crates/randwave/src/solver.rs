//! Picard iteration for the residual `v = u − Σ ζ` and plug-back checks of
//! reconstructed solutions.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::evolution::{
    duhamel, free_evolution, trajectory_at, CachedPhysical, EvolutionError, PhysicalSource,
    Propagator, Quadrature,
};
use crate::expansion::{unbalanced, ExpansionError, ExpansionSet, Variant};
use crate::spectral::{
    analyze_padded, pointwise_cubic, sobolev_norm, synthesize_padded, FieldTrajectory,
    SpectralError, SpectralField,
};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("residual needs at least 3 time nodes")]
    TooFewNodes,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Number of expansion terms removed, `k`.
    pub depth: usize,
    /// Stop once `sup_t ‖v_{j+1} − v_j‖_{H^σ}` falls to this value.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Regularity of the convergence norm.
    pub sigma: f64,
    /// Deterministic, unrandomized part of the data.
    pub v0: Option<SpectralField>,
    pub quadrature: Quadrature,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            depth: 1,
            tolerance: 1e-10,
            max_iterations: 60,
            sigma: 0.5,
            v0: None,
            quadrature: Quadrature::Trapezoid,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<(), SolverError> {
        if self.depth == 0 {
            return Err(SolverError::Config("depth must be >= 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(SolverError::Config("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(SolverError::Config("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub increments: Vec<f64>,
    /// Plug-back residual of the reconstructed solution (needs 3 nodes).
    pub residual: Option<f64>,
    /// Geometric mean of successive increment ratios.
    pub contraction_ratio: Option<f64>,
    pub converged: bool,
}

fn contraction_ratio(inc: &[f64]) -> Option<f64> {
    let logs: Vec<f64> = inc
        .windows(2)
        .filter(|w| w[0] > 0.0 && w[1] > 0.0)
        .map(|w| (w[1] / w[0]).ln())
        .collect();
    if logs.is_empty() {
        None
    } else {
        Some((logs.iter().sum::<f64>() / logs.len() as f64).exp())
    }
}

fn diverging(inc: &[f64]) -> bool {
    let n = inc.len();
    n >= 4 && inc[n - 1] > inc[n - 2] && inc[n - 2] > inc[n - 3] && inc[n - 3] > inc[n - 4]
}

/// Solve `v = S(t)v₀ − i∫S(t−t′){N(v + Σ_{ℓ≤k} ζ_{2ℓ−1}) − F_k}dt′` by Picard iteration,
/// where `F_k` is the forcing already accounted for by the expansion.
///
/// Non-convergence (increments growing three times in a row, or a non-finite
/// increment) is reported, not raised.
pub fn picard_solve(
    set: &ExpansionSet,
    cfg: &SolverConfig,
) -> Result<(FieldTrajectory, SolveReport), SolverError> {
    cfg.validate()?;
    let k = cfg.depth;
    if set.variant() == Variant::FullZ && k > 2 {
        return Err(ExpansionError::FullForcing(k).into());
    }
    if k > set.depth() {
        return Err(ExpansionError::TooShallow { have: set.depth(), need: k }.into());
    }
    let terms = &set.terms()[..k];
    let z1 = &terms[0];
    let grid = *z1.grid();
    let tg = *z1.time_grid();
    let prop = Propagator::new(grid);

    let mut sum = z1.clone();
    for t in &terms[1..] {
        sum.add(t)?;
    }
    let base = match &cfg.v0 {
        Some(v0) => {
            v0.ensure_same_grid(z1.snapshot(0))?;
            free_evolution(v0, tg)
        }
        None => FieldTrajectory::zeros(grid, tg),
    };
    let z1_phys = CachedPhysical::new(z1);
    // ζ_{2ℓ−3} for ℓ = 3..=k enter the forcing
    let inner: Vec<&FieldTrajectory> = if k >= 3 { terms[1..k - 1].iter().collect() } else { Vec::new() };

    let mut v = base.clone();
    let mut increments = Vec::new();
    let mut converged = false;
    for _ in 0..cfg.max_iterations {
        let d = duhamel(&prop, tg, cfg.quadrature, |at| {
            let mut u = trajectory_at(&v, at, &prop).into_owned();
            u += &*trajectory_at(&sum, at, &prop);
            let mut phys = synthesize_padded(&u);
            for z in &mut phys {
                *z *= z.norm_sqr();
            }
            if k >= 2 {
                let a = z1_phys.physical(at, &prop);
                for (p, x) in phys.iter_mut().zip(a.iter()) {
                    *p -= x * x.conj() * x;
                }
                for zeta in &inner {
                    let b = zeta.physical(at, &prop);
                    for ((p, x), y) in phys.iter_mut().zip(a.iter()).zip(b.iter()) {
                        *p -= unbalanced(*x, *y);
                    }
                }
            }
            Ok(analyze_padded(grid, phys))
        })?;
        let mut next = base.clone();
        next.add(&d)?;
        let inc = next.sup_distance(&v, cfg.sigma)?;
        increments.push(inc);
        v = next;
        if !inc.is_finite() {
            break;
        }
        if inc <= cfg.tolerance {
            converged = true;
            break;
        }
        if diverging(&increments) {
            break;
        }
    }

    let residual = if tg.nodes() >= 3 && increments.last().is_some_and(|x| x.is_finite()) {
        let u = reconstruct_u(&set.truncated(k)?, &v)?;
        Some(nls_residual(&u)?.value)
    } else {
        None
    };
    let report = SolveReport {
        iterations: increments.len(),
        contraction_ratio: contraction_ratio(&increments),
        increments,
        residual,
        converged,
    };
    Ok((v, report))
}

/// `u = Σ ζ + v` over all terms of the set.
pub fn reconstruct_u(set: &ExpansionSet, v: &FieldTrajectory) -> Result<FieldTrajectory, SolverError> {
    let mut u = v.clone();
    for t in set.terms() {
        u.add(t)?;
    }
    Ok(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    /// `sup_m ‖i∂ₜu + Δu − |u|²u‖_{H^{−1}}` over interior nodes.
    pub value: f64,
    /// Estimated `Δt²` truncation level of the centered difference (needs 4 nodes).
    pub floor: Option<f64>,
}

fn h_minus_one(f: &SpectralField) -> f64 {
    sobolev_norm(f, -1.0)
}

/// Plug-back residual of a trajectory in `H^{−1}`.
///
/// The time derivative is a centered difference of the interaction-picture
/// field `S(−t)u`, so free solutions have zero residual and the truncation
/// error only sees the nonlinear dynamics.
pub fn nls_residual(u: &FieldTrajectory) -> Result<ResidualReport, SolverError> {
    nls_residual_with(u, true)
}

/// As [`nls_residual`], optionally without the cubic term.
pub fn nls_residual_with(u: &FieldTrajectory, cubic: bool) -> Result<ResidualReport, SolverError> {
    let tg = *u.time_grid();
    if tg.nodes() < 3 {
        return Err(SolverError::TooFewNodes);
    }
    let prop = Propagator::new(*u.grid());
    let h = tg.dt();
    let twisted = |m: usize, shift: f64| {
        let mut f = u.snapshot(m).clone();
        prop.apply(&mut f, shift);
        f
    };
    let mut value: f64 = 0.0;
    for m in 1..tg.nodes() - 1 {
        let mut r = twisted(m + 1, -h);
        r -= &twisted(m - 1, h);
        r.scale(Complex64::new(0.0, 1.0 / (2.0 * h)));
        if cubic {
            r -= &pointwise_cubic(u.snapshot(m));
        }
        value = value.max(h_minus_one(&r));
    }
    let floor = if tg.nodes() >= 4 {
        let mut worst: f64 = 0.0;
        for m in 1..tg.nodes() - 2 {
            // third difference of S(−t)u, expressed at t_m
            let mut d = twisted(m + 2, -2.0 * h);
            d.axpy(Complex64::new(-3.0, 0.0), &twisted(m + 1, -h));
            d.axpy(Complex64::new(3.0, 0.0), u.snapshot(m));
            d -= &twisted(m - 1, h);
            worst = worst.max(h_minus_one(&d) / (6.0 * h));
        }
        Some(worst)
    } else {
        None
    };
    Ok(ResidualReport { value, floor })
}
