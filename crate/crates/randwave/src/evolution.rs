//! Free Schrödinger flow, the trilinear Duhamel operator and a split-step
//! reference integrator for `i∂ₜu + Δu = |u|²u`.
//!
//! Duhamel integrals are accumulated with the recurrence
//! `y_m = S(Δt) y_{m−1} + (quadrature of S(t_m − t′)F(t′) over [t_{m−1}, t_m])`,
//! which is the interaction-picture scheme `w_m = w_{m−1} + ∫ S(−t′)F` written
//! in the lab frame, so only a handful of fixed multipliers is ever needed.

use std::borrow::Cow;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::{
    analyze_padded, inverse_transform, forward_transform, synthesize_padded, FieldTrajectory,
    GridSpec, SpectralError, SpectralField, TimeGrid,
};

#[derive(Debug, Error)]
pub enum EvolutionError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("frequencies violate ξ = ξ₁ − ξ₂ + ξ₃ (mismatch {0:e})")]
    InvalidQuadruple(f64),
    #[error("split-step blow-up at step {step}: sup-norm grew by {growth:e}")]
    BlowUp { step: usize, growth: f64 },
}

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Time quadrature used on each subinterval of a Duhamel integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quadrature {
    #[default]
    Trapezoid,
    GaussLegendre2,
}

impl std::str::FromStr for Quadrature {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "trapezoid" => Ok(Self::Trapezoid),
            "gauss-legendre-2" | "gauss" => Ok(Self::GaussLegendre2),
            other => Err(format!("unknown quadrature '{other}'")),
        }
    }
}

/// Gauss–Legendre nodes on `[0, 1]`.
const GAUSS_THETA: [f64; 2] = [0.5 - 0.288_675_134_594_812_9, 0.5 + 0.288_675_134_594_812_9];

/// `e^{−iτ|ξ|²}` tables for a grid, cached by `τ`.
#[derive(Debug)]
pub struct Propagator {
    grid: GridSpec,
    xi2: Vec<f64>,
    tables: Mutex<HashMap<u64, Arc<Vec<Complex64>>>>,
}

impl Propagator {
    pub fn new(grid: GridSpec) -> Self {
        Self { grid, xi2: grid.frequency_squares(), tables: Mutex::new(HashMap::new()) }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn frequency_squares(&self) -> &[f64] {
        &self.xi2
    }

    /// Cached multiplier table for `τ`.
    pub fn multiplier(&self, tau: f64) -> Arc<Vec<Complex64>> {
        let mut map = self.tables.lock().expect("propagator cache poisoned");
        map.entry(tau.to_bits())
            .or_insert_with(|| Arc::new(self.xi2.iter().map(|k| Complex64::from_polar(1.0, -tau * k)).collect()))
            .clone()
    }

    /// `f ← S(τ)f`, through the cache.
    pub fn apply(&self, f: &mut SpectralField, tau: f64) {
        assert_eq!(*f.grid(), self.grid, "propagator applied on a foreign grid");
        if tau == 0.0 {
            return;
        }
        let table = self.multiplier(tau);
        for (c, m) in f.coefficients_mut().iter_mut().zip(table.iter()) {
            *c *= m;
        }
    }

    /// `f ← S(τ)f` without caching (for one-off times).
    pub fn apply_uncached(&self, f: &mut SpectralField, tau: f64) {
        if tau == 0.0 {
            return;
        }
        for (c, k) in f.coefficients_mut().iter_mut().zip(&self.xi2) {
            *c *= Complex64::from_polar(1.0, -tau * k);
        }
    }
}

/// `S(t)f`: multiplication by `e^{−it|ξ|²}`.
pub fn evolve_linear(f: &SpectralField, t: f64) -> SpectralField {
    let mut out = f.clone();
    let xi2 = f.grid().frequency_squares();
    for (c, k) in out.coefficients_mut().iter_mut().zip(&xi2) {
        *c *= Complex64::from_polar(1.0, -t * k);
    }
    out
}

/// `t ↦ S(t)f` on the nodes of `tg`.
pub fn free_evolution(f: &SpectralField, tg: TimeGrid) -> FieldTrajectory {
    let snaps = tg.times().into_iter().map(|t| evolve_linear(f, t)).collect();
    FieldTrajectory::new(tg, snaps).expect("snapshots match the time grid")
}

/// `|ξ|² − |ξ₁|² + |ξ₂|² − |ξ₃|²` on the constraint `ξ = ξ₁ − ξ₂ + ξ₃`.
pub fn phase_function(
    xi: [f64; 3],
    xi1: [f64; 3],
    xi2: [f64; 3],
    xi3: [f64; 3],
) -> Result<f64, EvolutionError> {
    let sq = |v: [f64; 3]| v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let scale = 1.0 + sq(xi).max(sq(xi1)).max(sq(xi2)).max(sq(xi3)).sqrt();
    let mismatch = (0..3).map(|d| (xi[d] - (xi1[d] - xi2[d] + xi3[d])).abs()).fold(0.0, f64::max);
    if mismatch > 1e-12 * scale {
        return Err(EvolutionError::InvalidQuadruple(mismatch));
    }
    Ok(sq(xi) - sq(xi1) + sq(xi2) - sq(xi3))
}

/// The factored form `2⟨ξ − ξ₁, ξ − ξ₃⟩` of the same phase.
pub fn phase_function_factored(
    xi: [f64; 3],
    xi1: [f64; 3],
    xi2: [f64; 3],
    xi3: [f64; 3],
) -> Result<f64, EvolutionError> {
    phase_function(xi, xi1, xi2, xi3)?;
    Ok(2.0 * (0..3).map(|d| (xi[d] - xi1[d]) * (xi[d] - xi3[d])).sum::<f64>())
}

/// Where a forcing is evaluated: at a node, or at `t_left + θ Δt` inside an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimePoint {
    Node(usize),
    Between { left: usize, theta: f64 },
}

/// Value of a trajectory at a time point.
///
/// Between nodes the interaction-picture state `S(−t)u(t)` is interpolated
/// linearly, which is exact for free solutions.
pub fn trajectory_at<'a>(
    traj: &'a FieldTrajectory,
    at: TimePoint,
    prop: &Propagator,
) -> Cow<'a, SpectralField> {
    match at {
        TimePoint::Node(m) => Cow::Borrowed(traj.snapshot(m)),
        TimePoint::Between { left, theta } => {
            let h = traj.time_grid().dt();
            let mut right = traj.snapshot(left + 1).clone();
            prop.apply(&mut right, -h);
            right.scale(Complex64::new(theta, 0.0));
            right.axpy(Complex64::new(1.0 - theta, 0.0), traj.snapshot(left));
            prop.apply(&mut right, theta * h);
            Cow::Owned(right)
        }
    }
}

/// Something that can provide padded-grid physical samples at a time point.
pub trait PhysicalSource: Sync {
    fn trajectory(&self) -> &FieldTrajectory;
    fn physical(&self, at: TimePoint, prop: &Propagator) -> Cow<'_, [Complex64]>;
}

impl PhysicalSource for FieldTrajectory {
    fn trajectory(&self) -> &FieldTrajectory {
        self
    }
    fn physical(&self, at: TimePoint, prop: &Propagator) -> Cow<'_, [Complex64]> {
        Cow::Owned(synthesize_padded(&trajectory_at(self, at, prop)))
    }
}

/// A trajectory whose padded physical samples at the nodes are computed once.
pub struct CachedPhysical<'a> {
    traj: &'a FieldTrajectory,
    nodes: Vec<Vec<Complex64>>,
}

impl<'a> CachedPhysical<'a> {
    pub fn new(traj: &'a FieldTrajectory) -> Self {
        Self { traj, nodes: traj.snapshots().iter().map(synthesize_padded).collect() }
    }
}

impl PhysicalSource for CachedPhysical<'_> {
    fn trajectory(&self) -> &FieldTrajectory {
        self.traj
    }
    fn physical(&self, at: TimePoint, prop: &Propagator) -> Cow<'_, [Complex64]> {
        match at {
            TimePoint::Node(m) => Cow::Borrowed(&self.nodes[m]),
            between => Cow::Owned(synthesize_padded(&trajectory_at(self.traj, between, prop))),
        }
    }
}

/// `−i ∫₀ᵗ S(t − t′) F(t′) dt′` on the nodes of `tg`, for a forcing evaluated on demand.
///
/// With the trapezoid rule the forcing is requested once per node; with the
/// Gauss rule twice per interval at interior points.
pub fn duhamel<F>(
    prop: &Propagator,
    tg: TimeGrid,
    quadrature: Quadrature,
    mut forcing: F,
) -> Result<FieldTrajectory, EvolutionError>
where
    F: FnMut(TimePoint) -> Result<SpectralField, EvolutionError>,
{
    let grid = *prop.grid();
    let h = tg.dt();
    let half = -I * (0.5 * h);
    let mut out = Vec::with_capacity(tg.nodes());
    out.push(SpectralField::zeros(grid));
    match quadrature {
        Quadrature::Trapezoid => {
            let mut prev = forcing(TimePoint::Node(0))?;
            for m in 1..tg.nodes() {
                let cur = forcing(TimePoint::Node(m))?;
                let mut y = out[m - 1].clone();
                y.axpy(half, &prev);
                prop.apply(&mut y, h);
                y.axpy(half, &cur);
                out.push(y);
                prev = cur;
            }
        }
        Quadrature::GaussLegendre2 => {
            for m in 1..tg.nodes() {
                let mut y = out[m - 1].clone();
                prop.apply(&mut y, h);
                for theta in GAUSS_THETA {
                    let mut f = forcing(TimePoint::Between { left: m - 1, theta })?;
                    prop.apply(&mut f, (1.0 - theta) * h);
                    y.axpy(half, &f);
                }
                out.push(y);
            }
        }
    }
    Ok(FieldTrajectory::new(tg, out)?)
}

/// Duhamel integral of a pointwise function of several inputs.
pub fn duhamel_pointwise<O>(
    prop: &Propagator,
    inputs: &[&dyn PhysicalSource],
    quadrature: Quadrature,
    op: O,
) -> Result<FieldTrajectory, EvolutionError>
where
    O: Fn(&[Complex64]) -> Complex64,
{
    let first = inputs.first().expect("at least one input").trajectory();
    for s in inputs {
        first.ensure_compatible(s.trajectory())?;
    }
    if *first.grid() != *prop.grid() {
        return Err(SpectralError::GridMismatch.into());
    }
    let tg = *first.time_grid();
    let grid = *first.grid();
    let mut vals = vec![Complex64::new(0.0, 0.0); inputs.len()];
    duhamel(prop, tg, quadrature, |at| {
        let phys: Vec<Cow<'_, [Complex64]>> = inputs.iter().map(|s| s.physical(at, prop)).collect();
        let len = phys[0].len();
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        for (j, o) in out.iter_mut().enumerate() {
            for (v, p) in vals.iter_mut().zip(&phys) {
                *v = p[j];
            }
            *o = op(&vals);
        }
        Ok(analyze_padded(grid, out))
    })
}

/// `I(u₁, u₂, u₃)(t) = −i ∫₀ᵗ S(t − t′) u₁ ū₂ u₃ (t′) dt′`.
pub fn duhamel_trilinear(
    u1: &FieldTrajectory,
    u2: &FieldTrajectory,
    u3: &FieldTrajectory,
    quadrature: Quadrature,
) -> Result<FieldTrajectory, EvolutionError> {
    let prop = Propagator::new(*u1.grid());
    duhamel_trilinear_with(&prop, u1, u2, u3, quadrature)
}

pub fn duhamel_trilinear_with(
    prop: &Propagator,
    u1: &dyn PhysicalSource,
    u2: &dyn PhysicalSource,
    u3: &dyn PhysicalSource,
    quadrature: Quadrature,
) -> Result<FieldTrajectory, EvolutionError> {
    duhamel_pointwise(prop, &[u1, u2, u3], quadrature, |v| v[0] * v[1].conj() * v[2])
}

/// Options of the split-step integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitStepOptions {
    /// Include the cubic term (disable for the free flow).
    pub nonlinear: bool,
    /// Strang steps per output interval.
    pub substeps: usize,
}

impl Default for SplitStepOptions {
    fn default() -> Self {
        Self { nonlinear: true, substeps: 1 }
    }
}

/// Strang splitting on the native grid: half free step, exact phase rotation
/// `u ↦ e^{−iτ|u|²}u` in physical space, half free step.
///
/// Both substeps are unitary, so mass is conserved to rounding. Stable for
/// amplitudes with `Δt · max|u|² ≲ 1`.
pub fn split_step_reference(
    u0: &SpectralField,
    tg: TimeGrid,
    options: SplitStepOptions,
) -> Result<FieldTrajectory, EvolutionError> {
    let grid = *u0.grid();
    let prop = Propagator::new(grid);
    let sub = options.substeps.max(1);
    let tau = tg.dt() / sub as f64;
    let initial_sup = inverse_transform(u0).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut u = u0.clone();
    let mut snaps = vec![u.clone()];
    let mut step = 0;
    for _ in 1..tg.nodes() {
        for _ in 0..sub {
            step += 1;
            if options.nonlinear {
                prop.apply(&mut u, 0.5 * tau);
                let mut phys = inverse_transform(&u);
                let mut sup: f64 = 0.0;
                for z in &mut phys {
                    let a = z.norm_sqr();
                    *z *= Complex64::from_polar(1.0, -tau * a);
                    sup = sup.max(a.sqrt());
                }
                if !sup.is_finite() || (initial_sup > 0.0 && sup > 1e6 * initial_sup) {
                    return Err(EvolutionError::BlowUp { step, growth: sup / initial_sup });
                }
                u = forward_transform(grid, &phys)?;
                prop.apply(&mut u, 0.5 * tau);
            } else {
                prop.apply(&mut u, tau);
            }
        }
        snaps.push(u.clone());
    }
    Ok(FieldTrajectory::new(tg, snaps)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_phase() {
        let phi = phase_function([1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0; 3]).unwrap();
        assert_eq!(phi, -2.0);
        assert!(phase_function([1.0, 0.0, 0.0], [0.0; 3], [0.0; 3], [0.0; 3]).is_err());
    }

    #[test]
    fn propagator_tables_are_unimodular() {
        let p = Propagator::new(GridSpec::new(8, 2).unwrap());
        for m in p.multiplier(0.731).iter() {
            assert!((m.norm() - 1.0).abs() < 1e-15);
        }
    }
}
