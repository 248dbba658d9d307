use serde::Serialize;

use super::fit::{loglog_fit, FitResult};
use super::ExperimentError;
use crate::evolution::{duhamel_trilinear_with, free_evolution, CachedPhysical, Propagator, Quadrature};
use crate::spectral::{sobolev_norm, GridSpec, SpectralField, TimeGrid};

/// The half-open frequency box `centre + side·(−1/2, 1/2]³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyBox {
    pub centre: [f64; 3],
    pub side: f64,
}

impl FrequencyBox {
    pub fn new(centre: [f64; 3], side: f64) -> Self {
        Self { centre, side }
    }

    /// Integer range of `m` with `m/R − c ∈ (−side/2, side/2]` along axis `d`.
    fn axis_range(&self, d: usize, r: f64) -> (i64, i64) {
        let lo = (r * (self.centre[d] - 0.5 * self.side)).floor() as i64 + 1;
        let hi = (r * (self.centre[d] + 0.5 * self.side)).floor() as i64;
        (lo, hi)
    }

    fn ranges(&self, grid: &GridSpec) -> [(i64, i64); 3] {
        let r = grid.oversampling() as f64;
        [self.axis_range(0, r), self.axis_range(1, r), self.axis_range(2, r)]
    }

    /// Lattice modes `m` with `m/R` inside the box.
    pub fn lattice_modes(&self, grid: &GridSpec) -> Vec<[i64; 3]> {
        let [x, y, z] = self.ranges(grid);
        let mut out = Vec::new();
        for a in x.0..=x.1 {
            for b in y.0..=y.1 {
                for c in z.0..=z.1 {
                    out.push([a, b, c]);
                }
            }
        }
        out
    }

    /// Half-open boxes are disjoint iff they are separated along some axis.
    pub fn is_disjoint(&self, other: &FrequencyBox) -> bool {
        (0..3).any(|d| (self.centre[d] - other.centre[d]).abs() >= 0.5 * (self.side + other.side))
    }
}

/// Geometry of the non-smoothing constructions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CounterexampleSpec {
    /// Box side `λ`.
    pub box_scale: f64,
    /// Offset factor `c`: the z₃ boxes are shifted by `c·λ`.
    pub offset_factor: f64,
    /// Frequency centre `N`.
    pub n: f64,
    /// Second frequency centre `L` (trilinear construction only).
    pub l: f64,
    /// Data regularity `s`.
    pub s: f64,
    /// Output regularity `σ`.
    pub sigma: f64,
}

impl Default for CounterexampleSpec {
    fn default() -> Self {
        Self { box_scale: 1.0, offset_factor: 4.0, n: 8.0, l: 8.0, s: 0.0, sigma: 0.5 }
    }
}

impl CounterexampleSpec {
    /// `N e₁ + λQ`, `(N + cλ) e₁ + λQ`, `N e₁ + cλ e₂ + λQ`.
    pub fn z3_boxes(&self) -> [FrequencyBox; 3] {
        let (n, off, lam) = (self.n, self.offset_factor * self.box_scale, self.box_scale);
        [
            FrequencyBox::new([n, 0.0, 0.0], lam),
            FrequencyBox::new([n + off, 0.0, 0.0], lam),
            FrequencyBox::new([n, off, 0.0], lam),
        ]
    }

    /// `N e₁ + cλ(e₁ + e₂) + λQ`, reached by the non-resonant interaction.
    pub fn z3_target(&self) -> FrequencyBox {
        let off = self.offset_factor * self.box_scale;
        FrequencyBox::new([self.n + off, off, 0.0], self.box_scale)
    }

    /// `A₁ = L e₁ + λQ`, `A₂ = λQ`, `A₃ = N e₂ + λQ`.
    pub fn trilinear_boxes(&self) -> [FrequencyBox; 3] {
        let lam = self.box_scale;
        [
            FrequencyBox::new([self.l, 0.0, 0.0], lam),
            FrequencyBox::new([0.0, 0.0, 0.0], lam),
            FrequencyBox::new([0.0, self.n, 0.0], lam),
        ]
    }

    /// Disjointness, non-empty lattice intersection and retained-range checks.
    pub fn validate(&self, grid: &GridSpec, boxes: &[FrequencyBox]) -> Result<(), ExperimentError> {
        let r = grid.oversampling() as f64;
        if !(self.box_scale * r >= 1.0) {
            return Err(ExperimentError::Geometry(format!(
                "box side {} is below the lattice spacing 1/{}",
                self.box_scale, r
            )));
        }
        for (i, a) in boxes.iter().enumerate() {
            for b in &boxes[i + 1..] {
                if !a.is_disjoint(b) {
                    return Err(ExperimentError::Geometry(format!("boxes {a:?} and {b:?} overlap")));
                }
            }
        }
        let k = grid.dealias_cutoff();
        for b in boxes {
            for (lo, hi) in b.ranges(grid) {
                if hi < lo {
                    return Err(ExperimentError::Geometry(format!("box {b:?} contains no lattice point")));
                }
                let worst = lo.abs().max(hi.abs());
                if worst > k {
                    return Err(ExperimentError::BeyondNyquist {
                        frequency: worst as f64 / r,
                        limit: k as f64 / r,
                    });
                }
            }
        }
        Ok(())
    }
}

/// `amplitude · Σ_j 1_{B_j}` on the lattice.
pub fn box_field(grid: GridSpec, boxes: &[FrequencyBox], amplitude: f64) -> Result<SpectralField, ExperimentError> {
    let mut f = SpectralField::zeros(grid);
    for b in boxes {
        for m in b.lattice_modes(&grid) {
            let i = grid.flat_index(m).ok_or(ExperimentError::BeyondNyquist {
                frequency: m.iter().map(|v| v.abs()).max().unwrap_or(0) as f64 / grid.oversampling() as f64,
                limit: grid.nyquist(),
            })?;
            f.coefficients_mut()[i] += amplitude;
        }
    }
    Ok(f)
}

/// `sup |Φ| = sup 2|⟨ξ₃ − ξ₂, ξ₁ − ξ₂⟩|` over lattice points `ξ_j` drawn from any
/// of the boxes (all ordered choices, repetitions included).
///
/// The inner product splits into a sum of per-axis terms, so its extrema are
/// sums of exact one-dimensional extrema.
pub fn sup_phase(grid: &GridSpec, boxes: &[FrequencyBox]) -> f64 {
    let r = grid.oversampling() as f64;
    let ranges: Vec<[(i64, i64); 3]> = boxes.iter().map(|b| b.ranges(grid)).collect();
    let mut sup = 0.0f64;
    for a in &ranges {
        for b in &ranges {
            for c in &ranges {
                let (mut hi, mut lo) = (0.0, 0.0);
                for d in 0..3 {
                    let (mut dh, mut dl) = (f64::NEG_INFINITY, f64::INFINITY);
                    for x1 in a[d].0..=a[d].1 {
                        for x2 in b[d].0..=b[d].1 {
                            for x3 in c[d].0..=c[d].1 {
                                let v = ((x3 - x2) * (x1 - x2)) as f64 / (r * r);
                                dh = dh.max(v);
                                dl = dl.min(v);
                            }
                        }
                    }
                    hi += dh;
                    lo += dl;
                }
                sup = sup.max(2.0 * hi.abs()).max(2.0 * lo.abs());
            }
        }
    }
    sup
}

/// Time resolution of the counterexample evolutions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CounterexampleOptions {
    /// Time nodes on `[0, t_*]`.
    pub nodes: usize,
    pub quadrature: Quadrature,
    /// Target of `t_*·sup|Φ|`; must not exceed 0.1.
    pub phase_fraction: f64,
}

impl Default for CounterexampleOptions {
    fn default() -> Self {
        Self { nodes: 9, quadrature: Quadrature::Trapezoid, phase_fraction: 0.1 }
    }
}

impl CounterexampleOptions {
    fn check(&self) -> Result<(), ExperimentError> {
        if !(self.phase_fraction > 0.0 && self.phase_fraction <= 0.1) {
            return Err(ExperimentError::InvalidParameter(format!(
                "phase fraction {} outside (0, 0.1]",
                self.phase_fraction
            )));
        }
        if self.nodes < 2 {
            return Err(ExperimentError::InvalidParameter("at least 2 time nodes".into()));
        }
        Ok(())
    }
}

/// One frequency `N` of the z₃ construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Z3Row {
    pub n: f64,
    pub t_star: f64,
    pub sup_phase: f64,
    pub data_l2: f64,
    /// `‖z₃(t_*)‖_{H^σ}`.
    pub z3_norm: f64,
    /// `min_{ξ ∈ target} |ẑ₃(t_*, ξ)|`.
    pub target_min: f64,
    /// `target_min / (t_* (λR)⁶)`, box size counted in lattice points.
    pub c0: f64,
    /// Log-log slope of `min_target |ẑ₃(t)|` against `t` over the nodes in `(0, t_*]`.
    pub time_exponent: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Z3Counterexample {
    pub spec: CounterexampleSpec,
    pub rows: Vec<Z3Row>,
    /// `log ‖z₃(t_*)‖_{H^σ}` against `log N`.
    pub growth: FitResult,
    /// Smallest `c₀` over the sweep.
    pub c0: f64,
    /// `max/min − 1` of `‖φ‖_{L²}` over the sweep.
    pub data_l2_spread: f64,
}

/// Third-order response of three small boxes near `N e₁`, swept over `N`.
///
/// The data are the deterministic box indicators (a single randomization cube
/// carries the whole support, so the random coefficient is a common factor set
/// to 1). For each `N`, `t_*` makes `t_*·sup|Φ|` equal to the phase fraction.
pub fn z3_nonsmoothing_counterexample(
    grid: GridSpec,
    spec: &CounterexampleSpec,
    ns: &[f64],
    opts: &CounterexampleOptions,
) -> Result<Z3Counterexample, ExperimentError> {
    opts.check()?;
    let prop = Propagator::new(grid);
    let lattice = spec.box_scale * grid.oversampling() as f64;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let sp = CounterexampleSpec { n, ..*spec };
        let boxes = sp.z3_boxes();
        let target = sp.z3_target();
        sp.validate(&grid, &boxes)?;
        sp.validate(&grid, &[target])?;
        let sup = sup_phase(&grid, &boxes);
        let t_star = if sup > 0.0 { (opts.phase_fraction / sup).min(1.0) } else { 1.0 };
        let phi = box_field(grid, &boxes, 1.0)?;
        let tg = TimeGrid::new(t_star, opts.nodes)?;
        let z1 = free_evolution(&phi, tg);
        let cached = CachedPhysical::new(&z1);
        let z3 = duhamel_trilinear_with(&prop, &cached, &cached, &cached, opts.quadrature)?;
        let idx: Vec<usize> =
            target.lattice_modes(&grid).iter().map(|m| grid.flat_index(*m).expect("validated")).collect();
        let target_min_at = |f: &SpectralField| {
            idx.iter().map(|&i| f.coefficients()[i].norm()).fold(f64::INFINITY, f64::min)
        };
        let (ts, mins): (Vec<f64>, Vec<f64>) =
            (1..tg.nodes()).map(|m| (tg.node(m), target_min_at(z3.snapshot(m)))).unzip();
        let time_exponent = if ts.len() >= 3 { loglog_fit(&ts, &mins).map(|f| f.slope).unwrap_or(f64::NAN) } else { f64::NAN };
        let target_min = target_min_at(z3.last());
        rows.push(Z3Row {
            n,
            t_star,
            sup_phase: sup,
            data_l2: sobolev_norm(&phi, 0.0),
            z3_norm: sobolev_norm(z3.last(), spec.sigma),
            target_min,
            c0: target_min / (t_star * lattice.powi(6)),
            time_exponent,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.n).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.z3_norm).collect();
    let growth = loglog_fit(&xs, &ys)?;
    let c0 = rows.iter().map(|r| r.c0).fold(f64::INFINITY, f64::min);
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.data_l2), hi.max(r.data_l2)));
    Ok(Z3Counterexample { spec: *spec, rows, growth, c0, data_l2_spread: hi / lo - 1.0 })
}

/// Fit of `‖φ‖_{L²}` of the z₃ data against the box side over `lambdas`.
pub fn z3_data_scaling(grid: GridSpec, spec: &CounterexampleSpec, lambdas: &[f64]) -> Result<FitResult, ExperimentError> {
    let mut norms = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        let sp = CounterexampleSpec { box_scale: lam, ..*spec };
        let boxes = sp.z3_boxes();
        sp.validate(&grid, &boxes)?;
        norms.push(sobolev_norm(&box_field(grid, &boxes, 1.0)?, 0.0));
    }
    loglog_fit(lambdas, &norms)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrilinearRow {
    pub n: f64,
    pub l: f64,
    pub box_scale: f64,
    pub t_star: f64,
    pub sup_phase: f64,
    /// `‖I(u₁, u₂, u₃)(t_*)‖_{H^σ}`.
    pub numerator: f64,
    /// `Π_j ‖φ_j‖_{H^s}`.
    pub denominator: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrilinearReport {
    pub rows: Vec<TrilinearRow>,
    /// Log-log fit of the ratio against `N`.
    pub fit: FitResult,
    /// Log-log fit of the denominator against `N`.
    pub denominator_fit: FitResult,
    /// `σ − 3s + 1`.
    pub predicted: f64,
    /// `t_* = κ/(N L)` with this `κ`.
    pub kappa: f64,
}

/// Three boxes `L e₁ + λQ`, `λQ`, `N e₂ + λQ` with `t_* = κ/(NL)`.
///
/// `κ` is the largest value keeping `t_*·sup|Φ|` at most the phase fraction
/// for every geometry of the sweep, so all rows share one `κ`. All specs must
/// share `(s, σ)`.
pub fn trilinear_nonsmoothing(
    grid: GridSpec,
    specs: &[CounterexampleSpec],
    opts: &CounterexampleOptions,
) -> Result<TrilinearReport, ExperimentError> {
    opts.check()?;
    let first = specs.first().ok_or(ExperimentError::TooFewPoints(0))?;
    if specs.iter().any(|s| s.s != first.s || s.sigma != first.sigma) {
        return Err(ExperimentError::InvalidParameter("all geometries must share (s, σ)".into()));
    }
    let mut sups = Vec::with_capacity(specs.len());
    for sp in specs {
        let boxes = sp.trilinear_boxes();
        sp.validate(&grid, &boxes)?;
        sups.push(sup_phase(&grid, &boxes));
    }
    let kappa = specs
        .iter()
        .zip(&sups)
        .map(|(sp, &sup)| opts.phase_fraction * sp.n * sp.l / sup)
        .fold(f64::INFINITY, f64::min);
    let prop = Propagator::new(grid);
    let mut rows = Vec::with_capacity(specs.len());
    for (sp, &sup) in specs.iter().zip(&sups) {
        let t_star = kappa / (sp.n * sp.l);
        let bound = t_star * sup;
        if bound > 0.1 * (1.0 + 1e-12) {
            return Err(ExperimentError::PhaseTooLarge(bound));
        }
        let tg = TimeGrid::new(t_star, opts.nodes)?;
        let [a1, a2, a3] = sp.trilinear_boxes();
        let data: Vec<SpectralField> =
            [a1, a2, a3].iter().map(|b| box_field(grid, &[*b], 1.0)).collect::<Result<_, _>>()?;
        let trajs: Vec<_> = data.iter().map(|d| free_evolution(d, tg)).collect();
        let cached: Vec<CachedPhysical<'_>> = trajs.iter().map(CachedPhysical::new).collect();
        let i = duhamel_trilinear_with(&prop, &cached[0], &cached[1], &cached[2], opts.quadrature)?;
        let numerator = sobolev_norm(i.last(), sp.sigma);
        let denominator: f64 = data.iter().map(|d| sobolev_norm(d, sp.s)).product();
        rows.push(TrilinearRow {
            n: sp.n,
            l: sp.l,
            box_scale: sp.box_scale,
            t_star,
            sup_phase: sup,
            numerator,
            denominator,
            ratio: numerator / denominator,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.n).collect();
    let fit = loglog_fit(&xs, &rows.iter().map(|r| r.ratio).collect::<Vec<_>>())?;
    let denominator_fit = loglog_fit(&xs, &rows.iter().map(|r| r.denominator).collect::<Vec<_>>())?;
    Ok(TrilinearReport { rows, fit, denominator_fit, predicted: first.sigma - 3.0 * first.s + 1.0, kappa })
}

/// Discrete lower bound for `1_{a+λQ} ∗ 1_{b+λQ}` on `a + b + λQ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxConvolution {
    /// Minimum of the lattice convolution (cell volume `R^{−3}` per point) over
    /// the lattice points of `a + b + λQ`.
    pub min_value: f64,
    /// Value at `ξ = a + b`.
    pub centre_value: f64,
    /// `min_value / λ³`.
    pub constant: f64,
}

fn axis_count(lo: i64, hi: i64) -> i64 {
    (hi - lo + 1).max(0)
}

/// Lattice convolution of two boxes evaluated on the sum box.
///
/// The convolution of products of intervals factorizes over the axes, so the
/// minimum over the (product) sum box is the product of per-axis minima.
pub fn box_convolution_bound(
    grid: &GridSpec,
    a: [f64; 3],
    b: [f64; 3],
    lambda: f64,
) -> Result<BoxConvolution, ExperimentError> {
    let r = grid.oversampling() as f64;
    if !(lambda * r >= 1.0) {
        return Err(ExperimentError::Geometry(format!("box side {lambda} below lattice spacing")));
    }
    let ba = FrequencyBox::new(a, lambda);
    let bb = FrequencyBox::new(b, lambda);
    let sum = FrequencyBox::new([a[0] + b[0], a[1] + b[1], a[2] + b[2]], lambda);
    let mut min_value = 1.0;
    let mut centre_value = 1.0;
    for d in 0..3 {
        let (alo, ahi) = ba.axis_range(d, r);
        let (blo, bhi) = bb.axis_range(d, r);
        // number of j in A with x − j in B
        let count = |x: i64| axis_count(alo.max(x - bhi), ahi.min(x - blo)) as f64 / r;
        let (slo, shi) = sum.axis_range(d, r);
        min_value *= (slo..=shi).map(count).fold(f64::INFINITY, f64::min);
        centre_value *= count((r * (a[d] + b[d])).round() as i64);
    }
    Ok(BoxConvolution { min_value, centre_value, constant: min_value / lambda.powi(3) })
}
