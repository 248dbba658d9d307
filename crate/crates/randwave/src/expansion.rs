//! Multilinear Duhamel towers built on the random linear solution `z₁`, and
//! the exponent arithmetic that predicts their regularity.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evolution::{
    duhamel_pointwise, duhamel_trilinear_with, CachedPhysical, EvolutionError, PhysicalSource,
    Propagator, Quadrature,
};
use crate::randomization::MemberSeed;
use crate::spectral::{
    analyze_padded, save_snapshot, synthesize_padded, FieldTrajectory, GridSpec, SpectralError,
    SpectralField, TimeGrid,
};

pub type Rational = Ratio<i128>;

/// Largest depth of the full tower (orders up to 7).
pub const FULL_Z_MAX_DEPTH: usize = 4;

#[derive(Debug, Error)]
pub enum ExpansionError {
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("full tower depth {0} exceeds the cap {FULL_Z_MAX_DEPTH}")]
    DepthCap(usize),
    #[error("depth must be >= 1")]
    ZeroDepth,
    #[error("s = {0} is outside (1/6, 1/2)")]
    RegularityOutOfRange(f64),
    #[error("forcing for the full tower is only defined up to depth 2, got {0}")]
    FullForcing(usize),
    #[error("expansion holds {have} terms, {need} requested")]
    TooShallow { have: usize, need: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// `α_k` by the recursion `α_k = (α_{k−1} + 3)/2`, `α₁ = 1`.
pub fn alpha(k: usize) -> Rational {
    assert!(k >= 1, "alpha is indexed from 1");
    let mut a = Rational::from_integer(1);
    for _ in 1..k {
        a = (a + Rational::from_integer(3)) / Rational::from_integer(2);
    }
    a
}

/// `α_k = 2(1 − 2^{1−k}) + 1`.
pub fn alpha_closed_form(k: usize) -> Rational {
    assert!(k >= 1, "alpha is indexed from 1");
    let half_pow = Rational::new(1, 1i128 << (k - 1));
    Rational::from_integer(2) * (Rational::from_integer(1) - half_pow) + Rational::from_integer(1)
}

/// `(α₁, …, α_K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSequence(Vec<Rational>);

impl AlphaSequence {
    pub fn up_to(k: usize) -> Self {
        let mut v = Vec::with_capacity(k);
        let mut a = Rational::from_integer(1);
        for i in 0..k {
            if i > 0 {
                a = (a + Rational::from_integer(3)) / Rational::from_integer(2);
            }
            v.push(a);
        }
        Self(v)
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn get(&self, k: usize) -> Option<Rational> {
        k.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Supremal regularity `α_k s` of the order-`2k−1` term, flagged when `s`
/// violates `s < 1/α_{k−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictedSigma {
    pub value: f64,
    pub in_hypothesis: bool,
}

pub fn predicted_sigma(k: usize, s: f64) -> PredictedSigma {
    let value = to_f64(alpha(k)) * s;
    let in_hypothesis = s > 0.0 && (k < 2 || s * to_f64(alpha(k - 1)) < 1.0);
    PredictedSigma { value, in_hypothesis }
}

/// `1/(2α_{k+1})`: below it depth `k` no longer suffices.
pub fn regularity_threshold(k: usize) -> Rational {
    Rational::from_integer(1) / (Rational::from_integer(2) * alpha(k + 1))
}

/// Depth `k` with `1/(2α_{k+1}) < s <= 1/(2α_k)`; requires `1/6 < s < 1/2`.
pub fn step_count_for(s: f64) -> Result<usize, ExpansionError> {
    if !(s > 1.0 / 6.0 && s < 0.5) {
        return Err(ExpansionError::RegularityOutOfRange(s));
    }
    let mut k = 1;
    // 2 α_{k+1} s <= 1 means s is not above the next threshold
    while 2.0 * to_f64(alpha(k + 1)) * s <= 1.0 {
        k += 1;
    }
    Ok(k)
}

/// Which tower an expansion holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    FullZ,
    UnbalancedZeta,
}

/// Provenance of an expansion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionMeta {
    pub seed: Option<MemberSeed>,
    pub grid: GridSpec,
    pub time_grid: TimeGrid,
    pub quadrature: Quadrature,
}

/// Terms of orders `1, 3, …, 2k−1`.
#[derive(Debug, Clone)]
pub struct ExpansionSet {
    variant: Variant,
    terms: Vec<FieldTrajectory>,
    meta: ExpansionMeta,
}

impl ExpansionSet {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn terms(&self) -> &[FieldTrajectory] {
        &self.terms
    }

    pub fn depth(&self) -> usize {
        self.terms.len()
    }

    pub fn meta(&self) -> &ExpansionMeta {
        &self.meta
    }

    pub fn with_seed(mut self, seed: MemberSeed) -> Self {
        self.meta.seed = Some(seed);
        self
    }

    /// Term of odd order `2ℓ − 1`.
    pub fn order(&self, order: usize) -> Option<&FieldTrajectory> {
        if order % 2 == 0 {
            return None;
        }
        self.terms.get(order / 2)
    }

    /// The first `k` terms.
    pub fn truncated(&self, k: usize) -> Result<ExpansionSet, ExpansionError> {
        if k == 0 {
            return Err(ExpansionError::ZeroDepth);
        }
        if k > self.terms.len() {
            return Err(ExpansionError::TooShallow { have: self.terms.len(), need: k });
        }
        Ok(ExpansionSet { variant: self.variant, terms: self.terms[..k].to_vec(), meta: self.meta.clone() })
    }

    /// Snapshot directory per order plus `expansion.json`.
    pub fn save(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>, ExpansionError> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (l, term) in self.terms.iter().enumerate() {
            let sub = dir.join(format!("order_{}", 2 * l + 1));
            fs::create_dir_all(&sub)?;
            for (m, snap) in term.snapshots().iter().enumerate() {
                let path = sub.join(format!("node_{m:04}.rwv"));
                save_snapshot(snap, &path)?;
                written.push(path);
            }
        }
        #[derive(Serialize)]
        struct Manifest<'a> {
            variant: Variant,
            orders: Vec<usize>,
            meta: &'a ExpansionMeta,
        }
        let manifest = Manifest {
            variant: self.variant,
            orders: (0..self.terms.len()).map(|l| 2 * l + 1).collect(),
            meta: &self.meta,
        };
        let path = dir.join("expansion.json");
        fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
        written.push(path);
        Ok(written)
    }
}

/// Ordered triples of odd indices `< order` summing to `order`.
pub fn ordered_triples(order: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    if order < 3 || order % 2 == 0 {
        return out;
    }
    for a in (1..order).step_by(2) {
        for b in (1..order).step_by(2) {
            if a + b < order {
                let c = order - a - b;
                if c % 2 == 1 && c < order {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

fn meta_for(z1: &FieldTrajectory, quadrature: Quadrature) -> ExpansionMeta {
    ExpansionMeta { seed: None, grid: *z1.grid(), time_grid: *z1.time_grid(), quadrature }
}

/// Full tower `z₁, z₃, …, z_{2k−1}`, each order summed over all ordered triples.
pub fn build_z_terms(
    z1: &FieldTrajectory,
    k_max: usize,
    quadrature: Quadrature,
) -> Result<ExpansionSet, ExpansionError> {
    if k_max == 0 {
        return Err(ExpansionError::ZeroDepth);
    }
    if k_max > FULL_Z_MAX_DEPTH {
        return Err(ExpansionError::DepthCap(k_max));
    }
    let prop = Propagator::new(*z1.grid());
    let mut terms = vec![z1.clone()];
    for l in 2..=k_max {
        let order = 2 * l - 1;
        let cached: Vec<CachedPhysical<'_>> = terms.iter().map(CachedPhysical::new).collect();
        let mut acc = FieldTrajectory::zeros(*z1.grid(), *z1.time_grid());
        for [a, b, c] in ordered_triples(order) {
            let t = duhamel_trilinear_with(
                &prop,
                &cached[a / 2],
                &cached[b / 2],
                &cached[c / 2],
                quadrature,
            )?;
            acc.add(&t)?;
        }
        drop(cached);
        terms.push(acc);
    }
    Ok(ExpansionSet { variant: Variant::FullZ, terms, meta: meta_for(z1, quadrature) })
}

/// Unbalanced tower: `ζ₁ = z₁`, `ζ₃ = I(z₁, z₁, z₁)`, and for `ℓ >= 3`
/// `ζ_{2ℓ−1} = −i∫S(t−t′)(2|z₁|²ζ_{2ℓ−3} + z₁² ζ̄_{2ℓ−3})`.
pub fn build_zeta_terms(
    z1: &FieldTrajectory,
    k_max: usize,
    quadrature: Quadrature,
) -> Result<ExpansionSet, ExpansionError> {
    if k_max == 0 {
        return Err(ExpansionError::ZeroDepth);
    }
    let prop = Propagator::new(*z1.grid());
    let base = CachedPhysical::new(z1);
    let mut terms = vec![z1.clone()];
    for l in 2..=k_max {
        let next = if l == 2 {
            duhamel_pointwise(&prop, &[&base], quadrature, |v| v[0] * v[0].conj() * v[0])?
        } else {
            let prev = terms.last().expect("tower is non-empty");
            duhamel_pointwise(&prop, &[&base, prev as &dyn PhysicalSource], quadrature, |v| {
                unbalanced(v[0], v[1])
            })?
        };
        terms.push(next);
    }
    Ok(ExpansionSet { variant: Variant::UnbalancedZeta, terms, meta: meta_for(z1, quadrature) })
}

/// `2|a|²b + a² b̄`, the sum of the three placements of `b` in `a ā a`.
#[inline]
pub fn unbalanced(a: Complex64, b: Complex64) -> Complex64 {
    a * b.conj() * a + a * a.conj() * b + b * a.conj() * a
}

/// Nonlinear forcing removed from the residual equation at depth `k`:
/// nothing for `k = 1`, `|z₁|²z₁` for `k = 2`, plus `2|z₁|²ζ_{2ℓ−3} + z₁²ζ̄_{2ℓ−3}`
/// for `ℓ = 3, …, k`.
pub fn forcing_sum(set: &ExpansionSet, k: usize) -> Result<FieldTrajectory, ExpansionError> {
    if k == 0 {
        return Err(ExpansionError::ZeroDepth);
    }
    if set.variant == Variant::FullZ && k > 2 {
        return Err(ExpansionError::FullForcing(k));
    }
    if k > set.depth() {
        return Err(ExpansionError::TooShallow { have: set.depth(), need: k });
    }
    let z1 = &set.terms[0];
    let grid = *z1.grid();
    let tg = *z1.time_grid();
    if k == 1 {
        return Ok(FieldTrajectory::zeros(grid, tg));
    }
    let mut snaps = Vec::with_capacity(tg.nodes());
    for m in 0..tg.nodes() {
        snaps.push(forcing_at_node(set, k, m));
    }
    Ok(FieldTrajectory::new(tg, snaps)?)
}

fn forcing_at_node(set: &ExpansionSet, k: usize, m: usize) -> SpectralField {
    let grid = *set.terms[0].grid();
    let a = synthesize_padded(set.terms[0].snapshot(m));
    let mut out: Vec<Complex64> = a.iter().map(|z| z * z.conj() * z).collect();
    for l in 3..=k {
        let b = synthesize_padded(set.terms[l - 2].snapshot(m));
        for ((o, x), y) in out.iter_mut().zip(&a).zip(&b) {
            *o += unbalanced(*x, *y);
        }
    }
    analyze_padded(grid, out)
}
