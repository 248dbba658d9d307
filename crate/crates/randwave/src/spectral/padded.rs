//! Pointwise products evaluated on an enlarged grid.
//!
//! Inputs are truncated to the retained cube `|m_i| <= K`, synthesized on a grid
//! of `P >= 4K + 1` points per axis, multiplied, analysed, and truncated back to
//! the retained cube. The result equals the exact convolution restricted to the
//! retained modes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use super::grid::smooth_size;
use super::{Fft3, GridSpec, SpectralField};

struct Embedding {
    native: Vec<usize>,
    padded: Vec<usize>,
    p: usize,
    /// Padded indices `i` along one axis that carry a retained mode.
    active: Vec<bool>,
}

fn embedding(grid: &GridSpec, k: i64, p: usize) -> Embedding {
    let pi = p as i64;
    let mut native = Vec::new();
    let mut padded = Vec::new();
    for mx in -k..=k {
        for my in -k..=k {
            for mz in -k..=k {
                if let Some(i) = grid.flat_index([mx, my, mz]) {
                    native.push(i);
                    let w = |m: i64| m.rem_euclid(pi) as usize;
                    padded.push((w(mx) * p + w(my)) * p + w(mz));
                }
            }
        }
    }
    let mut active = vec![false; p];
    for m in -k..=k {
        active[m.rem_euclid(pi) as usize] = true;
    }
    Embedding { native, padded, p, active }
}

type EmbeddingKey = (usize, usize, u64);

static EMBEDDINGS: OnceLock<Mutex<HashMap<EmbeddingKey, Arc<Embedding>>>> = OnceLock::new();

/// Embedding of the retained cube, cached per grid.
fn retained_embedding(grid: &GridSpec) -> Arc<Embedding> {
    let key = (grid.points(), grid.oversampling(), grid.dealias_fraction().to_bits());
    let cache = EMBEDDINGS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("embedding cache poisoned");
    map.entry(key)
        .or_insert_with(|| Arc::new(embedding(grid, grid.dealias_cutoff(), grid.padded_points())))
        .clone()
}

/// Physical samples of the retained part of `f` on the padded grid.
pub fn synthesize_padded(f: &SpectralField) -> Vec<Complex64> {
    synthesize_with(f, &retained_embedding(f.grid()))
}

/// Retained coefficients of padded-grid physical samples.
pub fn analyze_padded(grid: GridSpec, samples: Vec<Complex64>) -> SpectralField {
    analyze_with(grid, samples, &retained_embedding(&grid))
}

fn synthesize_with(f: &SpectralField, e: &Embedding) -> Vec<Complex64> {
    let p = e.p;
    let mut data = vec![Complex64::new(0.0, 0.0); p * p * p];
    let c = f.coefficients();
    for (&i, &j) in e.native.iter().zip(&e.padded) {
        data[j] = c[i];
    }
    Fft3::plan(p).inverse_pruned(&mut data, Some(&e.active));
    data
}

fn analyze_with(grid: GridSpec, mut data: Vec<Complex64>, e: &Embedding) -> SpectralField {
    let p = e.p;
    Fft3::plan(p).forward_pruned(&mut data, Some(&e.active));
    let inv = 1.0 / (p * p * p) as f64;
    let mut out = SpectralField::zeros(grid);
    let c = out.coefficients_mut();
    for (&i, &j) in e.native.iter().zip(&e.padded) {
        c[i] = data[j] * inv;
    }
    out
}

/// Samples of the whole field (no truncation) on a grid fine enough that
/// products of up to `degree` factors are integrated exactly.
pub(crate) fn synthesize_full(f: &SpectralField, degree: usize) -> (Vec<Complex64>, usize) {
    let grid = f.grid();
    let k = f
        .coefficients()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm_sqr() > 0.0)
        .map(|(i, _)| grid.modes(i).iter().map(|m| m.abs()).max().unwrap_or(0))
        .max()
        .unwrap_or(0);
    let p = smooth_size(degree * k as usize + 1);
    let e = embedding(grid, k, p);
    (synthesize_with(f, &e), p)
}

/// Dealiased `|u|²u`.
pub fn pointwise_cubic(u: &SpectralField) -> SpectralField {
    let mut data = synthesize_padded(u);
    for v in &mut data {
        *v *= v.norm_sqr();
    }
    analyze_padded(*u.grid(), data)
}

/// Dealiased `u₁ ū₂ u₃`.
pub fn trilinear_product(u1: &SpectralField, u2: &SpectralField, u3: &SpectralField) -> SpectralField {
    assert!(u1.grid() == u2.grid() && u2.grid() == u3.grid(), "trilinear product across grids");
    let a = synthesize_padded(u1);
    let b = synthesize_padded(u2);
    let mut c = synthesize_padded(u3);
    for ((z, x), y) in c.iter_mut().zip(&a).zip(&b) {
        *z = x * y.conj() * *z;
    }
    analyze_padded(*u1.grid(), c)
}
