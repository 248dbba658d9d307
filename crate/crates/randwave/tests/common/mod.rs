#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use randwave::spectral::{GridSpec, SpectralField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Random coefficients on modes with `|m_i| <= k`.
pub fn random_field(grid: GridSpec, k: i64, seed: u64) -> SpectralField {
    let mut r = rng(seed);
    SpectralField::from_fn(grid, |m, _| {
        if m.iter().all(|x| x.abs() <= k) {
            c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Brute-force synthesis `f(x_j) = Σ_ξ c_ξ e^{i x_j·ξ}`.
pub fn direct_synthesis(f: &SpectralField) -> Vec<Complex64> {
    let g = f.grid();
    let n = g.points();
    let w = 2.0 * std::f64::consts::PI / n as f64;
    let mut out = vec![c(0.0, 0.0); g.len()];
    for (j, o) in out.iter_mut().enumerate() {
        let jj = [j / (n * n), (j / n) % n, j % n];
        for (i, coef) in f.coefficients().iter().enumerate() {
            let m = g.modes(i);
            let ph = w * (0..3).map(|d| jj[d] as f64 * m[d] as f64).sum::<f64>();
            *o += coef * Complex64::from_polar(1.0, ph);
        }
    }
    out
}

/// Exact `Σ_{ξ₁−ξ₂+ξ₃=ξ} a_{ξ₁} b̄_{ξ₂} c_{ξ₃}` restricted to representable `ξ`.
pub fn direct_trilinear(a: &SpectralField, b: &SpectralField, cc: &SpectralField) -> SpectralField {
    let g = *a.grid();
    let nz = |f: &SpectralField| -> Vec<([i64; 3], Complex64)> {
        f.coefficients()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm_sqr() > 0.0)
            .map(|(i, v)| (g.modes(i), *v))
            .collect()
    };
    let (na, nb, nc) = (nz(a), nz(b), nz(cc));
    let mut out = SpectralField::zeros(g);
    for (m1, v1) in &na {
        for (m2, v2) in &nb {
            for (m3, v3) in &nc {
                let m = [m1[0] - m2[0] + m3[0], m1[1] - m2[1] + m3[1], m1[2] - m2[2] + m3[2]];
                if let Some(i) = g.flat_index(m) {
                    out.coefficients_mut()[i] += v1 * v2.conj() * v3;
                }
            }
        }
    }
    out
}

pub fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.coefficients().iter().zip(b.coefficients()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &SpectralField) -> f64 {
    a.coefficients().iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Least-squares slope of `log2 y` against `log2 x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.log2()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.log2()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
