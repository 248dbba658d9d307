//! Wiener randomization: unit-cube windows in frequency space and one random
//! coefficient per cube.
//!
//! Coefficients are counter based: the draw for cube `n` of ensemble member
//! `i` depends only on `(master_seed, i, n)`, so any worker can rebuild any
//! member without coordination.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::spectral::SpectralField;

/// Frequency window `ψ` whose integer translates sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WindowSpec {
    /// Indicator of `(-1/2, 1/2]³`.
    #[default]
    SharpCube,
    /// Tensorized C² window with transition half-width `width ∈ (0, 1/2)`.
    SmoothBump { width: f64 },
}

impl WindowSpec {
    pub fn smooth_bump(width: f64) -> Result<Self, String> {
        if width > 0.0 && width < 0.5 {
            Ok(Self::SmoothBump { width })
        } else {
            Err(format!("smooth-bump width must lie in (0, 1/2), got {width}"))
        }
    }
}

/// Quintic smoothstep from 0 at `-w` to 1 at `w`, with `H(y) + H(-y) = 1`.
fn smooth_heaviside(y: f64, w: f64) -> f64 {
    if y <= -w {
        0.0
    } else if y >= w {
        1.0
    } else {
        let t = (y + w) / (2.0 * w);
        t * t * t * (t * (6.0 * t - 15.0) + 10.0)
    }
}

fn window_1d(x: f64, spec: WindowSpec) -> f64 {
    match spec {
        WindowSpec::SharpCube => {
            if x > -0.5 && x <= 0.5 {
                1.0
            } else {
                0.0
            }
        }
        WindowSpec::SmoothBump { width } => {
            smooth_heaviside(x + 0.5, width) - smooth_heaviside(x - 0.5, width)
        }
    }
}

/// `ψ(ξ − n)`.
pub fn window_weight(xi: [f64; 3], n: [i64; 3], spec: WindowSpec) -> f64 {
    (0..3).map(|d| window_1d(xi[d] - n[d] as f64, spec)).product()
}

/// Cube index `n` with `m/R − n ∈ (−1/2, 1/2]`, in exact integer arithmetic.
pub fn sharp_cube_of(m: i64, r: i64) -> i64 {
    // smallest n with 2m - 2nR < R + ... i.e. n = ceil((2m - R) / 2R)
    let num = 2 * m - r;
    let den = 2 * r;
    num.div_euclid(den) + if num.rem_euclid(den) == 0 { 0 } else { 1 }
}

/// Distribution of the cube coefficients `g_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RandomLaw {
    /// Real and imaginary parts independent `N(0, 1/2)`.
    #[default]
    ComplexGaussian,
    /// `e^{iθ}`, `θ` uniform.
    UniformCircle,
}

impl std::str::FromStr for RandomLaw {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "complex-gaussian" | "gaussian" => Ok(Self::ComplexGaussian),
            "uniform-circle" | "circle" => Ok(Self::UniformCircle),
            other => Err(format!("unknown law '{other}'")),
        }
    }
}

/// One mean-zero, unit-variance draw.
pub fn sample_unit(law: RandomLaw, rng: &mut impl Rng) -> Complex64 {
    match law {
        RandomLaw::ComplexGaussian => {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        }
        RandomLaw::UniformCircle => {
            let theta = rng.gen::<f64>() * std::f64::consts::TAU;
            let (s, c) = theta.sin_cos();
            Complex64::new(c, s)
        }
    }
}

/// Member `member` of the ensemble seeded by `master`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MemberSeed {
    pub master: u64,
    pub member: u64,
}

impl MemberSeed {
    /// Independent stream for cube `n`.
    pub fn cube_stream(&self, n: [i64; 3]) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        seed[..8].copy_from_slice(&self.master.to_le_bytes());
        seed[8..16].copy_from_slice(&self.member.to_le_bytes());
        for (d, c) in n.iter().enumerate() {
            seed[16 + 4 * d..20 + 4 * d].copy_from_slice(&(*c as i32).to_le_bytes());
        }
        seed[28..].copy_from_slice(b"cube");
        ChaCha8Rng::from_seed(seed)
    }

    /// General-purpose stream for the member (not tied to a cube).
    pub fn stream(&self, tag: &[u8; 4]) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        seed[..8].copy_from_slice(&self.master.to_le_bytes());
        seed[8..16].copy_from_slice(&self.member.to_le_bytes());
        seed[28..].copy_from_slice(tag);
        ChaCha8Rng::from_seed(seed)
    }
}

/// Law, master seed and size of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub law: RandomLaw,
    pub master_seed: u64,
    pub count: usize,
}

impl EnsembleSpec {
    pub fn new(law: RandomLaw, master_seed: u64, count: usize) -> Self {
        Self { law, master_seed, count }
    }

    pub fn member(&self, i: usize) -> MemberSeed {
        MemberSeed { master: self.master_seed, member: i as u64 }
    }
}

/// `φ^ω = Σ_n g_n ψ(D − n) φ` with coefficients supplied by `coef(n)`.
pub fn wiener_randomize_with(
    phi: &SpectralField,
    spec: WindowSpec,
    mut coef: impl FnMut([i64; 3]) -> Complex64,
) -> SpectralField {
    let grid = *phi.grid();
    let r = grid.oversampling() as i64;
    let mut cache: HashMap<[i64; 3], Complex64> = HashMap::new();
    let mut out = SpectralField::zeros(grid);
    for (i, (o, c)) in out.coefficients_mut().iter_mut().zip(phi.coefficients()).enumerate() {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let m = grid.modes(i);
        let mut g = |n: [i64; 3]| *cache.entry(n).or_insert_with(|| coef(n));
        match spec {
            WindowSpec::SharpCube => {
                let n = [sharp_cube_of(m[0], r), sharp_cube_of(m[1], r), sharp_cube_of(m[2], r)];
                *o = g(n) * c;
            }
            WindowSpec::SmoothBump { .. } => {
                let xi = grid.wavevector(i);
                let base = [xi[0].round() as i64, xi[1].round() as i64, xi[2].round() as i64];
                let mut acc = Complex64::new(0.0, 0.0);
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        for dz in -1..=1 {
                            let n = [base[0] + dx, base[1] + dy, base[2] + dz];
                            let w = window_weight(xi, n, spec);
                            if w != 0.0 {
                                acc += g(n) * w;
                            }
                        }
                    }
                }
                *o = acc * c;
            }
        }
    }
    out
}

/// Randomize `φ` for one ensemble member.
pub fn wiener_randomize(
    phi: &SpectralField,
    spec: WindowSpec,
    law: RandomLaw,
    seed: MemberSeed,
) -> SpectralField {
    wiener_randomize_with(phi, spec, |n| sample_unit(law, &mut seed.cube_stream(n)))
}

/// Smallest `c` with `log E e^{κ·g} <= c|κ|²` over the sampled `κ`, where
/// `κ·g = Re(κ̄ g)`.
pub fn empirical_moment_constant(samples: &[Complex64], kappas: &[Complex64]) -> f64 {
    let n = samples.len() as f64;
    kappas
        .iter()
        .filter(|k| k.norm_sqr() > 0.0)
        .map(|k| {
            let mean = samples.iter().map(|g| (k.re * g.re + k.im * g.im).exp()).sum::<f64>() / n;
            mean.ln() / k.norm_sqr()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sharp_cube_half_open() {
        assert_eq!(sharp_cube_of(0, 1), 0);
        assert_eq!(sharp_cube_of(1, 2), 0); // ξ = 1/2 belongs to cube 0
        assert_eq!(sharp_cube_of(-1, 2), -1); // ξ = -1/2 belongs to cube -1
        assert_eq!(sharp_cube_of(3, 4), 1); // 3/4 → cube 1
        assert_eq!(sharp_cube_of(-2, 4), -1);
        for r in 1..6 {
            for m in -20..20 {
                let n = sharp_cube_of(m, r);
                let x = m as f64 / r as f64 - n as f64;
                assert!(x > -0.5 && x <= 0.5, "m={m} r={r}");
            }
        }
    }

    #[test]
    fn face_midpoint_is_half() {
        let w = WindowSpec::smooth_bump(0.2).unwrap();
        assert!((window_weight([0.5, 0.0, 0.0], [0, 0, 0], w) - 0.5).abs() < 1e-15);
    }
}
