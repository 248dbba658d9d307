use std::collections::BTreeMap;

use serde::Serialize;

use super::{SpectralError, SpectralField};
use crate::spectral::GridSpec;

const INNER: f64 = 5.0 / 4.0;
const OUTER: f64 = 8.0 / 5.0;

fn bump(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else {
        (-1.0 / y).exp()
    }
}

/// Smooth even cutoff: 1 on `[-5/4, 5/4]`, 0 outside `[-8/5, 8/5]`.
pub fn eta(r: f64) -> f64 {
    let a = r.abs();
    if a <= INNER {
        1.0
    } else if a >= OUTER {
        0.0
    } else {
        let x = (a - INNER) / (OUTER - INNER);
        let (p, q) = (bump(1.0 - x), bump(x));
        p / (p + q)
    }
}

/// Symbol of the block `N`: `η(|ξ|)` for `N = 1`, else `η(|ξ|/N) − η(2|ξ|/N)`.
pub fn eta_block(n: u64, xi_abs: f64) -> f64 {
    if n <= 1 {
        eta(xi_abs)
    } else {
        let nf = n as f64;
        eta(xi_abs / nf) - eta(2.0 * xi_abs / nf)
    }
}

fn check_dyadic(n: u64) -> Result<(), SpectralError> {
    if n >= 1 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(SpectralError::NotDyadic(n))
    }
}

/// Dyadic sizes `1, 2, …, N_top` whose symbols telescope to 1 on the whole lattice.
pub fn dyadic_blocks(grid: &GridSpec) -> Vec<u64> {
    let top = grid.max_frequency();
    let mut blocks = vec![1u64];
    while INNER * (*blocks.last().unwrap() as f64) < top {
        let next = blocks.last().unwrap() * 2;
        blocks.push(next);
    }
    blocks
}

/// `P_N f`.
pub fn littlewood_paley(f: &SpectralField, n: u64) -> Result<SpectralField, SpectralError> {
    check_dyadic(n)?;
    let mut out = f.clone();
    out.apply_symbol(|xi| eta_block(n, (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt()));
    Ok(out)
}

/// Map `N ↦ ‖P_N f‖_{H^σ}` over dyadic `N`.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DyadicProfile(BTreeMap<u64, f64>);

impl DyadicProfile {
    pub fn from_entries(entries: impl IntoIterator<Item = (u64, f64)>) -> Result<Self, SpectralError> {
        let mut map = BTreeMap::new();
        for (n, v) in entries {
            check_dyadic(n)?;
            map.insert(n, v);
        }
        Ok(Self(map))
    }

    pub fn get(&self, n: u64) -> Option<f64> {
        self.0.get(&n).copied()
    }

    pub fn blocks(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entries with `lo <= N <= hi`.
    pub fn window(&self, lo: u64, hi: u64) -> Vec<(u64, f64)> {
        self.0.range(lo..=hi).map(|(k, v)| (*k, *v)).collect()
    }

    /// `(Σ_N value²)^{1/2}`.
    pub fn l2_sum(&self) -> f64 {
        self.0.values().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// `‖P_N f‖_{H^σ}` for every block of the grid.
pub fn dyadic_profile(f: &SpectralField, sigma: f64) -> DyadicProfile {
    let grid = f.grid();
    let blocks = dyadic_blocks(grid);
    let mut acc = vec![0.0; blocks.len()];
    let xi2 = grid.frequency_squares();
    for (c, &k2) in f.coefficients().iter().zip(&xi2) {
        let w = c.norm_sqr();
        if w == 0.0 {
            continue;
        }
        let weight = (1.0 + k2).powf(sigma) * w;
        let r = k2.sqrt();
        for (slot, &n) in acc.iter_mut().zip(&blocks) {
            let e = eta_block(n, r);
            if e != 0.0 {
                *slot += e * e * weight;
            }
        }
    }
    let vol = grid.box_volume();
    DyadicProfile(blocks.into_iter().zip(acc).map(|(n, a)| (n, (a * vol).sqrt())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_shape() {
        assert_eq!(eta(1.0), 1.0);
        assert_eq!(eta(-1.25), 1.0);
        assert_eq!(eta(1.6), 0.0);
        let mid = eta(1.425);
        assert!(mid > 0.0 && mid < 1.0);
        assert_eq!(eta(1.4), eta(-1.4));
        // monotone transition
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = eta(1.25 + 0.35 * i as f64 / 100.0);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn blocks_telescope() {
        let g = GridSpec::new(16, 2).unwrap();
        let blocks = dyadic_blocks(&g);
        for r in [0.0, 0.7, 1.3, 2.9, 5.5, g.max_frequency()] {
            let s: f64 = blocks.iter().map(|&n| eta_block(n, r)).sum();
            assert!((s - 1.0).abs() < 1e-14, "r = {r}: {s}");
        }
    }

    #[test]
    fn rejects_non_dyadic() {
        let g = GridSpec::new(8, 1).unwrap();
        assert!(littlewood_paley(&SpectralField::zeros(g), 3).is_err());
        assert!(littlewood_paley(&SpectralField::zeros(g), 0).is_err());
    }
}
