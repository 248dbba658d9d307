use std::f64::consts::PI;

use serde::Serialize;

use super::SpectralError;

/// Discretization of the periodic box: `M` points per axis, period `2πR`.
///
/// The frequency lattice has spacing `1/R`, so every unit cube `n + (-1/2, 1/2]³`
/// holds `R³` lattice points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    points: usize,
    oversampling: usize,
    dealias_fraction: f64,
}

impl GridSpec {
    pub const DEFAULT_DEALIAS: f64 = 2.0 / 3.0;

    pub fn new(points: usize, oversampling: usize) -> Result<Self, SpectralError> {
        Self::with_dealias(points, oversampling, Self::DEFAULT_DEALIAS)
    }

    pub fn with_dealias(
        points: usize,
        oversampling: usize,
        dealias_fraction: f64,
    ) -> Result<Self, SpectralError> {
        if points < 8 || !points.is_power_of_two() {
            return Err(SpectralError::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {points}"
            )));
        }
        if oversampling == 0 {
            return Err(SpectralError::InvalidGrid("oversampling must be >= 1".into()));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(SpectralError::InvalidGrid(format!(
                "dealias fraction must lie in (0, 1], got {dealias_fraction}"
            )));
        }
        Ok(Self { points, oversampling, dealias_fraction })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn oversampling(&self) -> usize {
        self.oversampling
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Number of coefficients, `M³`.
    pub fn len(&self) -> usize {
        self.points * self.points * self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn period(&self) -> f64 {
        2.0 * PI * self.oversampling as f64
    }

    pub fn spacing(&self) -> f64 {
        self.period() / self.points as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn box_volume(&self) -> f64 {
        self.period().powi(3)
    }

    /// Signed integer mode of a DFT index.
    #[inline]
    pub fn mode_of_index(&self, i: usize) -> i64 {
        let half = self.points / 2;
        if i < half {
            i as i64
        } else {
            i as i64 - self.points as i64
        }
    }

    #[inline]
    pub fn index_of_mode(&self, m: i64) -> Option<usize> {
        let half = (self.points / 2) as i64;
        if m < -half || m >= half {
            None
        } else {
            Some(m.rem_euclid(self.points as i64) as usize)
        }
    }

    /// Integer modes of a flat (row-major x, y, z) index.
    #[inline]
    pub fn modes(&self, flat: usize) -> [i64; 3] {
        let n = self.points;
        [
            self.mode_of_index(flat / (n * n)),
            self.mode_of_index((flat / n) % n),
            self.mode_of_index(flat % n),
        ]
    }

    pub fn flat_index(&self, m: [i64; 3]) -> Option<usize> {
        let n = self.points;
        let ix = self.index_of_mode(m[0])?;
        let iy = self.index_of_mode(m[1])?;
        let iz = self.index_of_mode(m[2])?;
        Some((ix * n + iy) * n + iz)
    }

    /// Physical frequency `m / R`.
    pub fn wavevector(&self, flat: usize) -> [f64; 3] {
        let r = self.oversampling as f64;
        let m = self.modes(flat);
        [m[0] as f64 / r, m[1] as f64 / r, m[2] as f64 / r]
    }

    /// `|ξ|²` for every coefficient, in storage order.
    pub fn frequency_squares(&self) -> Vec<f64> {
        let n = self.points;
        let r2 = (self.oversampling * self.oversampling) as f64;
        let axis: Vec<f64> = (0..n).map(|i| (self.mode_of_index(i) as f64).powi(2)).collect();
        let mut out = Vec::with_capacity(self.len());
        for ax in &axis {
            for ay in &axis {
                for az in &axis {
                    out.push((ax + ay + az) / r2);
                }
            }
        }
        out
    }

    /// Largest frequency magnitude per axis, `M / (2R)`.
    pub fn nyquist(&self) -> f64 {
        self.points as f64 / (2.0 * self.oversampling as f64)
    }

    /// Largest `|ξ|` represented on the lattice (the corner mode).
    pub fn max_frequency(&self) -> f64 {
        3f64.sqrt() * self.nyquist()
    }

    /// Largest retained integer mode per axis, `floor(fraction · M/2)`.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.dealias_fraction * (self.points / 2) as f64 + 1e-9).floor() as i64
    }

    pub fn is_retained(&self, m: [i64; 3]) -> bool {
        let k = self.dealias_cutoff();
        m.iter().all(|c| c.abs() <= k)
    }

    /// Size of the auxiliary grid on which cubic products are exact on retained modes.
    pub fn padded_points(&self) -> usize {
        smooth_size(4 * self.dealias_cutoff() as usize + 1)
    }
}

/// Smallest `2^a 3^b 5^c >= n`.
pub(crate) fn smooth_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}
