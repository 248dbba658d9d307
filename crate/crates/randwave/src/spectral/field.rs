use std::ops::{AddAssign, SubAssign};

use num_complex::Complex64;

use super::{Fft3, GridSpec, SpectralError};

/// Fourier coefficients of a field on the box, one per lattice frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coefficients: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, coefficients: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_coefficients(
        grid: GridSpec,
        coefficients: Vec<Complex64>,
    ) -> Result<Self, SpectralError> {
        if coefficients.len() != grid.len() {
            return Err(SpectralError::LengthMismatch {
                expected: grid.len(),
                got: coefficients.len(),
            });
        }
        if let Some(i) = coefficients.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(SpectralError::NonFinite(i));
        }
        Ok(Self { grid, coefficients })
    }

    /// Build coefficients from a function of the integer mode and physical frequency.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut([i64; 3], [f64; 3]) -> Complex64) -> Self {
        let coefficients = (0..grid.len()).map(|i| f(grid.modes(i), grid.wavevector(i))).collect();
        Self { grid, coefficients }
    }

    /// `amplitude · e^{i x·m/R}`.
    pub fn plane_wave(
        grid: GridSpec,
        amplitude: Complex64,
        mode: [i64; 3],
    ) -> Result<Self, SpectralError> {
        let idx = grid.flat_index(mode).ok_or_else(|| {
            SpectralError::InvalidGrid(format!("mode {mode:?} is not on the lattice"))
        })?;
        let mut f = Self::zeros(grid);
        f.coefficients[idx] = amplitude;
        Ok(f)
    }

    pub fn constant(grid: GridSpec, value: Complex64) -> Self {
        let mut f = Self::zeros(grid);
        f.coefficients[0] = value;
        f
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coefficients
    }

    pub fn coefficient(&self, mode: [i64; 3]) -> Option<Complex64> {
        self.grid.flat_index(mode).map(|i| self.coefficients[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn ensure_same_grid(&self, other: &SpectralField) -> Result<(), SpectralError> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(SpectralError::GridMismatch)
        }
    }

    pub fn scaled(&self, alpha: Complex64) -> SpectralField {
        let mut out = self.clone();
        out.scale(alpha);
        out
    }

    pub fn scale(&mut self, alpha: Complex64) {
        for c in &mut self.coefficients {
            *c *= alpha;
        }
    }

    /// `self += alpha · other`.
    pub fn axpy(&mut self, alpha: Complex64, other: &SpectralField) {
        assert_eq!(self.grid, other.grid, "axpy across different grids");
        for (a, b) in self.coefficients.iter_mut().zip(&other.coefficients) {
            *a += alpha * b;
        }
    }

    /// Zero every mode outside the retained (dealiased) cube.
    pub fn project_retained(&mut self) {
        let grid = self.grid;
        for (i, c) in self.coefficients.iter_mut().enumerate() {
            if !grid.is_retained(grid.modes(i)) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Multiply each coefficient by a real symbol of the frequency.
    pub fn apply_symbol(&mut self, symbol: impl Fn([f64; 3]) -> f64) {
        let grid = self.grid;
        for (i, c) in self.coefficients.iter_mut().enumerate() {
            *c *= symbol(grid.wavevector(i));
        }
    }

    /// `Σ |c_ξ|²` (without the volume factor).
    pub fn coefficient_energy(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        self.axpy(Complex64::new(1.0, 0.0), rhs);
    }
}

impl SubAssign<&SpectralField> for SpectralField {
    fn sub_assign(&mut self, rhs: &SpectralField) {
        self.axpy(Complex64::new(-1.0, 0.0), rhs);
    }
}

/// Coefficients of the trigonometric polynomial through the physical samples
/// `f(x_j)`, `x_j = j · 2πR/M`.
pub fn forward_transform(
    grid: GridSpec,
    samples: &[Complex64],
) -> Result<SpectralField, SpectralError> {
    if samples.len() != grid.len() {
        return Err(SpectralError::LengthMismatch { expected: grid.len(), got: samples.len() });
    }
    let mut data = samples.to_vec();
    Fft3::plan(grid.points()).forward(&mut data);
    let inv = 1.0 / grid.len() as f64;
    for c in &mut data {
        *c *= inv;
    }
    SpectralField::from_coefficients(grid, data)
}

/// Physical samples `f(x_j) = Σ_ξ c_ξ e^{i x_j·ξ}` on the native grid.
pub fn inverse_transform(field: &SpectralField) -> Vec<Complex64> {
    let mut data = field.coefficients.clone();
    Fft3::plan(field.grid.points()).inverse(&mut data);
    data
}
