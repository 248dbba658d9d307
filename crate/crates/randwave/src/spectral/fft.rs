use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Unnormalized three-dimensional FFT of a cubic array stored row-major (x, y, z).
///
/// Plans are cached process-wide; an `Fft3` is immutable and can be shared
/// between threads working on distinct buffers.
pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();

impl Fft3 {
    /// Shared plan for an `n × n × n` transform.
    pub fn plan(n: usize) -> Arc<Fft3> {
        let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().expect("fft plan cache poisoned");
        map.entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                Arc::new(Fft3 {
                    n,
                    forward: planner.plan_fft_forward(n),
                    inverse: planner.plan_fft_inverse(n),
                })
            })
            .clone()
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `X_k = Σ_j x_j e^{-2πi j·k/n}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward_pruned(data, None);
    }

    /// `x_j = Σ_k X_k e^{+2πi j·k/n}` (no `1/n³` factor).
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse_pruned(data, None);
    }

    /// Forward transform of which only the outputs with every index in
    /// `active` are needed; other outputs are left unspecified.
    pub(crate) fn forward_pruned(&self, data: &mut [Complex64], active: Option<&[bool]>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "buffer is not n³");
        let fft = &*self.forward;
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let on = |i: usize| active.map_or(true, |a| a[i]);
        x_pass(data, n, fft, &mut scratch);
        y_pass(data, n, fft, &mut scratch, &on);
        z_pass(data, n, fft, &mut scratch, &|x, y| on(x) && on(y));
    }

    /// Inverse transform of an input supported where every index is in `active`.
    pub(crate) fn inverse_pruned(&self, data: &mut [Complex64], active: Option<&[bool]>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "buffer is not n³");
        let fft = &*self.inverse;
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let on = |i: usize| active.map_or(true, |a| a[i]);
        z_pass(data, n, fft, &mut scratch, &|x, y| on(x) && on(y));
        y_pass(data, n, fft, &mut scratch, &on);
        x_pass(data, n, fft, &mut scratch);
    }
}

/// Lines gathered per strided pass.
const BLOCK: usize = 32;

/// Contiguous z-lines of the selected `(x, y)` rows.
fn z_pass(
    data: &mut [Complex64],
    n: usize,
    fft: &dyn Fft<f64>,
    scratch: &mut [Complex64],
    keep: &dyn Fn(usize, usize) -> bool,
) {
    for (r, row) in data.chunks_exact_mut(n).enumerate() {
        if keep(r / n, r % n) {
            fft.process_with_scratch(row, scratch);
        }
    }
}

/// y-lines (stride `n`) inside the selected x-slabs.
fn y_pass(data: &mut [Complex64], n: usize, fft: &dyn Fft<f64>, scratch: &mut [Complex64], keep: &dyn Fn(usize) -> bool) {
    let mut buf = vec![Complex64::new(0.0, 0.0); BLOCK * n];
    for (x, slab) in data.chunks_exact_mut(n * n).enumerate() {
        if keep(x) {
            strided(slab, n, n, n, fft, scratch, &mut buf);
        }
    }
}

/// x-lines (stride `n²`) over the whole cube.
fn x_pass(data: &mut [Complex64], n: usize, fft: &dyn Fft<f64>, scratch: &mut [Complex64]) {
    let mut buf = vec![Complex64::new(0.0, 0.0); BLOCK * n];
    strided(data, n, n * n, n * n, fft, scratch, &mut buf);
}

/// Transform the `columns` lines `data[c + j·stride]`, `j < n`, in blocks.
fn strided(
    data: &mut [Complex64],
    n: usize,
    stride: usize,
    columns: usize,
    fft: &dyn Fft<f64>,
    scratch: &mut [Complex64],
    buf: &mut [Complex64],
) {
    for c0 in (0..columns).step_by(BLOCK) {
        let width = BLOCK.min(columns - c0);
        for j in 0..n {
            let src = &data[j * stride + c0..j * stride + c0 + width];
            for (b, v) in src.iter().enumerate() {
                buf[b * n + j] = *v;
            }
        }
        let lines = &mut buf[..width * n];
        fft.process_with_scratch(lines, scratch);
        for j in 0..n {
            let dst = &mut data[j * stride + c0..j * stride + c0 + width];
            for (b, v) in dst.iter_mut().enumerate() {
                *v = lines[b * n + j];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_dft_on_small_cube() {
        let n = 6;
        let data: Vec<Complex64> = (0..n * n * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut fast = data.clone();
        Fft3::plan(n).forward(&mut fast);
        let w = -2.0 * std::f64::consts::PI / n as f64;
        for k in [0usize, 5, 77, 215] {
            let (kx, ky, kz) = (k / 36, (k / 6) % 6, k % 6);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in data.iter().enumerate() {
                let (jx, jy, jz) = (j / 36, (j / 6) % 6, j % 6);
                let ph = w * (jx * kx + jy * ky + jz * kz) as f64;
                acc += v * Complex64::from_polar(1.0, ph);
            }
            assert!((acc - fast[k]).norm() < 1e-11);
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let n = 10;
        let data: Vec<Complex64> =
            (0..n * n * n).map(|i| Complex64::new(i as f64, -(i as f64) * 0.5)).collect();
        let mut buf = data.clone();
        let plan = Fft3::plan(n);
        plan.forward(&mut buf);
        plan.inverse(&mut buf);
        for (a, b) in data.iter().zip(&buf) {
            assert!((a - b / (n * n * n) as f64).norm() < 1e-9);
        }
    }
}
