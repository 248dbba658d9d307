use serde::Serialize;

use super::ExperimentError;

/// Ordinary least-squares line through `(x, y)` samples.
///
/// For log-log fits both coordinates are base-2 logarithms, so `slope` is the
/// fitted exponent and `residual_std_error` is measured in log₂ units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// `(Σ r² / (n − 2))^{1/2}`; zero for `n = 2`-like exact fits.
    pub residual_std_error: f64,
    pub samples: usize,
    /// Smallest and largest abscissa used, in the original (not logarithmic) units.
    pub x_range: (f64, f64),
    pub r_squared: f64,
}

impl FitResult {
    /// Fits on which hard assertions are meaningful: at least four points and a
    /// residual standard error of at most 0.1.
    pub fn is_assertable(&self) -> bool {
        self.samples >= 4 && self.residual_std_error <= 0.1
    }

    /// `|slope − target| <= tol`.
    pub fn within(&self, target: f64, tol: f64) -> bool {
        (self.slope - target).abs() <= tol
    }
}

fn fit_raw(xs: &[f64], ys: &[f64], x_range: (f64, f64)) -> Result<FitResult, ExperimentError> {
    let n = xs.len();
    if n < 3 {
        return Err(ExperimentError::TooFewPoints(n));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(ExperimentError::DegenerateFit("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - ssr / syy } else { 1.0 };
    let res = FitResult {
        slope,
        intercept,
        residual_std_error: (ssr / (nf - 2.0)).sqrt(),
        samples: n,
        x_range,
        r_squared,
    };
    if !(res.slope.is_finite() && res.intercept.is_finite()) {
        return Err(ExperimentError::DegenerateFit(format!("slope {}", res.slope)));
    }
    Ok(res)
}

fn range(xs: &[f64]) -> (f64, f64) {
    xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Least-squares fit of `y` against `x`; non-finite samples are dropped.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<FitResult, ExperimentError> {
    if xs.len() != ys.len() {
        return Err(ExperimentError::InvalidParameter("abscissa/ordinate length mismatch".into()));
    }
    let (x, y): (Vec<f64>, Vec<f64>) =
        xs.iter().zip(ys).filter(|(x, y)| x.is_finite() && y.is_finite()).map(|(a, b)| (*a, *b)).unzip();
    let r = range(&x);
    fit_raw(&x, &y, r)
}

/// Fit of `log₂ y` against `log₂ x`; pairs with a non-positive coordinate are dropped.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<FitResult, ExperimentError> {
    if xs.len() != ys.len() {
        return Err(ExperimentError::InvalidParameter("abscissa/ordinate length mismatch".into()));
    }
    let (raw, (lx, ly)): (Vec<f64>, (Vec<f64>, Vec<f64>)) = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (*x, (x.log2(), y.log2())))
        .unzip();
    fit_raw(&lx, &ly, range(&raw))
}
