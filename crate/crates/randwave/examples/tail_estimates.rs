//! Exceedance curves of a random space-time norm under the Gaussian law, and
//! the degenerate H^s curve under the uniform-circle law.
//!
//! `cargo run --release --example tail_estimates`

use randwave::experiments::{admissible_check, hs_tail, profiled_data, strichartz_tail, TailCurve};
use randwave::randomization::{EnsembleSpec, RandomLaw, WindowSpec};
use randwave::spectral::{GridSpec, TimeGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(32, 2)?;
    let phi = profiled_data(grid, 0.3, 0.01)?;
    let tg = TimeGrid::new(0.5, 9)?;
    let q = 10.0 / 3.0;
    println!("(q, r) = (10/3, 10/3) admissible: {}", admissible_check(q, q));
    let ens = EnsembleSpec::new(RandomLaw::ComplexGaussian, 7, 200);
    let st = strichartz_tail(&phi, WindowSpec::SharpCube, &ens, q, q, tg, &[0.0])?;
    let curve = TailCurve::from_samples(&st.samples, &TailCurve::thresholds_spanning(&st.samples, 21));
    for (l, p) in curve.lambdas.iter().zip(&curve.exceedance).step_by(4) {
        println!("  P(‖·‖ > {l:.3}) = {p:.3}");
    }
    let fit = curve.log_fit()?;
    println!("ln P against λ²: slope {:.3}, R² {:.3}", fit.slope, fit.r_squared);

    let circle = EnsembleSpec::new(RandomLaw::UniformCircle, 7, 200);
    let hs = hs_tail(&phi, WindowSpec::SharpCube, &circle, 0.3, &[0.0])?;
    let (lo, hi) = hs.samples.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    println!("uniform-circle H^s norms lie in [{lo:.12}, {hi:.12}]");
    Ok(())
}
