//! Frequency-box data for which the first tower term gains no smoothing at
//! s = 0, and the trilinear rate in the box geometry.
//!
//! `cargo run --release --example nonsmoothing_counterexample`

use randwave::experiments::{
    trilinear_nonsmoothing, z3_nonsmoothing_counterexample, CounterexampleOptions, CounterexampleSpec,
};
use randwave::spectral::GridSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(64, 1)?;
    let opts = CounterexampleOptions::default();
    let spec = CounterexampleSpec { box_scale: 1.0, offset_factor: 4.0, s: 0.0, sigma: 0.5, ..Default::default() };
    let rep = z3_nonsmoothing_counterexample(grid, &spec, &[4.0, 8.0, 16.0], &opts)?;
    for row in &rep.rows {
        println!("{row:?}");
    }
    println!("H^σ growth slope {:.3} (σ = {}), c₀ = {:.3}", rep.growth.slope, spec.sigma, rep.c0);

    let specs: Vec<CounterexampleSpec> = [2.0, 4.0, 8.0]
        .into_iter()
        .map(|n| CounterexampleSpec { box_scale: n / 2.0, offset_factor: 4.0, n, l: n, s: 0.5, sigma: 0.5 })
        .collect();
    let tri = trilinear_nonsmoothing(grid, &specs, &opts)?;
    println!("trilinear ratio slope {:.3}, predicted {:.3}", tri.fit.slope, tri.predicted);
    Ok(())
}
