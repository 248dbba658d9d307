//! Wiener randomization of a fixed profile: per-member reproducibility and the
//! behaviour of the two coefficient laws.
//!
//! `cargo run --release --example wiener_randomization`

use randwave::experiments::profiled_data;
use randwave::randomization::{wiener_randomize, EnsembleSpec, RandomLaw, WindowSpec};
use randwave::spectral::{sobolev_norm, GridSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(32, 2)?;
    let s = 0.3;
    let phi = profiled_data(grid, s, 0.01)?;
    println!("deterministic data: ‖φ‖_H^s = {:.4}", sobolev_norm(&phi, s));

    for law in [RandomLaw::ComplexGaussian, RandomLaw::UniformCircle] {
        let ens = EnsembleSpec::new(law, 2024, 64);
        let norms: Vec<f64> =
            (0..ens.count).map(|i| sobolev_norm(&wiener_randomize(&phi, WindowSpec::SharpCube, law, ens.member(i)), s)).collect();
        let mean_sq = norms.iter().map(|v| v * v).sum::<f64>() / norms.len() as f64;
        let (lo, hi) = norms.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        println!("{law:?}: E‖φ^ω‖² / ‖φ‖² = {:.3}, member range [{lo:.4}, {hi:.4}]", mean_sq / sobolev_norm(&phi, s).powi(2));
    }

    let ens = EnsembleSpec::new(RandomLaw::ComplexGaussian, 7, 10);
    let a = wiener_randomize(&phi, WindowSpec::SharpCube, ens.law, ens.member(3));
    let b = wiener_randomize(&phi, WindowSpec::SharpCube, ens.law, ens.member(3));
    println!("member 3 rebuilt independently is identical: {}", a == b);

    let smooth = WindowSpec::smooth_bump(0.2)?;
    let c = wiener_randomize(&phi, smooth, ens.law, ens.member(3));
    println!("smooth-window member: ‖φ^ω‖_H^s = {:.4}", sobolev_norm(&c, s));
    Ok(())
}
