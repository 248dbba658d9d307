//! Space-time integrability of a higher tower term across dyadic blocks.
//!
//! `cargo run --release --example integrability_gain`

use randwave::evolution::Quadrature;
use randwave::experiments::{integrability_gain, profiled_data, GainAxis, GainSpec};
use randwave::randomization::{EnsembleSpec, RandomLaw, WindowSpec};
use randwave::spectral::{GridSpec, TimeGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(32, 1)?;
    let phi = profiled_data(grid, 0.3, 0.01)?;
    let ens = EnsembleSpec::new(RandomLaw::ComplexGaussian, 3, 8);
    let spec = GainSpec {
        k: 2,
        q: 4.0,
        r: 6.0,
        time_grid: TimeGrid::new(0.35, 9)?,
        quadrature: Quadrature::Trapezoid,
        window: WindowSpec::SharpCube,
        axis: GainAxis::Frequency { ns: vec![2, 4, 8] },
    };
    let rep = integrability_gain(&ens, &phi, &spec)?;
    for (n, s) in &rep.rows {
        println!("N = {n}: median ‖P_N ζ₃‖_(L^q L^r) = {:.3e}", s.median);
    }
    println!("fitted exponent {:.3}, bound {:.3}", rep.fit.slope, rep.predicted);
    Ok(())
}
