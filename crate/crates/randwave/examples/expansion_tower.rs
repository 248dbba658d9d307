//! Exponents of the iterated expansion, the regularity window for each depth,
//! and the two towers built from one randomized free wave.
//!
//! `cargo run --release --example expansion_tower`

use randwave::evolution::{free_evolution, Quadrature};
use randwave::expansion::{alpha, build_z_terms, build_zeta_terms, predicted_sigma, regularity_threshold, step_count_for, to_f64};
use randwave::experiments::gaussian_bump;
use randwave::randomization::{wiener_randomize, EnsembleSpec, RandomLaw, WindowSpec};
use randwave::spectral::{GridSpec, TimeGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(" k   α_k      threshold s_k");
    for k in 1..=6 {
        let th = regularity_threshold(k);
        println!("{k:>2}   {:<8} {} ≈ {:.4}", alpha(k).to_string(), th, to_f64(th));
    }
    for s in [0.3, 0.22, 0.19] {
        let k = step_count_for(s)?;
        println!("s = {s}: k = {k}, predicted σ for ζ_(2k+1) = {:?}", predicted_sigma(k, s));
    }

    let grid = GridSpec::new(16, 2)?;
    let ens = EnsembleSpec::new(RandomLaw::ComplexGaussian, 1, 1);
    let data = wiener_randomize(&gaussian_bump(grid, 0.5)?, WindowSpec::SharpCube, ens.law, ens.member(0)).scaled(2.0.into());
    let z1 = free_evolution(&data, TimeGrid::new(0.4, 9)?);
    let z = build_z_terms(&z1, 4, Quadrature::Trapezoid)?;
    let zeta = build_zeta_terms(&z1, 4, Quadrature::Trapezoid)?;
    for (order, (a, b)) in (1..).step_by(2).zip(z.terms().iter().zip(zeta.terms())) {
        println!(
            "order {order}: sup‖z‖_L² {:.3e}, sup‖ζ‖_L² {:.3e}, gap {:.2e}",
            a.sup_norm(0.0),
            b.sup_norm(0.0),
            a.sup_distance(b, 0.0)?
        );
    }
    Ok(())
}
