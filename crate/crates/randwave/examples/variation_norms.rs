//! Discrete p-variation of trajectories: free waves have no twisted variation,
//! nonlinear terms do.
//!
//! `cargo run --release --example variation_norms`

use randwave::evolution::{free_evolution, Quadrature};
use randwave::expansion::build_zeta_terms;
use randwave::experiments::{discrete_variation_norm, gaussian_bump, xnorm_proxy};
use randwave::spectral::{GridSpec, TimeGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(16, 2)?;
    let tg = TimeGrid::new(0.5, 17)?;
    let free = free_evolution(&gaussian_bump(grid, 0.5)?.scaled(3.0.into()), tg);
    let tower = build_zeta_terms(&free, 2, Quadrature::Trapezoid)?;
    let z3 = tower.order(3).unwrap();
    for p in [2.0, 4.0] {
        println!(
            "p = {p}: free wave twisted {:.2e}, untwisted {:.3e}; ζ₃ twisted {:.3e}",
            discrete_variation_norm(&free, p, true)?,
            discrete_variation_norm(&free, p, false)?,
            discrete_variation_norm(z3, p, true)?
        );
    }
    println!("X-norm proxy of ζ₃ at σ = 0.5: {:.3e}", xnorm_proxy(z3, 0.5, 0.5)?);
    Ok(())
}
