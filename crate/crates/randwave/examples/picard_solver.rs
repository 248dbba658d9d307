//! Solve for the remainder after removing the first expansion terms, rebuild
//! the solution, and check it against the split-step reference and the
//! plug-back residual.
//!
//! `cargo run --release --example picard_solver`

use num_complex::Complex64;
use randwave::evolution::{free_evolution, split_step_reference, Quadrature, SplitStepOptions};
use randwave::expansion::build_zeta_terms;
use randwave::experiments::profiled_data;
use randwave::randomization::{wiener_randomize, EnsembleSpec, RandomLaw, WindowSpec};
use randwave::solver::{nls_residual, picard_solve, reconstruct_u, SolverConfig};
use randwave::spectral::{sobolev_norm, GridSpec, TimeGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(32, 2)?;
    let s = 0.3;
    let ens = EnsembleSpec::new(RandomLaw::ComplexGaussian, 5, 1);
    let raw = wiener_randomize(&profiled_data(grid, s, 0.01)?, WindowSpec::SharpCube, ens.law, ens.member(0));
    let data = raw.scaled(Complex64::new(10.0 / sobolev_norm(&raw, s), 0.0));
    let tg = TimeGrid::new(0.1, 17)?;
    let tower = build_zeta_terms(&free_evolution(&data, tg), 2, Quadrature::Trapezoid)?;
    let reference = split_step_reference(&data, tg, SplitStepOptions { nonlinear: true, substeps: 4 })?;
    for depth in 1..=2 {
        let cfg = SolverConfig { depth, sigma: s, tolerance: 1e-12, ..SolverConfig::default() };
        let (v, report) = picard_solve(&tower.truncated(depth)?, &cfg)?;
        let u = reconstruct_u(&tower.truncated(depth)?, &v)?;
        println!(
            "k = {depth}: {} iterations, converged {}, contraction {:.3}, ‖v‖ {:.3e}, residual {:.2e}, vs split-step {:.2e}",
            report.iterations,
            report.converged,
            report.contraction_ratio.unwrap_or(f64::NAN),
            v.sup_norm(s),
            nls_residual(&u)?.value,
            u.sup_distance(&reference, 0.0)? / reference.sup_norm(0.0)
        );
    }
    Ok(())
}
