//! Free evolution and the trilinear Duhamel integral on plane waves, compared
//! with the closed-form time integral, for both quadratures.
//!
//! `cargo run --release --example duhamel_plane_waves`

use num_complex::Complex64;
use randwave::evolution::{duhamel_trilinear, free_evolution, phase_function, Quadrature};
use randwave::spectral::{GridSpec, SpectralField, TimeGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(16, 1)?;
    let modes = [[3i64, 1, 0], [0, -1, 1], [1, 0, 2]];
    let xi = [0, 1, 2].map(|d| modes[0][d] - modes[1][d] + modes[2][d]);
    let f = |m: [i64; 3]| m.map(|v| v as f64);
    let phi = phase_function(f(xi), f(modes[0]), f(modes[1]), f(modes[2]))?;
    println!("output mode {xi:?}, phase Φ = {phi}");

    let i = Complex64::new(0.0, 1.0);
    let xi2: f64 = f(xi).iter().map(|v| v * v).sum();
    for quad in [Quadrature::Trapezoid, Quadrature::GaussLegendre2] {
        for nodes in [17, 33, 65] {
            let tg = TimeGrid::new(1.0, nodes)?;
            let u: Vec<_> = modes
                .iter()
                .map(|m| SpectralField::plane_wave(grid, Complex64::new(1.0, 0.0), *m).map(|w| free_evolution(&w, tg)))
                .collect::<Result<_, _>>()?;
            let out = duhamel_trilinear(&u[0], &u[1], &u[2], quad)?;
            let t = tg.horizon();
            let want = -i * (-i * t * xi2).exp() * ((i * t * phi).exp() - 1.0) / (i * phi);
            let got = out.last().coefficient(xi).unwrap();
            println!("{quad:?}, {nodes:>2} nodes: relative error at T = {:.2e}", (got - want).norm() / want.norm());
        }
    }
    Ok(())
}
