//! Fields on the periodic box: plane waves, Sobolev and Lebesgue norms, and the
//! Littlewood–Paley profile of a smooth bump.
//!
//! `cargo run --release --example spectral_basics`

use num_complex::Complex64;
use randwave::experiments::gaussian_bump;
use randwave::spectral::{dyadic_blocks, dyadic_profile, energy, lebesgue_norm, sobolev_norm, GridSpec, SpectralField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(32, 2)?;
    println!(
        "grid: {} points per axis, period {:.3}, retained |m| <= {}, max |ξ| {:.2}",
        grid.points(),
        grid.period(),
        grid.dealias_cutoff(),
        grid.max_frequency()
    );

    let wave = SpectralField::plane_wave(grid, Complex64::new(1.0, 0.0), [2, 0, -1])?;
    for s in [0.0, 0.5, 1.0] {
        println!("plane wave ‖·‖_H^{s:<3} = {:.6}", sobolev_norm(&wave, s));
    }
    println!("plane wave ‖·‖_L^4   = {:.6}", lebesgue_norm(&wave, 4.0)?);
    println!("plane wave energy     = {:.6}", energy(&wave));

    let bump = gaussian_bump(grid, 0.5)?;
    println!("\nLittlewood–Paley profile of a Gaussian bump (blocks {:?}):", dyadic_blocks(&grid));
    let profile = dyadic_profile(&bump, 0.0);
    for (n, v) in profile.iter() {
        println!("  N = {n:>2}: ‖P_N f‖_L² = {v:.3e}");
    }
    // The block symbols sum to one but overlap, so their squares need not.
    println!("  (Σ_N ‖P_N f‖²)^½ = {:.6}, ‖f‖_L² = {:.6}", profile.l2_sum(), sobolev_norm(&bump, 0.0));
    Ok(())
}
