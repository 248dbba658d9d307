//! Dispersive decay of a bump and the bilinear gain for separated frequencies.
//!
//! `cargo run --release --example linear_estimates`

use randwave::experiments::{bilinear_sweep, dispersive_decay, gaussian_bump, wave_packet, DispersiveWindow};
use randwave::spectral::{GridSpec, TimeGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(64, 4)?;
    let w = 0.5;
    let bump = gaussian_bump(grid, w)?;
    let window = DispersiveWindow::for_bump(&grid, w);
    let ts: Vec<f64> = (0..10).map(|j| window.lo * (window.hi / window.lo).powf(j as f64 / 9.0)).collect();
    for r in [2.0, 6.0, f64::INFINITY] {
        let rep = dispersive_decay(&bump, &ts, r, window)?;
        println!("r = {r}: fitted exponent {:.3}, predicted {:.3}", rep.fit.slope, rep.predicted);
    }

    let grid = GridSpec::new(128, 1)?;
    let phi1 = gaussian_bump(grid, w)?;
    let d = [1.0, 2f64.sqrt(), 3f64.sqrt()];
    let tg = TimeGrid::new(0.2, 21)?;
    let sweep = bilinear_sweep(&phi1, 2, &[4, 8, 16, 32], tg, |n2| {
        wave_packet(grid, [0.0; 3], d.map(|x| n2 as f64 * x / 6f64.sqrt()), w)
    })?;
    for row in &sweep.rows {
        println!("N₂ = {:>2}: ‖P₁u P_N₂u‖ = {:.3e}", row.n2, row.value);
    }
    println!("N₂ exponent {:.3}", sweep.fit.slope);
    Ok(())
}
