//! Ensemble smoothing study on a small grid: dyadic profiles of each tower
//! term and their fitted decay rates.
//!
//! `cargo run --release --example smoothing_rates`

use randwave::experiments::{profiled_data, smoothing_study, SmoothingOptions};
use randwave::randomization::{EnsembleSpec, RandomLaw};
use randwave::spectral::GridSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(32, 1)?;
    let s = 0.3;
    let phi = profiled_data(grid, s, 0.01)?;
    let ens = EnsembleSpec::new(RandomLaw::ComplexGaussian, 2024, 24);
    let opts = SmoothingOptions { k_max: 3, fit_window: (2, 8), ..SmoothingOptions::default() };
    let study = smoothing_study(&ens, &phi, &opts)?;
    println!("blocks {:?}, {} members, t = {}", study.blocks, study.members, opts.t_eval);
    for (l, row) in study.profiles.iter().enumerate() {
        let medians: Vec<String> = row.iter().map(|m| format!("{:.2e}", m.median)).collect();
        let slope = study.fit(2 * l + 1).map(|f| format!("{:.3}", f.slope)).unwrap_or_else(|| "-".into());
        println!("order {}: medians [{}], slope {slope}", 2 * l + 1, medians.join(", "));
    }
    Ok(())
}
