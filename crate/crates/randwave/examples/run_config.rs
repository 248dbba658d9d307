//! Drive an experiment from a configuration text, as the command-line tool
//! does, and list the artifacts and their manifest entries.
//!
//! `cargo run --release --example run_config`

use randwave::io::{parse_config, run_with_workers, verify_manifest};

const CONFIG: &str = "\
# Gaussian tail of the free wave's space-time norm
experiment = tail
seed = 11
grid.points = 16
grid.oversampling = 2
random.members = 64
time.horizon = 0.3
time.nodes = 9
data.kind = bump
data.amplitude = 3
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = parse_config(CONFIG)?;
    cfg.output = std::env::temp_dir().join("randwave-run-config-example");
    for w in &cfg.warnings {
        println!("warning: {w}");
    }
    let manifest = run_with_workers(&cfg, 2)?;
    for outcome in &manifest.experiments {
        println!("{}: passed {:?}, error {:?}", outcome.name, outcome.passed, outcome.error);
    }
    for f in &manifest.files {
        println!("  {:<28} {:>7} bytes  {}", f.path, f.bytes, &f.sha256[..16]);
    }
    println!("manifest re-verifies: {}", verify_manifest(&cfg.output)?.is_empty());
    println!("artifacts in {}", cfg.output.display());
    Ok(())
}
