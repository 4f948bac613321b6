//! Snapshots of the exact spectral solution at chosen times, dumped in the
//! field CSV format (`i1,i2,x1,x2,value`) for plotting the plate's complex
//! vibration pattern.

use opwave::harness::{oracle_snapshots, ExperimentConfig};

fn main() -> opwave::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.output_dir = "out/exact_snapshots".into();

    let times = [0.0, 0.5, 1.0, 2.0];
    let paths = oracle_snapshots(&cfg, &times)?;
    for (t, p) in times.iter().zip(&paths) {
        println!("t = {t:<5} -> {}", p.display());
    }
    println!("index in {}/snapshots.csv", cfg.output_dir.display());
    Ok(())
}
