//! Deflection histories at individual points of the plate. Probe values are
//! read at the nearest interior grid node (no interpolation); the snapping is
//! recorded in the probes.csv header.

use opwave::harness::{run_experiment, ExperimentConfig};

fn main() -> opwave::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.scheme.t_final = 2.0;
    cfg.probe_points = vec![(0.5, 0.5), (0.25, 0.25), (0.75, 0.25)];
    cfg.oracle = false; // histories only
    cfg.output_dir = "out/probe_points".into();

    let report = run_experiment(&cfg)?;
    for (i, p) in report.probes.iter().enumerate() {
        println!(
            "probe p{i}: requested ({:.3},{:.3}) snapped to node ({},{}) at ({:.4},{:.4})",
            p.requested.0, p.requested.1, p.node.0, p.node.1, p.coords.0, p.coords.1
        );
    }
    println!("\n    t       p0          p1          p2");
    for (idx, row) in report.rows.iter().enumerate().step_by(40) {
        let vals: Vec<String> = report
            .probes
            .iter()
            .map(|p| format!("{:+.4e}", p.values[idx]))
            .collect();
        println!("{:8.3}  {}", row.t, vals.join("  "));
    }
    println!("\nfull histories in {}/probes.csv", cfg.output_dir.display());
    Ok(())
}
