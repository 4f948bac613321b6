//! Stability matrix: every scheme at its threshold weights and 10% below,
//! for steps τ₀ and 10τ₀. At the threshold the dense G = C − (τ²/4)D ≥ 0
//! verdict holds and trajectories stay bounded for every τ; below it, large
//! steps produce failing verdicts.

use opwave::harness::{run_stability_matrix, ExperimentConfig};
use opwave::steppers::ALL_SCHEMES;
use opwave::{GridSpec, Scheme, SchemeConfig};

fn main() -> opwave::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.grid = GridSpec::unit_square(16)?;
    cfg.scheme = SchemeConfig::new(Scheme::Weighted, 0.01, 0.1);
    cfg.stability_dense_n = 8;
    cfg.output_dir = "out/stability_regions".into();

    let schemes: Vec<Scheme> = ALL_SCHEMES
        .iter()
        .copied()
        .filter(|s| *s != Scheme::Explicit)
        .collect();

    let rows = run_stability_matrix(&cfg, &schemes, &[1.0, 0.9], &[1.0, 10.0])?;

    println!(
        "{:<22} {:>9} {:>9} {:>12} {:>7} {:>8}",
        "scheme", "sigma_a", "sigma_b", "tau", "lemma1", "bounded"
    );
    for r in &rows {
        let sa = r.sigma_a.or(r.sigma).map_or(String::new(), |v| format!("{v:.4}"));
        let sb = r.sigma_b.map_or(String::new(), |v| format!("{v:.4}"));
        println!(
            "{:<22} {:>9} {:>9} {:>12.4e} {:>7} {:>8}",
            r.scheme.name(),
            sa,
            sb,
            r.tau,
            r.lemma1,
            r.bounded
        );
    }
    println!("\nverdicts.csv written to {}", cfg.output_dir.display());
    Ok(())
}
