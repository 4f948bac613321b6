//! Richardson orders on a τ ladder: the weighted scheme is second-order in
//! τ, the splitting scheme pays for its cheap steps with an (A* + A)·O(τ)
//! perturbation and drops to first order.

use opwave::harness::{run_convergence_sweep, ExperimentConfig, InitialCondition};
use opwave::{GridSpec, Scheme, SchemeConfig};

fn main() -> opwave::Result<()> {
    let taus = [0.01, 0.005, 0.0025];
    for scheme in [Scheme::Weighted, Scheme::SplitProduct] {
        let mut cfg = ExperimentConfig::default();
        cfg.grid = GridSpec::unit_square(32)?;
        cfg.scheme = SchemeConfig::new(scheme, taus[0], 0.1);
        cfg.scheme.solver_tol = 1e-12;
        cfg.initial = InitialCondition::Eigenmode(1, 1);
        cfg.output_dir = format!("out/convergence_{}", scheme.name()).into();

        let rows = run_convergence_sweep(&cfg, &taus)?;
        println!("{}:", scheme.name());
        println!("  tau        max eps_2       observed order");
        for r in &rows {
            match r.order {
                Some(o) => println!("  {:<9} {:<15.6e} {o:.3}", r.tau, r.max_eps_2),
                None => println!("  {:<9} {:<15.6e} -", r.tau, r.max_eps_2),
            }
        }
    }
    Ok(())
}
