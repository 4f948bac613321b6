//! Thin CLI over the library: `run`, `sweep`, `stability`, `oracle`, `probe`.
//! Exit codes: 0 success, 2 config error, 3 solver failure, 4 instability
//! detected in a run expected stable.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use opwave::harness::{self, ExperimentConfig, InitialCondition};
use opwave::steppers::{Scheme, SchemeConfig, ALL_SCHEMES};
use opwave::{Error, GridSpec, Result};

#[derive(Parser)]
#[command(name = "opwave", version, about = "Three-level operator-difference schemes for d²w/dt² + A*Aw + Bw = 0")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment, writing errors.csv / energy.csv (and probes.csv).
    Run(Common),
    /// Convergence sweep over a τ ladder, reporting observed orders.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated τ values, each dividing t_final.
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.005,0.0025")]
        taus: Vec<f64>,
    },
    /// Stability matrix: Lemma-1 verdicts plus trajectory boundedness.
    Stability {
        #[command(flatten)]
        common: Common,
        /// Schemes to test (default: all).
        #[arg(long, value_delimiter = ',')]
        schemes: Option<Vec<String>>,
        /// Multipliers of each scheme's threshold weights.
        #[arg(long, value_delimiter = ',', default_value = "1.0")]
        weights: Vec<f64>,
        /// Step sizes in units of the explicit threshold τ₀.
        #[arg(long, value_delimiter = ',', default_value = "1.0,10.0")]
        taus: Vec<f64>,
        /// Grid subdivisions for the dense Lemma-1 check.
        #[arg(long)]
        dense_grid: Option<usize>,
    },
    /// Emit exact spectral-solution snapshots at the given times.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Comma-separated snapshot times.
        #[arg(long, value_delimiter = ',', default_value = "0.0,0.5,1.0,2.0")]
        times: Vec<f64>,
    },
    /// Record deflection histories at probe points.
    Probe {
        #[command(flatten)]
        common: Common,
        /// Semicolon-separated points, e.g. "0.5,0.5;0.25,0.25".
        #[arg(long)]
        points: Option<String>,
    },
}

/// Flags shared by all subcommands; they override config-file keys.
#[derive(Args)]
struct Common {
    /// Path to a TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    /// One of: explicit, weighted, regularized_q, additive_averaged,
    /// split_product, split_product_bsplit, split_product_aasplit,
    /// split_factor_sum.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long = "sigma-a")]
    sigma_a: Option<f64>,
    #[arg(long = "sigma-b")]
    sigma_b: Option<f64>,
    /// Square grid subdivisions per side (the benchmark scale is 256).
    #[arg(long)]
    grid: Option<usize>,
    /// Initial condition: poly | eigenmode:K1,K2 | file:PATH.
    #[arg(long)]
    initial: Option<String>,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => harness::load_config(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(n) = self.grid {
            cfg.grid = GridSpec::new(cfg.grid.l1(), cfg.grid.l2(), n, n)?;
        }
        if let Some(name) = &self.scheme {
            let scheme = Scheme::parse(name)?;
            let mut sc = SchemeConfig::new(scheme, cfg.scheme.tau, cfg.scheme.t_final);
            sc.parts = cfg.scheme.parts;
            sc.solver_tol = cfg.scheme.solver_tol;
            cfg.scheme = sc;
        }
        if let Some(tau) = self.tau {
            cfg.scheme.tau = tau;
        }
        if let Some(t) = self.t_final {
            cfg.scheme.t_final = t;
        }
        if let Some(s) = self.sigma {
            cfg.scheme.sigma = s;
        }
        if let Some(s) = self.sigma_a {
            cfg.scheme.sigma_a = s;
        }
        if let Some(s) = self.sigma_b {
            cfg.scheme.sigma_b = s;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(ic) = &self.initial {
            cfg.initial = InitialCondition::parse(ic)?;
        }
        Ok(cfg)
    }
}

fn parse_points(s: &str) -> Result<Vec<(f64, f64)>> {
    s.split(';')
        .map(|pair| {
            let xs: Vec<&str> = pair.split(',').collect();
            if xs.len() != 2 {
                return Err(Error::Config(format!("bad probe point '{pair}'")));
            }
            let x1 = xs[0]
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad probe coordinate '{}'", xs[0])))?;
            let x2 = xs[1]
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad probe coordinate '{}'", xs[1])))?;
            Ok((x1, x2))
        })
        .collect()
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Run(common) => {
            let cfg = common.resolve()?;
            let report = harness::run_experiment(&cfg)?;
            let last = report.rows.last();
            println!(
                "{} scheme on {} grid: {} levels, tau = {}, T = {}",
                cfg.scheme.scheme.name(),
                cfg.grid,
                report.rows.len(),
                cfg.scheme.tau,
                cfg.scheme.t_final,
            );
            if let Some(t0) = report.tau_0 {
                println!("explicit threshold tau_0 = {t0:.6e}");
            }
            if let Some(row) = last {
                if let (Some(ei), Some(e2)) = (row.eps_inf, row.eps_2) {
                    println!("final errors: eps_inf = {ei:.6e}, eps_2 = {e2:.6e}");
                }
                println!("final max|u| = {:.6e}", row.max_abs);
            }
            println!(
                "{} CG solves, {} total iterations, wall {:?}",
                report.total_solves, report.total_cg_iterations, report.wall
            );
            println!("output in {}", cfg.output_dir.display());
            if report.blew_up {
                if report.stable_expected {
                    eprintln!("instability detected in a run expected stable");
                    return Ok(4);
                }
                println!("trajectory blew up (expected for this configuration)");
            }
            Ok(0)
        }
        Cmd::Sweep { common, taus } => {
            let cfg = common.resolve()?;
            let rows = harness::run_convergence_sweep(&cfg, &taus)?;
            println!("tau        max_eps_2      order");
            for r in &rows {
                match r.order {
                    Some(o) => println!("{:<10} {:<14.6e} {o:.3}", r.tau, r.max_eps_2),
                    None => println!("{:<10} {:<14.6e}", r.tau, r.max_eps_2),
                }
            }
            println!("sweep.csv in {}", cfg.output_dir.display());
            Ok(0)
        }
        Cmd::Stability {
            common,
            schemes,
            weights,
            taus,
            dense_grid,
        } => {
            let mut cfg = common.resolve()?;
            if let Some(n) = dense_grid {
                cfg.stability_dense_n = n;
            }
            let schemes: Vec<Scheme> = match schemes {
                Some(names) => names
                    .iter()
                    .map(|n| Scheme::parse(n))
                    .collect::<Result<_>>()?,
                None => ALL_SCHEMES.to_vec(),
            };
            let rows = harness::run_stability_matrix(&cfg, &schemes, &weights, &taus)?;
            println!("scheme                 tau          lemma1  bounded");
            for r in &rows {
                println!(
                    "{:<22} {:<12.6e} {:<7} {}",
                    r.scheme.name(),
                    r.tau,
                    r.lemma1,
                    r.bounded
                );
            }
            println!("verdicts.csv in {}", cfg.output_dir.display());
            Ok(0)
        }
        Cmd::Oracle { common, times } => {
            let cfg = common.resolve()?;
            let paths = harness::oracle_snapshots(&cfg, &times)?;
            for p in paths {
                println!("{}", p.display());
            }
            Ok(0)
        }
        Cmd::Probe { common, points } => {
            let mut cfg = common.resolve()?;
            if let Some(pts) = points {
                cfg.probe_points = parse_points(&pts)?;
            }
            if cfg.probe_points.is_empty() {
                cfg.probe_points = vec![(0.5, 0.5), (0.25, 0.25), (0.75, 0.25)];
            }
            let report = harness::run_experiment(&cfg)?;
            for p in &report.probes {
                println!(
                    "probe ({}, {}) -> node ({}, {}) at ({}, {})",
                    p.requested.0, p.requested.1, p.node.0, p.node.1, p.coords.0, p.coords.1
                );
            }
            println!("probes.csv in {}", cfg.output_dir.display());
            if report.blew_up && report.stable_expected {
                eprintln!("instability detected in a run expected stable");
                return Ok(4);
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
