//! Three-level operator-difference schemes for the second-order evolution
//! equation
//!
//! ```text
//! d²w/dt² + A*A w + B w = 0,   w(0) = w⁰,  dw/dt(0) = w̃⁰,
//! ```
//!
//! in a finite-dimensional Hilbert space of grid functions: the explicit and
//! weighted schemes, regularized and additive-averaged variants, and the
//! splitting schemes whose step solves only shifted problems with the factors
//! A, A* and B — never with their products. The benchmark instance is a thin
//! plate on an elastic foundation (A = five-point grid Laplacian,
//! B = γ₁I + γ₂A), which has a closed-form spectral solution used as an
//! oracle throughout.
//!
//! Capabilities, one runnable example each (`cargo run --release -p opwave
//! --example <name>`):
//!
//! - `plate_vibration` — full benchmark run with error/energy CSV output
//! - `energy_conservation` — the conserved discrete energy of a stable scheme
//! - `explicit_threshold` — the sharp τ₀ = 2/‖Q‖^½ stability transition
//! - `stability_regions` — Lemma-1 verdicts and trajectory boundedness across
//!   schemes, weights, and steps
//! - `eigenmode_exact` — eigenmode trajectories against the scalar recurrence
//!   and the exact cosine
//! - `convergence_order` — Richardson orders of the weighted vs splitting
//!   schemes
//! - `split_cost` — per-step solve structure of the splitting scheme
//! - `exact_snapshots` — spectral-solution snapshots for plotting
//! - `probe_points` — deflection histories at chosen points
//!
//! The same capabilities are reachable through the thin `opwave` binary
//! (`run`, `sweep`, `stability`, `oracle`, `probe` subcommands).

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod krylov;
pub mod lattice;
pub mod operators;
pub mod oracle;
pub mod stability;
pub mod steppers;

pub use error::{Error, Result};
pub use harness::{ExperimentConfig, InitialCondition, RunReport};
pub use lattice::{inner_product, norm, weighted_norm, Field, GridSpec};
pub use operators::{LinearMap, MapRef, PlateCoefficients};
pub use steppers::{Scheme, SchemeConfig, Stepper, ThreeLevelState};
