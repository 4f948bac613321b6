//! The explicit scheme is stable exactly up to τ₀ = 2/‖Q‖^{1/2}. Driving the
//! highest grid mode at 0.95τ₀ and 1.05τ₀ shows the sharp transition:
//! bounded oscillation on one side, a 10x blow-up within a few steps on the
//! other.

use opwave::krylov::SolveLog;
use opwave::stability::explicit_threshold;
use opwave::steppers::{explicit_step, initialize};
use opwave::{norm, Field, GridSpec, PlateCoefficients, Scheme, SchemeConfig, Stepper};

fn main() -> opwave::Result<()> {
    let grid = GridSpec::unit_square(16)?;
    let plate = PlateCoefficients::default();
    let probe = Stepper::for_plate(
        grid,
        plate,
        SchemeConfig::new(Scheme::Explicit, 1.0, 1.0),
        SolveLog::new(),
    )?;
    let q = probe.q().clone();
    let tau0 = explicit_threshold(q.as_ref(), 1e-8)?;
    println!("tau_0 = 2/||Q||^(1/2) = {tau0:.6e}");

    let (m1, m2) = grid.interior();
    let (psi, _) = opwave::oracle::eigenpair(&grid, m1, m2)?;

    for factor in [0.95, 1.05] {
        let tau = factor * tau0;
        let cfg = SchemeConfig::new(Scheme::Explicit, tau, 500.0 * tau);
        let mut st = initialize(&psi, &Field::zeros(grid), q.as_ref(), &cfg)?;
        let initial = norm(&st.u_curr);
        let mut peak = initial;
        let mut blew_at = None;
        for n in 2..=cfg.steps() {
            st = explicit_step(&st, q.as_ref(), &cfg)?;
            let m = norm(&st.u_curr);
            peak = peak.max(m);
            if m >= 10.0 * initial && blew_at.is_none() {
                blew_at = Some(n);
                break;
            }
        }
        match blew_at {
            Some(n) => println!(
                "tau = {factor}tau_0: ||u|| grew 10x by level {n} — unstable"
            ),
            None => println!(
                "tau = {factor}tau_0: bounded over 500 steps, peak/initial = {:.3}",
                peak / initial
            ),
        }
    }
    Ok(())
}
