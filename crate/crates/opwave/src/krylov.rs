//! Plain conjugate gradients for the SPD shifted systems (I + μL) that every
//! implicit and regularized scheme produces. No preconditioning; the shifts
//! the schemes generate (μ ~ τ or τ²) keep the systems well conditioned.
//!
//! Initial guess is always the zero vector, for reproducibility.

use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::lattice::{inner_product, norm, Field};
use crate::operators::LinearMap;

/// Outcome of one CG solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_relative_residual: f64,
    pub converged: bool,
}

/// One recorded solve: which operator was inverted and how it went. The
/// splitting schemes' computational claim — no solve ever contains the
/// product A*A — is checked against these descriptors.
#[derive(Debug, Clone)]
pub struct SolveEvent {
    pub operator: String,
    pub report: SolveReport,
}

/// Shared, thread-safe log of CG solves.
#[derive(Debug, Clone, Default)]
pub struct SolveLog {
    events: Arc<Mutex<Vec<SolveEvent>>>,
}

impl SolveLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&self, operator: String, report: SolveReport) {
        self.events.lock().unwrap().push(SolveEvent { operator, report });
    }

    pub fn events(&self) -> Vec<SolveEvent> {
        self.events.lock().unwrap().clone()
    }

    pub fn len(&self) -> usize {
        self.events.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_iterations(&self) -> usize {
        self.events
            .lock()
            .unwrap()
            .iter()
            .map(|e| e.report.iterations)
            .sum()
    }
}

/// Default iteration cap: 10·√dim + 100.
pub fn default_max_iter(dim: usize) -> usize {
    10 * (dim as f64).sqrt().ceil() as usize + 100
}

/// Solve L y = rhs for self-adjoint positive definite L, to a relative
/// residual ‖Ly − rhs‖/‖rhs‖ ≤ tol. The residual reported on convergence is
/// recomputed from scratch, not taken from the CG recurrence.
///
/// Zero rhs returns zero in 0 iterations. Exceeding `max_iter` is an
/// iteration-limit error carrying the final residual; NaN anywhere is a
/// numerical-breakdown error.
pub fn cg_solve(
    l: &dyn LinearMap,
    rhs: &Field,
    tol: f64,
    max_iter: usize,
) -> Result<(Field, SolveReport)> {
    let rhs_norm = norm(rhs);
    if rhs_norm == 0.0 {
        return Ok((
            Field::zeros(l.spec()),
            SolveReport {
                iterations: 0,
                final_relative_residual: 0.0,
                converged: true,
            },
        ));
    }

    let mut x = Field::zeros(l.spec());
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rs = inner_product(&r, &r)?;

    for k in 1..=max_iter {
        let ap = l.apply(&p)?;
        let pap = inner_product(&p, &ap)?;
        if !pap.is_finite() || !rs.is_finite() {
            return Err(Error::NumericalBreakdown { iteration: k });
        }
        if pap <= 0.0 {
            // operator not positive definite on this Krylov direction
            return Err(Error::NumericalBreakdown { iteration: k });
        }
        let alpha = rs / pap;
        x.axpy(alpha, &p);
        r.axpy(-alpha, &ap);
        let rs_new = inner_product(&r, &r)?;
        if !rs_new.is_finite() {
            return Err(Error::NumericalBreakdown { iteration: k });
        }

        if rs_new.sqrt() <= tol * rhs_norm {
            // verify against the true residual; restart from it if the
            // recurrence has drifted
            let true_r = rhs.sub(&l.apply(&x)?);
            let tr = norm(&true_r) / rhs_norm;
            if tr <= tol {
                return Ok((
                    x,
                    SolveReport {
                        iterations: k,
                        final_relative_residual: tr,
                        converged: true,
                    },
                ));
            }
            r = true_r;
            p = r.clone();
            rs = inner_product(&r, &r)?;
            continue;
        }

        let beta = rs_new / rs;
        let mut p_next = r.clone();
        p_next.axpy(beta, &p);
        p = p_next;
        rs = rs_new;
    }

    let final_rel = norm(&rhs.sub(&l.apply(&x)?)) / rhs_norm;
    Err(Error::IterationLimit {
        iterations: max_iter,
        residual: final_rel,
    })
}
