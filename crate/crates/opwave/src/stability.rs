//! Numerical verification of the three-level stability condition
//! G = C − (τ²/4)D ≥ 0 and computation of stability thresholds.
//!
//! The dense checks are desk-scale activities (dimension capped); production
//! grids rely on the proven sufficient weight conditions.

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{inner_product, norm, Field};
use crate::operators::LinearMap;

/// Default dense-check dimension cap: 32×32 interior plus margin.
pub const DEFAULT_DIM_CAP: usize = 1024;

/// Outcome of a dense check of the canonical-form condition.
#[derive(Debug, Clone, Copy)]
pub struct StabilityVerdict {
    /// Smallest eigenvalue of G = C − (τ²/4)D.
    pub g_min_eigenvalue: f64,
    /// Whether g_min ≥ −1e-10·‖C‖ (floating-point zero crossings count as
    /// non-negative; thresholds like σ = 1/4 make G exactly singular-free but
    /// numerically borderline).
    pub condition_2_9_holds: bool,
    /// Sharp step threshold 2/√λ_max(C⁻¹D) for this operator pair, when C is
    /// positive definite; for C = I this is the explicit-scheme τ₀ = 2/‖D‖^½.
    pub tau_0: Option<f64>,
}

/// Largest eigenvalue of a self-adjoint non-negative operator by power
/// iteration, to relative tolerance `tol` on the Rayleigh quotient.
pub fn operator_norm(l: &dyn LinearMap, tol: f64) -> Result<f64> {
    let spec = l.spec();
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e3779b97f4a7c15);
    let mut v = Field::from_fn(spec, |_, _| rng.gen_range(-1.0..1.0));
    let nv = norm(&v);
    if nv == 0.0 {
        return Ok(0.0);
    }
    v.scale_mut(1.0 / nv);

    let max_iter = 20_000;
    let mut prev = 0.0;
    for k in 1..=max_iter {
        let lv = l.apply(&v)?;
        let rayleigh = inner_product(&lv, &v)?;
        let nlv = norm(&lv);
        if nlv == 0.0 {
            return Ok(0.0); // zero map
        }
        if k > 1 && (rayleigh - prev).abs() <= tol * rayleigh.abs().max(f64::MIN_POSITIVE) {
            return Ok(rayleigh);
        }
        prev = rayleigh;
        v = lv.scaled(1.0 / nlv);
    }
    Err(Error::PowerIterationStalled {
        iterations: max_iter,
    })
}

/// Explicit-scheme step bound τ₀ = 2/‖Q‖^{1/2}.
pub fn explicit_threshold(q: &dyn LinearMap, tol: f64) -> Result<f64> {
    let n = operator_norm(q, tol)?;
    Ok(2.0 / n.sqrt())
}

/// Assemble the dense matrix of an operator in the nodal basis by applying it
/// to basis vectors. The mesh weight is uniform, so self-adjointness in L₂(ω)
/// is plain matrix symmetry.
pub fn dense_matrix(l: &dyn LinearMap, dim_cap: usize) -> Result<DMatrix<f64>> {
    let spec = l.spec();
    let dim = spec.len();
    if dim > dim_cap {
        return Err(Error::DenseDimensionTooLarge { dim, cap: dim_cap });
    }
    let mut m = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut e = Field::zeros(spec);
        e.values_mut()[j] = 1.0;
        let col = l.apply(&e)?;
        for (i, v) in col.values().iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    Ok(m)
}

fn spectral_range(m: &DMatrix<f64>) -> (f64, f64) {
    let eig = m.clone().symmetric_eigen();
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &e in eig.eigenvalues.iter() {
        min = min.min(e);
        max = max.max(e);
    }
    (min, max)
}

fn check_symmetric_positive(name: &str, m: &DMatrix<f64>) -> Result<(f64, f64)> {
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let asym = (m - m.transpose()).amax();
    if asym > 1e-10 * scale {
        return Err(Error::InvalidCoefficient(format!(
            "operator {name} is not symmetric: max asymmetry {asym:e} at scale {scale:e}"
        )));
    }
    let (min, max) = spectral_range(m);
    if min < -1e-10 * scale {
        return Err(Error::InvalidCoefficient(format!(
            "operator {name} is not positive: min eigenvalue {min:e}"
        )));
    }
    Ok((min, max))
}

/// Dense verification of the condition G = C − (τ²/4)D ≥ 0 for the canonical
/// three-level scheme with weights C, D. Also verifies that C and D are
/// symmetric positive to 1e-10.
pub fn check_lemma1(
    c: &dyn LinearMap,
    d: &dyn LinearMap,
    tau: f64,
    dim_cap: usize,
) -> Result<StabilityVerdict> {
    let cm = dense_matrix(c, dim_cap)?;
    let dm = dense_matrix(d, dim_cap)?;
    check_symmetric_positive("C", &cm)?;
    check_symmetric_positive("D", &dm)?;

    let g = &cm - &dm * (tau * tau / 4.0);
    // symmetrize away the operators' own round-off before eigensolving
    let g = (&g + g.transpose()) * 0.5;
    let (g_min, _) = spectral_range(&g);
    let (_, c_norm) = spectral_range(&cm);
    let holds = g_min >= -1e-10 * c_norm;

    // sharp threshold via the generalized problem D x = λ C x
    let tau_0 = nalgebra::Cholesky::new(cm).map(|chol| {
        let linv = chol.l().try_inverse().expect("triangular inverse");
        let m = &linv * &dm * linv.transpose();
        let m = (&m + m.transpose()) * 0.5;
        let (_, lmax) = spectral_range(&m);
        2.0 / lmax.sqrt()
    });

    Ok(StabilityVerdict {
        g_min_eigenvalue: g_min,
        condition_2_9_holds: holds,
        tau_0,
    })
}
