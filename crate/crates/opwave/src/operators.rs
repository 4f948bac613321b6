//! Matrix-free self-adjoint grid operators: the five-point Laplacian A, its
//! directional splits A₁ + A₂ = A, the foundation operator B = γ₁I + γ₂A, and
//! the regularized compositions used by the splitting schemes,
//!
//! Ã*A = (I + σ_A τ A*)⁻¹ A*A (I + σ_A τ A)⁻¹,
//!
//! built from shifted inverses (I + μL)⁻¹ whose applications solve SPD systems
//! with the krylov module. All maps are immutable and cheap to share.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::krylov::{self, SolveLog};
use crate::lattice::{Field, GridSpec};

/// An abstract self-adjoint linear operator on grid functions, apply-only.
///
/// `adjoint_apply` defaults to `apply`; every operator the plate problem needs
/// is self-adjoint, but the hook keeps non-self-adjoint A instances possible
/// without an API change.
pub trait LinearMap: Send + Sync {
    fn spec(&self) -> GridSpec;

    fn apply(&self, u: &Field) -> Result<Field>;

    /// Symbolic name for reporting and solver logs. Composition joins factor
    /// names with `*`, so a solve whose operator contains the product A*A is
    /// recognizable by its descriptor.
    fn descriptor(&self) -> String;

    fn adjoint_apply(&self, u: &Field) -> Result<Field> {
        self.apply(u)
    }
}

/// Shared handle to an operator.
pub type MapRef = Arc<dyn LinearMap>;

fn check_input(spec: GridSpec, u: &Field) -> Result<()> {
    if *u.spec() == spec {
        Ok(())
    } else {
        Err(Error::SpecMismatch {
            left: spec,
            right: *u.spec(),
        })
    }
}

/// Elastic-foundation coefficients of B = γ₁I + γ₂A: γ₁ is the foundation
/// reaction modulus, γ₂ the membrane tension / shear coefficient. Zero is
/// admitted as the degenerate B-free case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateCoefficients {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl PlateCoefficients {
    pub fn new(gamma1: f64, gamma2: f64) -> Result<Self> {
        if !(gamma1.is_finite() && gamma2.is_finite() && gamma1 >= 0.0 && gamma2 >= 0.0) {
            return Err(Error::InvalidCoefficient(format!(
                "foundation coefficients must be finite and non-negative, got ({gamma1}, {gamma2})"
            )));
        }
        Ok(PlateCoefficients { gamma1, gamma2 })
    }
}

impl Default for PlateCoefficients {
    /// The benchmark values γ₁ = 1, γ₂ = 0.05.
    fn default() -> Self {
        PlateCoefficients {
            gamma1: 1.0,
            gamma2: 0.05,
        }
    }
}

struct Identity {
    spec: GridSpec,
}

impl LinearMap for Identity {
    fn spec(&self) -> GridSpec {
        self.spec
    }
    fn apply(&self, u: &Field) -> Result<Field> {
        check_input(self.spec, u)?;
        Ok(u.clone())
    }
    fn descriptor(&self) -> String {
        "I".into()
    }
}

struct ZeroMap {
    spec: GridSpec,
}

impl LinearMap for ZeroMap {
    fn spec(&self) -> GridSpec {
        self.spec
    }
    fn apply(&self, u: &Field) -> Result<Field> {
        check_input(self.spec, u)?;
        Ok(Field::zeros(self.spec))
    }
    fn descriptor(&self) -> String {
        "0".into()
    }
}

pub fn identity(spec: GridSpec) -> MapRef {
    Arc::new(Identity { spec })
}

pub fn zero_map(spec: GridSpec) -> MapRef {
    Arc::new(ZeroMap { spec })
}

/// Grid Laplace operator A on the usual five-point pattern, with zero
/// extension outside ω:
///
/// Au = −(u(x₁+h₁,·) − 2u + u(x₁−h₁,·))/h₁² − (u(·,x₂+h₂) − 2u + u(·,x₂−h₂))/h₂².
///
/// Self-adjoint and positive: A = A* ≥ δI with δ = λ₁.
struct Laplacian {
    spec: GridSpec,
}

impl LinearMap for Laplacian {
    fn spec(&self) -> GridSpec {
        self.spec
    }

    fn apply(&self, u: &Field) -> Result<Field> {
        check_input(self.spec, u)?;
        let (m1, m2) = self.spec.interior();
        let c1 = 1.0 / (self.spec.h1() * self.spec.h1());
        let c2 = 1.0 / (self.spec.h2() * self.spec.h2());
        let diag = 2.0 * (c1 + c2);
        let v = u.values();
        let mut out = vec![0.0; v.len()];
        for i2 in 0..m2 {
            let row = i2 * m1;
            for i1 in 0..m1 {
                let idx = row + i1;
                let mut acc = diag * v[idx];
                if i1 > 0 {
                    acc -= c1 * v[idx - 1];
                }
                if i1 + 1 < m1 {
                    acc -= c1 * v[idx + 1];
                }
                if i2 > 0 {
                    acc -= c2 * v[idx - m1];
                }
                if i2 + 1 < m2 {
                    acc -= c2 * v[idx + m1];
                }
                out[idx] = acc;
            }
        }
        Field::from_values(self.spec, out)
    }

    fn descriptor(&self) -> String {
        "A".into()
    }
}

pub fn laplacian(spec: GridSpec) -> MapRef {
    Arc::new(Laplacian { spec })
}

/// Grid axis for the directional splits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

/// One-dimensional second-difference operator along a single axis, with zero
/// extension; the five-point Laplacian is exactly the sum of the two.
struct DirectionalLaplacian {
    spec: GridSpec,
    axis: Axis,
}

impl LinearMap for DirectionalLaplacian {
    fn spec(&self) -> GridSpec {
        self.spec
    }

    fn apply(&self, u: &Field) -> Result<Field> {
        check_input(self.spec, u)?;
        let (m1, m2) = self.spec.interior();
        let v = u.values();
        let mut out = vec![0.0; v.len()];
        match self.axis {
            Axis::X1 => {
                let c = 1.0 / (self.spec.h1() * self.spec.h1());
                for i2 in 0..m2 {
                    let row = i2 * m1;
                    for i1 in 0..m1 {
                        let idx = row + i1;
                        let mut acc = 2.0 * c * v[idx];
                        if i1 > 0 {
                            acc -= c * v[idx - 1];
                        }
                        if i1 + 1 < m1 {
                            acc -= c * v[idx + 1];
                        }
                        out[idx] = acc;
                    }
                }
            }
            Axis::X2 => {
                let c = 1.0 / (self.spec.h2() * self.spec.h2());
                for i2 in 0..m2 {
                    let row = i2 * m1;
                    for i1 in 0..m1 {
                        let idx = row + i1;
                        let mut acc = 2.0 * c * v[idx];
                        if i2 > 0 {
                            acc -= c * v[idx - m1];
                        }
                        if i2 + 1 < m2 {
                            acc -= c * v[idx + m1];
                        }
                        out[idx] = acc;
                    }
                }
            }
        }
        Field::from_values(self.spec, out)
    }

    fn descriptor(&self) -> String {
        match self.axis {
            Axis::X1 => "A1".into(),
            Axis::X2 => "A2".into(),
        }
    }
}

pub fn laplacian_directional(spec: GridSpec, axis: Axis) -> MapRef {
    Arc::new(DirectionalLaplacian { spec, axis })
}

/// B = γ₁I + γ₂A for a self-adjoint non-negative A; self-adjoint and
/// non-negative (B = B* ≥ 0).
struct Foundation {
    a: MapRef,
    coeffs: PlateCoefficients,
}

impl LinearMap for Foundation {
    fn spec(&self) -> GridSpec {
        self.a.spec()
    }

    fn apply(&self, u: &Field) -> Result<Field> {
        let mut out = if self.coeffs.gamma2 != 0.0 {
            let mut au = self.a.apply(u)?;
            au.scale_mut(self.coeffs.gamma2);
            au
        } else {
            check_input(self.spec(), u)?;
            Field::zeros(self.spec())
        };
        out.axpy(self.coeffs.gamma1, u);
        Ok(out)
    }

    fn descriptor(&self) -> String {
        "B".into()
    }
}

pub fn foundation_operator(a: MapRef, coeffs: PlateCoefficients) -> Result<MapRef> {
    // reject non-finite/negative even though PlateCoefficients::new already does
    PlateCoefficients::new(coeffs.gamma1, coeffs.gamma2)?;
    Ok(Arc::new(Foundation { a, coeffs }))
}

struct Scaled {
    alpha: f64,
    inner: MapRef,
}

impl LinearMap for Scaled {
    fn spec(&self) -> GridSpec {
        self.inner.spec()
    }
    fn apply(&self, u: &Field) -> Result<Field> {
        let mut out = self.inner.apply(u)?;
        out.scale_mut(self.alpha);
        Ok(out)
    }
    fn descriptor(&self) -> String {
        format!("{:.6e} {}", self.alpha, self.inner.descriptor())
    }
}

pub fn scale(alpha: f64, inner: MapRef) -> MapRef {
    Arc::new(Scaled { alpha, inner })
}

/// I + α·L, the operator of the shifted systems and of the energy form G.
struct ShiftedIdentity {
    alpha: f64,
    inner: MapRef,
}

impl LinearMap for ShiftedIdentity {
    fn spec(&self) -> GridSpec {
        self.inner.spec()
    }
    fn apply(&self, u: &Field) -> Result<Field> {
        let mut out = self.inner.apply(u)?;
        out.scale_mut(self.alpha);
        out.axpy(1.0, u);
        Ok(out)
    }
    fn descriptor(&self) -> String {
        format!("(I + {:.6e} ({}))", self.alpha, self.inner.descriptor())
    }
}

pub fn shifted_identity(alpha: f64, inner: MapRef) -> MapRef {
    Arc::new(ShiftedIdentity { alpha, inner })
}

struct SumMap {
    spec: GridSpec,
    terms: Vec<MapRef>,
}

impl LinearMap for SumMap {
    fn spec(&self) -> GridSpec {
        self.spec
    }
    fn apply(&self, u: &Field) -> Result<Field> {
        check_input(self.spec, u)?;
        let mut acc = Field::zeros(self.spec);
        for t in &self.terms {
            acc.axpy(1.0, &t.apply(u)?);
        }
        Ok(acc)
    }
    fn descriptor(&self) -> String {
        let names: Vec<String> = self.terms.iter().map(|t| t.descriptor()).collect();
        format!("({})", names.join(" + "))
    }
}

/// Sum of conformable operators, applied term by term in the given order.
pub fn sum(terms: Vec<MapRef>) -> Result<MapRef> {
    let spec = terms
        .first()
        .ok_or_else(|| Error::InvalidGrid("sum of zero operators".into()))?
        .spec();
    for t in &terms {
        if t.spec() != spec {
            return Err(Error::SpecMismatch {
                left: spec,
                right: t.spec(),
            });
        }
    }
    Ok(Arc::new(SumMap { spec, terms }))
}

struct Composition {
    spec: GridSpec,
    factors: Vec<MapRef>,
}

impl LinearMap for Composition {
    fn spec(&self) -> GridSpec {
        self.spec
    }
    fn apply(&self, u: &Field) -> Result<Field> {
        check_input(self.spec, u)?;
        let mut cur = u.clone();
        for f in self.factors.iter().rev() {
            cur = f.apply(&cur)?;
        }
        Ok(cur)
    }
    fn descriptor(&self) -> String {
        let names: Vec<String> = self.factors.iter().map(|f| f.descriptor()).collect();
        names.join("*")
    }
}

/// Composition of factors, applied right to left: compose([F, G]) u = F(G u).
/// The descriptor concatenates factor names with `*`.
pub fn compose(factors: Vec<MapRef>) -> Result<MapRef> {
    let spec = factors
        .first()
        .ok_or_else(|| Error::InvalidGrid("composition of zero operators".into()))?
        .spec();
    for f in &factors {
        if f.spec() != spec {
            return Err(Error::SpecMismatch {
                left: spec,
                right: f.spec(),
            });
        }
    }
    Ok(Arc::new(Composition { spec, factors }))
}

/// (I + μL)⁻¹ realized by conjugate gradients to a relative residual ≤ tol.
/// Self-adjoint in exact arithmetic for self-adjoint L; μ = 0 degenerates to
/// the identity without a solve.
struct ShiftedInverse {
    inner: MapRef,
    system: MapRef,
    mu: f64,
    tol: f64,
    max_iter: usize,
    log: Option<SolveLog>,
}

impl LinearMap for ShiftedInverse {
    fn spec(&self) -> GridSpec {
        self.inner.spec()
    }

    fn apply(&self, u: &Field) -> Result<Field> {
        if self.mu == 0.0 {
            check_input(self.spec(), u)?;
            return Ok(u.clone());
        }
        let (y, report) = krylov::cg_solve(self.system.as_ref(), u, self.tol, self.max_iter)?;
        if let Some(log) = &self.log {
            log.record(self.system.descriptor(), report);
        }
        Ok(y)
    }

    fn descriptor(&self) -> String {
        format!("{}^-1", self.system.descriptor())
    }
}

/// Build (I + μL)⁻¹. `log`, when given, records every inner solve (operator
/// descriptor, iterations, residual).
pub fn shifted_inverse(l: MapRef, mu: f64, tol: f64, log: Option<SolveLog>) -> Result<MapRef> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::InvalidCoefficient(format!(
            "shift μ must be finite and non-negative, got {mu}"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidCoefficient(format!(
            "solver tolerance must be positive, got {tol}"
        )));
    }
    let max_iter = krylov::default_max_iter(l.spec().len());
    Ok(Arc::new(ShiftedInverse {
        system: shifted_identity(mu, l.clone()),
        inner: l,
        mu,
        tol,
        max_iter,
        log,
    }))
}

/// The multiplicatively regularized product
/// Ã*A = (I + σ_A τ A*)⁻¹ A* A (I + σ_A τ A)⁻¹.
///
/// One apply performs: solve (I + σ_AτA)y = u, form z = A*(Ay), solve
/// (I + σ_AτA*)r = z — two shifted solves with the factors A and A*, never
/// with their product. Self-adjoint and non-negative for A = A*.
struct RegularizedProduct {
    a: MapRef,
    right_inv: MapRef,
    left_inv: MapRef,
}

impl LinearMap for RegularizedProduct {
    fn spec(&self) -> GridSpec {
        self.a.spec()
    }

    fn apply(&self, u: &Field) -> Result<Field> {
        let y = self.right_inv.apply(u)?;
        let z = self.a.adjoint_apply(&self.a.apply(&y)?)?;
        self.left_inv.apply(&z)
    }

    fn descriptor(&self) -> String {
        format!(
            "{}*A*A*{}",
            self.left_inv.descriptor(),
            self.right_inv.descriptor()
        )
    }
}

pub fn regularized_product(
    a: MapRef,
    sigma_a: f64,
    tau: f64,
    tol: f64,
    log: Option<SolveLog>,
) -> Result<MapRef> {
    if !(sigma_a > 0.0 && tau > 0.0) {
        return Err(Error::InvalidCoefficient(format!(
            "regularized product needs σ_A > 0 and τ > 0, got ({sigma_a}, {tau})"
        )));
    }
    let mu = sigma_a * tau;
    // A = A* here; separate right/left factors kept so a non-self-adjoint A
    // plugs in by swapping the system operators.
    let right_inv = shifted_inverse(a.clone(), mu, tol, log.clone())?;
    let left_inv = shifted_inverse(a.clone(), mu, tol, log)?;
    Ok(Arc::new(RegularizedProduct {
        a,
        right_inv,
        left_inv,
    }))
}

/// The factor-split regularization Ã*A = (Σ_α Ã*_α)(Σ_α Ã_α) with
/// Ã_α = (I + σ_A τ A_α)⁻¹ A_α; each factor is applied as solve-then-multiply
/// (A_α and its shifted inverse commute).
struct RegularizedSumProduct {
    spec: GridSpec,
    parts: Vec<(MapRef, MapRef)>, // (A_alpha, (I + σ_A τ A_alpha)^-1)
}

impl LinearMap for RegularizedSumProduct {
    fn spec(&self) -> GridSpec {
        self.spec
    }

    fn apply(&self, u: &Field) -> Result<Field> {
        check_input(self.spec, u)?;
        let mut mid = Field::zeros(self.spec);
        for (a, inv) in &self.parts {
            mid.axpy(1.0, &a.apply(&inv.apply(u)?)?);
        }
        let mut out = Field::zeros(self.spec);
        for (a, inv) in &self.parts {
            out.axpy(1.0, &a.adjoint_apply(&inv.apply(&mid)?)?);
        }
        Ok(out)
    }

    fn descriptor(&self) -> String {
        let names: Vec<String> = self
            .parts
            .iter()
            .map(|(a, inv)| format!("{}*{}", a.descriptor(), inv.descriptor()))
            .collect();
        format!("(Σ {n})*(Σ {n})", n = names.join(" , "))
    }
}

pub fn regularized_sum_product(
    parts: Vec<MapRef>,
    sigma_a: f64,
    tau: f64,
    tol: f64,
    log: Option<SolveLog>,
) -> Result<MapRef> {
    if !(sigma_a > 0.0 && tau > 0.0) {
        return Err(Error::InvalidCoefficient(format!(
            "regularized sum product needs σ_A > 0 and τ > 0, got ({sigma_a}, {tau})"
        )));
    }
    let spec = parts
        .first()
        .ok_or_else(|| Error::InvalidGrid("factor split with zero parts".into()))?
        .spec();
    let mu = sigma_a * tau;
    let mut built = Vec::with_capacity(parts.len());
    for p in parts {
        if p.spec() != spec {
            return Err(Error::SpecMismatch {
                left: spec,
                right: p.spec(),
            });
        }
        let inv = shifted_inverse(p.clone(), mu, tol, log.clone())?;
        built.push((p, inv));
    }
    Ok(Arc::new(RegularizedSumProduct { spec, parts: built }))
}
