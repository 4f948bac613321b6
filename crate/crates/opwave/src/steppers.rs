//! Three-level time-stepping schemes for d²w/dt² + Qw = 0, Q = A*A + B:
//! explicit, weighted, regularized, additive-averaged, and the splitting
//! variants whose step solves only shifted problems with the factors A, A*
//! and B — never with their products.
//!
//! Every scheme runs in the explicit-update form
//!     uⁿ⁺¹ = 2uⁿ − uⁿ⁻¹ − τ²·D̃uⁿ,
//! where D̃ encapsulates all inner solves; one stepper skeleton, schemes
//! differ only in the D̃ map. The direct implicit form of the weighted scheme
//! is kept as a cross-check path ([`weighted_step`]).


use crate::error::{Error, Result};
use crate::krylov::{self, SolveLog};
use crate::lattice::{Field, GridSpec};
use crate::operators::{
    compose, foundation_operator, laplacian, laplacian_directional, regularized_product,
    regularized_sum_product, scale, shifted_identity, shifted_inverse, sum, Axis, LinearMap,
    MapRef, PlateCoefficients,
};

/// Scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// uⁿ⁺¹ = 2uⁿ − uⁿ⁻¹ − τ²Quⁿ; stable only for τ ≤ τ₀ = 2/‖Q‖^½.
    Explicit,
    /// Q acting on the σ-weighted average σuⁿ⁺¹ + (1−2σ)uⁿ + σuⁿ⁻¹;
    /// unconditionally stable for σ ≥ 1/4.
    Weighted,
    /// D̃ = (I + μQ)⁻¹Q with μ = στ²; coincides with the weighted scheme.
    RegularizedQ,
    /// D̃ = Σ_α (I + μ_αQ_α)⁻¹Q_α over an additive split Q = ΣQ_α, realized
    /// by independent sub-steps that are then averaged; stable for σ ≥ p/4.
    AdditiveAveraged,
    /// D̃ = Ã*A + B̃ with Ã*A = (I+σ_AτA*)⁻¹A*A(I+σ_AτA)⁻¹ and
    /// B̃ = (I+σ_Bτ²B)⁻¹B; stable for σ_A² ≥ 1/2, σ_B ≥ 1/2.
    SplitProduct,
    /// As SplitProduct with B̃ = Σ_α (I+σ_Bτ²B_α)⁻¹B_α over the directional
    /// split of B; stable for σ_A² ≥ 1/2, σ_B ≥ p/2.
    SplitProductBSplit,
    /// As SplitProduct with Ã*A = Σ_α (I+σ_AτA_α*)⁻¹A_α*A_α(I+σ_AτA_α)⁻¹
    /// over the directional split of A; stable for σ_A² ≥ p/2, σ_B ≥ 1/2.
    SplitProductAASplit,
    /// Ã*A = (Σ_α Ã*_α)(Σ_α Ã_α), Ã_α = (I+σ_AτA_α)⁻¹A_α; stable for
    /// σ_A² ≥ p²/2, σ_B ≥ 1/2.
    SplitFactorSum,
}

pub const ALL_SCHEMES: [Scheme; 8] = [
    Scheme::Explicit,
    Scheme::Weighted,
    Scheme::RegularizedQ,
    Scheme::AdditiveAveraged,
    Scheme::SplitProduct,
    Scheme::SplitProductBSplit,
    Scheme::SplitProductAASplit,
    Scheme::SplitFactorSum,
];

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Explicit => "explicit",
            Scheme::Weighted => "weighted",
            Scheme::RegularizedQ => "regularized_q",
            Scheme::AdditiveAveraged => "additive_averaged",
            Scheme::SplitProduct => "split_product",
            Scheme::SplitProductBSplit => "split_product_bsplit",
            Scheme::SplitProductAASplit => "split_product_aasplit",
            Scheme::SplitFactorSum => "split_factor_sum",
        }
    }

    pub fn parse(s: &str) -> Result<Scheme> {
        ALL_SCHEMES
            .iter()
            .copied()
            .find(|sch| sch.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme '{s}'")))
    }

    /// The weight values at the scheme's stability boundary, for splitting
    /// count p. Returned as (σ, σ_A, σ_B); entries the scheme does not use
    /// are 0.
    pub fn threshold_weights(&self, p: usize) -> (f64, f64, f64) {
        let p = p as f64;
        match self {
            Scheme::Explicit => (0.0, 0.0, 0.0),
            Scheme::Weighted | Scheme::RegularizedQ => (0.25, 0.0, 0.0),
            Scheme::AdditiveAveraged => (p / 4.0, 0.0, 0.0),
            Scheme::SplitProduct => (0.0, 0.5_f64.sqrt(), 0.5),
            Scheme::SplitProductBSplit => (0.0, 0.5_f64.sqrt(), p / 2.0),
            Scheme::SplitProductAASplit => (0.0, (p / 2.0).sqrt(), 0.5),
            Scheme::SplitFactorSum => (0.0, (p * p / 2.0).sqrt(), 0.5),
        }
    }

    /// Whether the configured weights satisfy the scheme's sufficient
    /// stability condition (the explicit scheme has none; its τ bound is
    /// checked against τ₀ separately).
    pub fn weights_satisfy_threshold(&self, cfg: &SchemeConfig) -> bool {
        let (s, sa, sb) = self.threshold_weights(cfg.parts);
        match self {
            Scheme::Explicit => false,
            Scheme::Weighted | Scheme::RegularizedQ | Scheme::AdditiveAveraged => cfg.sigma >= s,
            _ => cfg.sigma_a >= sa && cfg.sigma_b >= sb,
        }
    }
}

/// Scheme selection plus all weights, the step, and the horizon.
#[derive(Debug, Clone, Copy)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub tau: f64,
    pub t_final: f64,
    /// σ for the weighted / regularized / additive-averaged schemes.
    pub sigma: f64,
    /// σ_A for the §4 schemes (constraints are on σ_A²).
    pub sigma_a: f64,
    /// σ_B for the §4 schemes.
    pub sigma_b: f64,
    /// Splitting count p.
    pub parts: usize,
    /// Relative-residual tolerance for all inner solves.
    pub solver_tol: f64,
}

impl SchemeConfig {
    /// Config with the scheme's threshold weights (except additive-averaged,
    /// whose default carries a 1e-12 margin above σ = p/4).
    pub fn new(scheme: Scheme, tau: f64, t_final: f64) -> Self {
        let parts = 2;
        let (mut sigma, sigma_a, sigma_b) = scheme.threshold_weights(parts);
        if scheme == Scheme::AdditiveAveraged {
            sigma += 1e-12;
        }
        SchemeConfig {
            scheme,
            tau,
            t_final,
            sigma,
            sigma_a,
            sigma_b,
            parts,
            solver_tol: 1e-10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::Config(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.t_final.is_finite() && self.t_final >= self.tau) {
            return Err(Error::Config(format!(
                "t_final must be at least tau, got {} < {}",
                self.t_final, self.tau
            )));
        }
        let n = (self.t_final / self.tau).round();
        if (n * self.tau - self.t_final).abs() > 1e-12 * self.t_final {
            return Err(Error::Config(format!(
                "tau {} does not divide t_final {}",
                self.tau, self.t_final
            )));
        }
        for (name, w) in [
            ("sigma", self.sigma),
            ("sigma_a", self.sigma_a),
            ("sigma_b", self.sigma_b),
        ] {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Config(format!(
                    "{name} must be finite and non-negative, got {w}"
                )));
            }
        }
        if self.parts == 0 {
            return Err(Error::Config("splitting count p must be at least 1".into()));
        }
        if !(self.solver_tol.is_finite() && self.solver_tol > 0.0) {
            return Err(Error::Config(format!(
                "solver_tol must be positive, got {}",
                self.solver_tol
            )));
        }
        Ok(())
    }

    /// Level count N with N·τ = T.
    pub fn steps(&self) -> usize {
        (self.t_final / self.tau).round() as usize
    }

    /// μ = στ² for the regularized / additive schemes.
    pub fn mu(&self) -> f64 {
        self.sigma * self.tau * self.tau
    }
}

/// The pair (uⁿ⁻¹, uⁿ) plus the level index — the minimal state any
/// three-level stepper carries.
#[derive(Debug, Clone)]
pub struct ThreeLevelState {
    pub u_prev: Field,
    pub u_curr: Field,
    pub n: usize,
}

impl ThreeLevelState {
    pub fn time(&self, tau: f64) -> f64 {
        self.n as f64 * tau
    }
}

/// I + μL over a borrowed operator; the system operator of the free stepper
/// functions' inline solves.
struct ShiftedRef<'a> {
    mu: f64,
    inner: &'a dyn LinearMap,
}

impl LinearMap for ShiftedRef<'_> {
    fn spec(&self) -> GridSpec {
        self.inner.spec()
    }
    fn apply(&self, u: &Field) -> Result<Field> {
        let mut out = self.inner.apply(u)?;
        out.scale_mut(self.mu);
        out.axpy(1.0, u);
        Ok(out)
    }
    fn descriptor(&self) -> String {
        format!("(I + {:.6e} ({}))", self.mu, self.inner.descriptor())
    }
}

/// Initial state per the second-order accurate start: u⁰ = w⁰ and
/// (I + (τ²/2)Q) w̄¹ = w⁰ + τw̃⁰, solved to `cfg.solver_tol`.
pub fn initialize(
    w0: &Field,
    w0_dot: &Field,
    q: &dyn LinearMap,
    cfg: &SchemeConfig,
) -> Result<ThreeLevelState> {
    let mut rhs = w0.clone();
    rhs.axpy(cfg.tau, w0_dot);
    let sys = ShiftedRef {
        mu: cfg.tau * cfg.tau / 2.0,
        inner: q,
    };
    let (u1, _) = krylov::cg_solve(
        &sys,
        &rhs,
        cfg.solver_tol,
        krylov::default_max_iter(w0.spec().len()),
    )?;
    Ok(ThreeLevelState {
        u_prev: w0.clone(),
        u_curr: u1,
        n: 1,
    })
}

/// One explicit step: uⁿ⁺¹ = 2uⁿ − uⁿ⁻¹ − τ²Quⁿ. No linear solves.
pub fn explicit_step(
    state: &ThreeLevelState,
    q: &dyn LinearMap,
    cfg: &SchemeConfig,
) -> Result<ThreeLevelState> {
    let qu = q.apply(&state.u_curr)?;
    Ok(advance(state, &qu, cfg.tau))
}

fn advance(state: &ThreeLevelState, d_u: &Field, tau: f64) -> ThreeLevelState {
    let mut next = state.u_curr.scaled(2.0);
    next.axpy(-1.0, &state.u_prev);
    next.axpy(-tau * tau, d_u);
    ThreeLevelState {
        u_prev: state.u_curr.clone(),
        u_curr: next,
        n: state.n + 1,
    }
}

/// One weighted step in its direct implicit form: solves
/// (I + στ²Q)uⁿ⁺¹ = (2I − (1−2σ)τ²Q)uⁿ − (I + στ²Q)uⁿ⁻¹.
/// Kept as the cross-check path for the regularized-equivalent form.
pub fn weighted_step(
    state: &ThreeLevelState,
    q: &dyn LinearMap,
    cfg: &SchemeConfig,
) -> Result<ThreeLevelState> {
    let t2 = cfg.tau * cfg.tau;
    let qn = q.apply(&state.u_curr)?;
    let qm = q.apply(&state.u_prev)?;
    let mut rhs = state.u_curr.scaled(2.0);
    rhs.axpy(-(1.0 - 2.0 * cfg.sigma) * t2, &qn);
    rhs.axpy(-1.0, &state.u_prev);
    rhs.axpy(-cfg.sigma * t2, &qm);
    let sys = ShiftedRef {
        mu: cfg.sigma * t2,
        inner: q,
    };
    let (next, _) = krylov::cg_solve(
        &sys,
        &rhs,
        cfg.solver_tol,
        krylov::default_max_iter(state.u_curr.spec().len()),
    )?;
    Ok(ThreeLevelState {
        u_prev: state.u_curr.clone(),
        u_curr: next,
        n: state.n + 1,
    })
}

/// One regularized step: uⁿ⁺¹ = 2uⁿ − uⁿ⁻¹ − τ²(I + μQ)⁻¹Quⁿ with μ = στ².
/// Algebraically equivalent to [`weighted_step`] in exact arithmetic.
pub fn regularized_q_step(
    state: &ThreeLevelState,
    q: &dyn LinearMap,
    cfg: &SchemeConfig,
) -> Result<ThreeLevelState> {
    let qu = q.apply(&state.u_curr)?;
    let damped = if cfg.mu() == 0.0 {
        qu
    } else {
        let sys = ShiftedRef {
            mu: cfg.mu(),
            inner: q,
        };
        krylov::cg_solve(
            &sys,
            &qu,
            cfg.solver_tol,
            krylov::default_max_iter(state.u_curr.spec().len()),
        )?
        .0
    };
    Ok(advance(state, &damped, cfg.tau))
}

/// One additive-averaged step over parts Q = Σ_α Q_α: p independent
/// sub-problems uⁿ⁺¹_α = 2uⁿ − uⁿ⁻¹ − τ²·(p·Q̃_α)uⁿ with
/// Q̃_α = (I + μ_αQ_α)⁻¹Q_α, averaged in fixed α-order. The p-scaling makes
/// the average equal the direct sum uⁿ⁺¹ = 2uⁿ − uⁿ⁻¹ − τ²ΣQ̃_αuⁿ.
pub fn additive_averaged_step(
    state: &ThreeLevelState,
    parts: &[MapRef],
    cfg: &SchemeConfig,
) -> Result<ThreeLevelState> {
    let p = parts.len();
    if p == 0 {
        return Err(Error::Config("additive scheme needs at least one part".into()));
    }
    let spec = *state.u_curr.spec();
    let mu = cfg.mu();
    let mut avg = Field::zeros(spec);
    for part in parts {
        let qu = part.apply(&state.u_curr)?;
        let damped = if mu == 0.0 {
            qu
        } else {
            let sys = shifted_identity(mu, part.clone());
            krylov::cg_solve(
                sys.as_ref(),
                &qu,
                cfg.solver_tol,
                krylov::default_max_iter(spec.len()),
            )?
            .0
        };
        let sub = advance(state, &damped.scaled(p as f64), cfg.tau);
        avg.axpy(1.0 / p as f64, &sub.u_curr);
    }
    Ok(ThreeLevelState {
        u_prev: state.u_curr.clone(),
        u_curr: avg,
        n: state.n + 1,
    })
}

/// One splitting step: uⁿ⁺¹ = 2uⁿ − uⁿ⁻¹ − τ²(Ã*A uⁿ + B̃ uⁿ), with the
/// regularized operators built by the operators module for the chosen
/// variant. All solves live inside those maps and involve only the factors.
pub fn split_product_step(
    state: &ThreeLevelState,
    ata_reg: &dyn LinearMap,
    b_reg: &dyn LinearMap,
    cfg: &SchemeConfig,
) -> Result<ThreeLevelState> {
    let mut d_u = ata_reg.apply(&state.u_curr)?;
    d_u.axpy(1.0, &b_reg.apply(&state.u_curr)?);
    Ok(advance(state, &d_u, cfg.tau))
}

/// A fully-assembled scheme for the plate problem: the operator family, the
/// effective update map D̃, the initialization solve, and the energy pair
/// (G, D) of the scheme's conserved functional.
pub struct Stepper {
    cfg: SchemeConfig,
    a: MapRef,
    q: MapRef,
    update: MapRef,
    init_inverse: MapRef,
    energy_g: MapRef,
    energy_d: MapRef,
    log: SolveLog,
}

impl Stepper {
    /// Build the scheme for d²w/dt² + A*Aw + Bw = 0 on `spec` with
    /// B = γ₁I + γ₂A. Every inner solve is recorded in `log`.
    pub fn for_plate(
        spec: GridSpec,
        plate: PlateCoefficients,
        cfg: SchemeConfig,
        log: SolveLog,
    ) -> Result<Stepper> {
        cfg.validate()?;
        let a = laplacian(spec);
        let b = foundation_operator(a.clone(), plate)?;
        let ata = compose(vec![a.clone(), a.clone()])?;
        let q = sum(vec![ata.clone(), b.clone()])?;
        let tol = cfg.solver_tol;
        let tau = cfg.tau;

        let update: MapRef = match cfg.scheme {
            Scheme::Explicit => q.clone(),
            Scheme::Weighted | Scheme::RegularizedQ => compose(vec![
                shifted_inverse(q.clone(), cfg.mu(), tol, Some(log.clone()))?,
                q.clone(),
            ])?,
            Scheme::AdditiveAveraged => {
                // natural additive split of the plate operator: Q = A*A + B
                let parts = vec![ata.clone(), b.clone()];
                let mut terms = Vec::new();
                for part in parts {
                    terms.push(compose(vec![
                        shifted_inverse(part.clone(), cfg.mu(), tol, Some(log.clone()))?,
                        part,
                    ])?);
                }
                sum(terms)?
            }
            Scheme::SplitProduct => {
                let ata_reg =
                    regularized_product(a.clone(), cfg.sigma_a, tau, tol, Some(log.clone()))?;
                let b_reg = regularized_b(&b, &cfg, Some(log.clone()))?;
                sum(vec![ata_reg, b_reg])?
            }
            Scheme::SplitProductBSplit => {
                let ata_reg =
                    regularized_product(a.clone(), cfg.sigma_a, tau, tol, Some(log.clone()))?;
                let b_parts = directional_b_parts(spec, plate, cfg.parts)?;
                let mut terms = vec![ata_reg];
                let mu_b = cfg.sigma_b * tau * tau;
                for part in b_parts {
                    terms.push(compose(vec![
                        shifted_inverse(part.clone(), mu_b, tol, Some(log.clone()))?,
                        part,
                    ])?);
                }
                sum(terms)?
            }
            Scheme::SplitProductAASplit => {
                let mut terms = Vec::new();
                for axis in [Axis::X1, Axis::X2] {
                    terms.push(regularized_product(
                        laplacian_directional(spec, axis),
                        cfg.sigma_a,
                        tau,
                        tol,
                        Some(log.clone()),
                    )?);
                }
                terms.push(regularized_b(&b, &cfg, Some(log.clone()))?);
                sum(terms)?
            }
            Scheme::SplitFactorSum => {
                let parts = vec![
                    laplacian_directional(spec, Axis::X1),
                    laplacian_directional(spec, Axis::X2),
                ];
                let ata_reg =
                    regularized_sum_product(parts, cfg.sigma_a, tau, tol, Some(log.clone()))?;
                let b_reg = regularized_b(&b, &cfg, Some(log.clone()))?;
                sum(vec![ata_reg, b_reg])?
            }
        };

        // energy functional of the scheme's canonical form:
        // weighted: C = I + στ²D with D = Q  ⇒  G = I + (σ − 1/4)τ²D
        // all D̃-form schemes: C = I, D = D̃  ⇒  G = I − (τ²/4)D̃
        let (energy_g, energy_d): (MapRef, MapRef) = match cfg.scheme {
            Scheme::Weighted => (
                shifted_identity((cfg.sigma - 0.25) * tau * tau, q.clone()),
                q.clone(),
            ),
            _ => (
                shifted_identity(-tau * tau / 4.0, update.clone()),
                update.clone(),
            ),
        };

        let init_inverse = shifted_inverse(q.clone(), tau * tau / 2.0, tol, Some(log.clone()))?;

        Ok(Stepper {
            cfg,
            a,
            q,
            update,
            init_inverse,
            energy_g,
            energy_d,
            log,
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    pub fn laplacian_map(&self) -> &MapRef {
        &self.a
    }

    /// Q = A*A + B.
    pub fn q(&self) -> &MapRef {
        &self.q
    }

    /// The scheme's effective operator D̃ in uⁿ⁺¹ = 2uⁿ − uⁿ⁻¹ − τ²D̃uⁿ.
    pub fn effective_operator(&self) -> &MapRef {
        &self.update
    }

    /// The (G, D) pair of the scheme's conserved energy functional.
    pub fn energy_operators(&self) -> (&MapRef, &MapRef) {
        (&self.energy_g, &self.energy_d)
    }

    /// The (C, D) pair of the scheme's canonical three-level form, for dense
    /// verification of G = C − (τ²/4)D ≥ 0.
    pub fn canonical_operators(&self) -> (MapRef, MapRef) {
        match self.cfg.scheme {
            Scheme::Weighted => (
                shifted_identity(self.cfg.mu(), self.q.clone()),
                self.q.clone(),
            ),
            _ => (
                crate::operators::identity(self.a.spec()),
                self.update.clone(),
            ),
        }
    }

    pub fn log(&self) -> &SolveLog {
        &self.log
    }

    /// u⁰ = w⁰, u¹ from the second-order initialization solve.
    pub fn initialize(&self, w0: &Field, w0_dot: &Field) -> Result<ThreeLevelState> {
        let mut rhs = w0.clone();
        rhs.axpy(self.cfg.tau, w0_dot);
        let u1 = self.init_inverse.apply(&rhs)?;
        Ok(ThreeLevelState {
            u_prev: w0.clone(),
            u_curr: u1,
            n: 1,
        })
    }

    pub fn step(&self, state: &ThreeLevelState) -> Result<ThreeLevelState> {
        let d_u = self.update.apply(&state.u_curr)?;
        Ok(advance(state, &d_u, self.cfg.tau))
    }
}

fn regularized_b(b: &MapRef, cfg: &SchemeConfig, log: Option<SolveLog>) -> Result<MapRef> {
    let mu = cfg.sigma_b * cfg.tau * cfg.tau;
    compose(vec![
        shifted_inverse(b.clone(), mu, cfg.solver_tol, log)?,
        b.clone(),
    ])
}

/// Directional split of B = γ₁I + γ₂A into B_α = γ₁/p·I + γ₂A_α. When B has
/// only the γ₁I term the split degenerates to p = 1 (splitting a multiple of
/// the identity would only inflate the σ_B ≥ p/2 requirement).
pub fn directional_b_parts(
    spec: GridSpec,
    plate: PlateCoefficients,
    p: usize,
) -> Result<Vec<MapRef>> {
    if plate.gamma2 == 0.0 {
        let a = laplacian(spec);
        return Ok(vec![foundation_operator(a, plate)?]);
    }
    if p != 2 {
        return Err(Error::Config(format!(
            "directional split of B supports p = 2, got {p}"
        )));
    }
    let mut parts = Vec::new();
    for axis in [Axis::X1, Axis::X2] {
        let da = laplacian_directional(spec, axis);
        let term = sum(vec![
            scale(plate.gamma1 / 2.0, crate::operators::identity(spec)),
            scale(plate.gamma2, da),
        ])?;
        parts.push(term);
    }
    Ok(parts)
}
