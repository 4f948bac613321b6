//! The discrete energy functional of the three-level schemes,
//!
//!   ‖(uⁿ⁺¹ − uⁿ)/τ‖²_G + ‖(uⁿ⁺¹ + uⁿ)/2‖²_D,
//!
//! which is an exact conservation law along stable trajectories, plus
//! blow-up monitoring for runs outside the stability region.

use std::io::Write;

use crate::error::{Error, Result};
use crate::lattice::{fmt_f64, inner_product, Field};
use crate::operators::LinearMap;

/// A trajectory whose max-abs exceeds this is flagged as blown up; the run
/// is reported, not crashed.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

/// Energy of one adjacent level pair.
#[derive(Debug, Clone, Copy)]
pub struct EnergyRecord {
    pub n: usize,
    /// ‖(uⁿ⁺¹ − uⁿ)/τ‖²_G
    pub kinetic: f64,
    /// ‖(uⁿ⁺¹ + uⁿ)/2‖²_D
    pub potential: f64,
    pub total: f64,
}

/// Evaluate the energy functional on the pair (uⁿ, uⁿ⁺¹). Applies G and D,
/// including any inner solves they carry, at their own tolerance.
///
/// A quadratic form more negative than 1e-10 of the total scale signals a
/// stability-condition violation (G ≥ 0 fails for the configured weights).
pub fn energy(
    u_n: &Field,
    u_np1: &Field,
    g: &dyn LinearMap,
    d: &dyn LinearMap,
    tau: f64,
    n: usize,
) -> Result<EnergyRecord> {
    let mut diff = u_np1.sub(u_n);
    diff.scale_mut(1.0 / tau);
    let mut avg = u_np1.add(u_n);
    avg.scale_mut(0.5);

    let kinetic = inner_product(&g.apply(&diff)?, &diff)?;
    let potential = inner_product(&d.apply(&avg)?, &avg)?;
    let scale = kinetic.abs() + potential.abs();
    let tolerance = 1e-10 * scale.max(f64::MIN_POSITIVE);
    if kinetic < -tolerance {
        return Err(Error::StabilityViolation {
            form: kinetic,
            tolerance,
        });
    }
    if potential < -tolerance {
        return Err(Error::StabilityViolation {
            form: potential,
            tolerance,
        });
    }
    Ok(EnergyRecord {
        n,
        kinetic,
        potential,
        total: kinetic + potential,
    })
}

/// Energy CSV: `n,t,kinetic,potential,total`, 17-significant-digit floats.
pub fn write_energy_csv<W: Write>(rows: &[(f64, EnergyRecord)], mut w: W) -> Result<()> {
    writeln!(w, "n,t,kinetic,potential,total")?;
    for (t, r) in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.n,
            fmt_f64(*t),
            fmt_f64(r.kinetic),
            fmt_f64(r.potential),
            fmt_f64(r.total)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krylov::SolveLog;
    use crate::lattice::GridSpec;
    use crate::operators::{identity, scale, PlateCoefficients};
    use crate::steppers::{Scheme, SchemeConfig, Stepper};

    #[test]
    fn zero_pair_has_zero_energy() {
        let g = GridSpec::unit_square(4).unwrap();
        let z = Field::zeros(g);
        let id = identity(g);
        let r = energy(&z, &z, id.as_ref(), id.as_ref(), 0.1, 0).unwrap();
        assert_eq!(r.total, 0.0);
    }

    /// Single-node weighted scheme at σ = 1/4 (G = I): the scalar-arithmetic
    /// value with the h₁h₂ = 1/4 mesh weight of the inner product.
    #[test]
    fn single_node_energy_value() {
        let spec = GridSpec::unit_square(2).unwrap();
        let plate = PlateCoefficients::default();
        let mut cfg = SchemeConfig::new(Scheme::Weighted, 0.1, 1.0);
        cfg.solver_tol = 1e-13;
        let stepper = Stepper::for_plate(spec, plate, cfg, SolveLog::new()).unwrap();
        let mut w0 = Field::zeros(spec);
        w0.set(1, 1, 1.0);
        let st = stepper.initialize(&w0, &Field::zeros(spec)).unwrap();
        let (g, d) = stepper.energy_operators();
        let r = energy(&st.u_prev, &st.u_curr, g.as_ref(), d.as_ref(), 0.1, 0).unwrap();
        // raw scalar values 31.71131483..., 133.06354310... times h1h2 = 1/4
        assert!((r.kinetic - 7.927828708005947).abs() < 1e-6, "{}", r.kinetic);
        assert!((r.potential - 33.26588577705862).abs() < 1e-6, "{}", r.potential);
        assert!((r.total - 41.19371448506457).abs() < 1e-6, "{}", r.total);
        assert!((4.0 * r.total - 164.77485794025827).abs() < 1e-5);
    }

    #[test]
    fn eigenmode_trajectory_conserves_energy() {
        let spec = GridSpec::unit_square(8).unwrap();
        let plate = PlateCoefficients::default();
        let mut cfg = SchemeConfig::new(Scheme::Weighted, 0.01, 1.0);
        cfg.solver_tol = 1e-12;
        let stepper = Stepper::for_plate(spec, plate, cfg, SolveLog::new()).unwrap();
        let (psi, _) = crate::oracle::eigenpair(&spec, 2, 2).unwrap();
        let mut st = stepper.initialize(&psi, &Field::zeros(spec)).unwrap();
        let (g, d) = stepper.energy_operators();
        let e0 = energy(&st.u_prev, &st.u_curr, g.as_ref(), d.as_ref(), cfg.tau, 0)
            .unwrap()
            .total;
        for k in 0..50 {
            let next = stepper.step(&st).unwrap();
            let e = energy(&st.u_curr, &next.u_curr, g.as_ref(), d.as_ref(), cfg.tau, k + 1)
                .unwrap()
                .total;
            assert!((e - e0).abs() <= 1e-8 * e0, "step {k}: {e} vs {e0}");
            st = next;
        }
    }

    #[test]
    fn negative_form_is_flagged() {
        let g = GridSpec::unit_square(4).unwrap();
        let u = Field::from_fn(g, |x1, x2| x1 + x2);
        let neg = scale(-1.0, identity(g));
        let id = identity(g);
        assert!(matches!(
            energy(&u, &u.scaled(2.0), neg.as_ref(), id.as_ref(), 0.1, 0),
            Err(Error::StabilityViolation { .. })
        ));
    }

    #[test]
    fn energy_csv_format() {
        let rec = EnergyRecord {
            n: 3,
            kinetic: 1.5,
            potential: 2.5,
            total: 4.0,
        };
        let mut buf = Vec::new();
        write_energy_csv(&[(0.3, rec)], &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), "n,t,kinetic,potential,total");
        let row = lines.next().unwrap();
        assert!(row.starts_with("3,"));
        assert!(row.contains("4.0000000000000000e0"));
    }
}
