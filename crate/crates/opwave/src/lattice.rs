//! Uniform rectangular grid, grid functions, and the Hilbert-space structure
//! of L₂(ω): dot product (w,u) = Σ w(x)u(x)·h₁h₂, plain and operator-weighted
//! norms.
//!
//! Grid functions are stored on interior nodes only, with implicit zero
//! extension outside ω (homogeneous Dirichlet structure). Storage is row-major
//! by the x₂ index, then the x₁ index, and this ordering is what the CSV dump
//! format uses, so dumps are reproducible bit-for-bit.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::operators::LinearMap;

/// Uniform rectangular grid over (0,l₁)×(0,l₂) with N_α subdivisions per side,
/// mesh steps h_α = l_α/N_α. Interior nodes are x_α = i_α·h_α, i_α = 1..N_α−1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    l1: f64,
    l2: f64,
    n1: usize,
    n2: usize,
}

impl GridSpec {
    pub fn new(l1: f64, l2: f64, n1: usize, n2: usize) -> Result<Self> {
        if !(l1.is_finite() && l2.is_finite() && l1 > 0.0 && l2 > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "side lengths must be finite and positive, got {l1} x {l2}"
            )));
        }
        if n1 < 2 || n2 < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least one interior node per direction (N >= 2), got {n1} x {n2}"
            )));
        }
        Ok(GridSpec { l1, l2, n1, n2 })
    }

    /// Unit square with N subdivisions per side.
    pub fn unit_square(n: usize) -> Result<Self> {
        GridSpec::new(1.0, 1.0, n, n)
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn h1(&self) -> f64 {
        self.l1 / self.n1 as f64
    }

    pub fn h2(&self) -> f64 {
        self.l2 / self.n2 as f64
    }

    /// Interior node counts per direction: (N₁−1, N₂−1).
    pub fn interior(&self) -> (usize, usize) {
        (self.n1 - 1, self.n2 - 1)
    }

    /// Total number of interior nodes (N₁−1)(N₂−1).
    pub fn len(&self) -> usize {
        (self.n1 - 1) * (self.n2 - 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinates of the interior node with indices (i₁, i₂), i_α in 1..N_α−1.
    pub fn node(&self, i1: usize, i2: usize) -> (f64, f64) {
        (i1 as f64 * self.h1(), i2 as f64 * self.h2())
    }

    /// Flat storage index of interior node (i₁, i₂); x₂-major.
    pub fn index(&self, i1: usize, i2: usize) -> usize {
        debug_assert!(i1 >= 1 && i1 <= self.n1 - 1);
        debug_assert!(i2 >= 1 && i2 <= self.n2 - 1);
        (i2 - 1) * (self.n1 - 1) + (i1 - 1)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[(0,{})x(0,{}), {}x{} cells]",
            self.l1, self.l2, self.n1, self.n2
        )
    }
}

fn check_same_spec(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::SpecMismatch {
            left: *a,
            right: *b,
        })
    }
}

/// A grid function on the interior nodes of ω, with implicit zero extension:
/// w(x) = 0 for x ∉ ω. These are the vectors of H = L₂(ω).
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    spec: GridSpec,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(spec: GridSpec) -> Self {
        Field {
            spec,
            values: vec![0.0; spec.len()],
        }
    }

    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match interior node count {} of {spec}",
                values.len(),
                spec.len()
            )));
        }
        Ok(Field { spec, values })
    }

    /// Sample a function of the node coordinates over the interior nodes.
    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let (m1, m2) = spec.interior();
        let mut values = Vec::with_capacity(spec.len());
        for i2 in 1..=m2 {
            for i1 in 1..=m1 {
                let (x1, x2) = spec.node(i1, i2);
                values.push(f(x1, x2));
            }
        }
        Field { spec, values }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, i1: usize, i2: usize) -> f64 {
        self.values[self.spec.index(i1, i2)]
    }

    pub fn set(&mut self, i1: usize, i2: usize, v: f64) {
        let idx = self.spec.index(i1, i2);
        self.values[idx] = v;
    }

    pub fn scale_mut(&mut self, a: f64) {
        for v in &mut self.values {
            *v *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> Field {
        let mut out = self.clone();
        out.scale_mut(a);
        out
    }

    /// self += a·x. Operands must share one GridSpec.
    pub fn axpy(&mut self, a: f64, x: &Field) {
        assert_eq!(self.spec, x.spec, "axpy operands on different grids");
        for (s, v) in self.values.iter_mut().zip(&x.values) {
            *s += a * v;
        }
    }

    pub fn add(&self, other: &Field) -> Field {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &Field) -> Field {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Dump in the fixed CSV format `i1,i2,x1,x2,value`, storage order,
    /// 17-significant-digit floats.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "i1,i2,x1,x2,value")?;
        let (m1, m2) = self.spec.interior();
        for i2 in 1..=m2 {
            for i1 in 1..=m1 {
                let (x1, x2) = self.spec.node(i1, i2);
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    i1,
                    i2,
                    fmt_f64(x1),
                    fmt_f64(x2),
                    fmt_f64(self.get(i1, i2))
                )?;
            }
        }
        Ok(())
    }

    /// Read a field dumped by [`Field::write_csv`]. The grid must be known;
    /// indices are checked against canonical storage order.
    pub fn read_csv<R: BufRead>(spec: GridSpec, r: R) -> Result<Self> {
        let mut lines = r.lines();
        match lines.next() {
            Some(Ok(h)) if h.trim() == "i1,i2,x1,x2,value" => {}
            _ => return Err(Error::Config("field CSV: bad or missing header".into())),
        }
        let mut values = Vec::with_capacity(spec.len());
        let (m1, m2) = spec.interior();
        let mut expect = (1..=m2).flat_map(|i2| (1..=m1).map(move |i1| (i1, i2)));
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 5 {
                return Err(Error::Config(format!("field CSV: bad row '{line}'")));
            }
            let i1: usize = cols[0]
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("field CSV: bad i1 in '{line}'")))?;
            let i2: usize = cols[1]
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("field CSV: bad i2 in '{line}'")))?;
            let v: f64 = cols[4]
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("field CSV: bad value in '{line}'")))?;
            match expect.next() {
                Some((e1, e2)) if (e1, e2) == (i1, i2) => values.push(v),
                _ => {
                    return Err(Error::Config(format!(
                        "field CSV: row ({i1},{i2}) out of order for grid {spec}"
                    )))
                }
            }
        }
        Field::from_values(spec, values)
    }
}

/// 17-significant-digit decimal formatting; round-trips f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Dot product (w,u) = Σ_{x∈ω} w(x)u(x)·h₁h₂.
pub fn inner_product(u: &Field, v: &Field) -> Result<f64> {
    check_same_spec(&u.spec, &v.spec)?;
    let w = u.spec.h1() * u.spec.h2();
    let mut acc = 0.0;
    for (a, b) in u.values.iter().zip(&v.values) {
        acc += a * b;
    }
    Ok(acc * w)
}

/// ‖u‖ = (u,u)^{1/2}.
pub fn norm(u: &Field) -> f64 {
    inner_product(u, u).expect("same field").sqrt()
}

/// ‖u‖_S = (Su,u)^{1/2} for self-adjoint non-negative S.
///
/// A quadratic form below −1e−12·‖u‖² is rejected as not non-negative;
/// smaller negative round-off is clamped to zero.
pub fn weighted_norm(u: &Field, s: &dyn LinearMap) -> Result<f64> {
    let su = s.apply(u)?;
    let form = inner_product(&su, u)?;
    let scale = inner_product(u, u)?;
    if form < -1e-12 * scale {
        return Err(Error::NotNonnegative { form });
    }
    Ok(form.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators;
    use crate::oracle;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_field(spec: GridSpec, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Field::from_fn(spec, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn grid_spec_invariants() {
        assert!(GridSpec::new(1.0, 1.0, 1, 4).is_err());
        assert!(GridSpec::new(0.0, 1.0, 4, 4).is_err());
        assert!(GridSpec::new(-1.0, 1.0, 4, 4).is_err());
        let g = GridSpec::new(2.0, 1.0, 8, 4).unwrap();
        assert_eq!(g.h1() * g.n1() as f64, g.l1());
        assert_eq!(g.h2() * g.n2() as f64, g.l2());
        assert_eq!(g.interior(), (7, 3));
        assert_eq!(g.len(), 21);
    }

    #[test]
    fn storage_is_x2_major() {
        let g = GridSpec::unit_square(4).unwrap();
        assert_eq!(g.index(1, 1), 0);
        assert_eq!(g.index(2, 1), 1);
        assert_eq!(g.index(3, 1), 2);
        assert_eq!(g.index(1, 2), 3);
        assert_eq!(g.index(3, 3), 8);
    }

    #[test]
    fn inner_product_zero_field() {
        let g = GridSpec::unit_square(5).unwrap();
        let z = Field::zeros(g);
        let v = random_field(g, 1);
        assert_eq!(inner_product(&z, &v).unwrap(), 0.0);
    }

    #[test]
    fn inner_product_mismatch_is_error() {
        let a = Field::zeros(GridSpec::unit_square(4).unwrap());
        let b = Field::zeros(GridSpec::unit_square(5).unwrap());
        assert!(matches!(
            inner_product(&a, &b),
            Err(Error::SpecMismatch { .. })
        ));
    }

    /// Eigenfunction normalization by direct summation of the §-formula on a
    /// 4x4 grid, independently of the oracle module path.
    #[test]
    fn eigenfunction_normalized_direct_summation() {
        let g = GridSpec::unit_square(4).unwrap();
        let h = 0.25;
        let mut direct = 0.0;
        for i2 in 1..4 {
            for i1 in 1..4 {
                let p = 2.0
                    * (std::f64::consts::PI * i1 as f64 * h).sin()
                    * (std::f64::consts::PI * i2 as f64 * h).sin();
                direct += p * p * h * h;
            }
        }
        assert!((direct - 1.0).abs() < 1e-12);

        let (psi, _) = oracle::eigenpair(&g, 1, 1).unwrap();
        assert!((inner_product(&psi, &psi).unwrap() - 1.0).abs() < 1e-12);
        assert!((norm(&psi) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenfunctions_orthogonal() {
        let g = GridSpec::unit_square(4).unwrap();
        let (p11, _) = oracle::eigenpair(&g, 1, 1).unwrap();
        let (p21, _) = oracle::eigenpair(&g, 2, 1).unwrap();
        assert!(inner_product(&p11, &p21).unwrap().abs() < 1e-12);
    }

    #[test]
    fn all_eigenpairs_orthonormal_up_to_8x8() {
        for n in [2usize, 4, 8] {
            let g = GridSpec::new(1.0, 0.5, n, n).unwrap();
            let modes: Vec<_> = (1..n)
                .flat_map(|k1| (1..n).map(move |k2| (k1, k2)))
                .collect();
            for &(k1, k2) in &modes {
                let (pk, _) = oracle::eigenpair(&g, k1, k2).unwrap();
                for &(m1, m2) in &modes {
                    let (pm, _) = oracle::eigenpair(&g, m1, m2).unwrap();
                    let ip = inner_product(&pk, &pm).unwrap();
                    let want = if (k1, k2) == (m1, m2) { 1.0 } else { 0.0 };
                    assert!(
                        (ip - want).abs() < 1e-12,
                        "({k1},{k2})·({m1},{m2}) = {ip} on {n}x{n}"
                    );
                }
            }
        }
    }

    /// ‖w⁰‖ for the polynomial initial deflection on the 256x256 unit square
    /// is the analytic 1/105 ≈ 0.009524 (the reported 0.9524 is 100x larger).
    #[test]
    fn poly_norm_is_one_over_105() {
        let g = GridSpec::unit_square(256).unwrap();
        let w0 = Field::from_fn(g, |x1, x2| x1 * x1 * (1.0 - x1) * x2 * x2 * (1.0 - x2));
        assert!((norm(&w0) - 1.0 / 105.0).abs() < 1e-6, "{}", norm(&w0));
    }

    #[test]
    fn weighted_norm_identity_and_zero() {
        let g = GridSpec::unit_square(6).unwrap();
        let u = random_field(g, 2);
        let id = operators::identity(g);
        let zero = operators::zero_map(g);
        assert!((weighted_norm(&u, id.as_ref()).unwrap() - norm(&u)).abs() < 1e-14);
        assert_eq!(weighted_norm(&u, zero.as_ref()).unwrap(), 0.0);
    }

    #[test]
    fn weighted_norm_laplacian_on_eigenmode() {
        let g = GridSpec::unit_square(4).unwrap();
        let a = operators::laplacian(g);
        let (psi, lam) = oracle::eigenpair(&g, 1, 1).unwrap();
        // dense 9x9 eigendecomposition gives lambda_{1,1} = 18.745166004060958
        assert!((lam - 18.745166004060958).abs() < 1e-10);
        assert!((weighted_norm(&psi, a.as_ref()).unwrap() - lam.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn weighted_norm_rejects_negative_form() {
        let g = GridSpec::unit_square(4).unwrap();
        let u = random_field(g, 3);
        let neg = operators::scale(-1.0, operators::identity(g));
        assert!(matches!(
            weighted_norm(&u, neg.as_ref()),
            Err(Error::NotNonnegative { .. })
        ));
    }

    #[test]
    fn parallelogram_identity() {
        let g = GridSpec::new(1.5, 0.75, 8, 6).unwrap();
        for seed in 0..20 {
            let u = random_field(g, 100 + seed);
            let v = random_field(g, 200 + seed);
            let lhs = norm(&u.add(&v)).powi(2) + norm(&u.sub(&v)).powi(2);
            let rhs = 2.0 * (norm(&u).powi(2) + norm(&v).powi(2));
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
        }
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let g = GridSpec::new(1.25, 1.0, 5, 4).unwrap();
        let u = random_field(g, 42);
        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        let back = Field::read_csv(g, buf.as_slice()).unwrap();
        assert_eq!(u, back);
    }

    #[test]
    fn csv_rejects_wrong_grid() {
        let g = GridSpec::unit_square(4).unwrap();
        let u = random_field(g, 7);
        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        let other = GridSpec::unit_square(5).unwrap();
        assert!(Field::read_csv(other, buf.as_slice()).is_err());
    }
}
