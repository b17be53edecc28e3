//! Truncated Taylor-series ("jet") arithmetic over complex coefficients.
//!
//! A jet stores the partial derivatives of a smooth function at a base point
//! up to a fixed total degree, in chart variables z¹..zᵐ, their conjugates
//! z̄¹..z̄ᵐ, and an optional real deformation parameter t with its own
//! truncation degree. Every operation is exact on the stored coefficients:
//! the result equals the truncation of the corresponding operation on formal
//! power series.
//!
//! Truncation orders are part of a jet's shape and are checked on every
//! binary operation; combining jets of different shapes is an error, never a
//! silent coercion. Use [`Jet::truncate`] to move to a lower order
//! explicitly.

mod matrix;

pub use matrix::JetMatrix;

use num_complex::Complex64;
use once_cell::sync::{Lazy, OnceCell};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};
use thiserror::Error;

/// Complex scalar used for all jet coefficients.
pub type C = Complex64;

/// Errors from jet and jet-matrix arithmetic.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum JetError {
    #[error("jet shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: JetShape, found: JetShape },
    #[error("singular input: {0}")]
    SingularInput(String),
    #[error("truncation degree too low: {0}")]
    DegreeTooLow(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix size mismatch: {0}")]
    SizeMismatch(String),
}

pub type Result<T> = std::result::Result<T, JetError>;

/// Chart dimension and truncation degrees identifying a family of jets.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct JetShape {
    /// Number of holomorphic chart variables.
    pub m: usize,
    /// Truncation degree in total z/z̄ degree.
    pub order: u32,
    /// Truncation degree in t (0 when t is absent).
    pub t_order: u32,
}

impl JetShape {
    pub fn new(m: usize, order: u32, t_order: u32) -> Self {
        assert!(m >= 1, "chart dimension must be at least 1");
        JetShape { m, order, t_order }
    }

    /// Shape with the z-truncation lowered by `k`.
    pub fn lower(self, k: u32) -> Self {
        JetShape { order: self.order - k, ..self }
    }
}

impl fmt::Display for JetShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(m={}, order={}, t_order={})", self.m, self.order, self.t_order)
    }
}

/// One of the formal variables of a jet.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Var {
    /// z^i, 0-based.
    Z(usize),
    /// z̄^i, 0-based.
    Zbar(usize),
    /// The real deformation parameter.
    T,
}

/// Exponent vector (z¹..zᵐ, z̄¹..z̄ᵐ, t) of a single monomial.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(pub Box<[u8]>);

impl MultiIndex {
    pub fn z_degree(&self) -> u32 {
        let n = self.0.len() - 1;
        self.0[..n].iter().map(|&e| e as u32).sum()
    }

    pub fn t_degree(&self) -> u32 {
        self.0[self.0.len() - 1] as u32
    }
}

/// Enumeration of all monomials of a shape, with lookup and derived tables.
///
/// Tables are interned globally so jets of equal shape share one `Arc`.
pub struct ShapeTable {
    shape: JetShape,
    indices: Vec<Box<[u8]>>,
    pos: HashMap<Box<[u8]>, u32>,
    conj_perm: Vec<u32>,
    by_zdeg: Vec<Vec<u32>>,
    prod: OnceCell<Vec<Option<u32>>>,
}

impl ShapeTable {
    fn build(shape: JetShape) -> ShapeTable {
        let nvars = 2 * shape.m + 1;
        let mut indices: Vec<Box<[u8]>> = Vec::new();
        let mut cur = vec![0u8; nvars];
        // Depth-first enumeration; sorted afterwards so degrees ascend and the
        // constant term sits at position 0.
        fn rec(
            cur: &mut Vec<u8>,
            var: usize,
            zleft: u32,
            shape: &JetShape,
            out: &mut Vec<Box<[u8]>>,
        ) {
            if var == 2 * shape.m {
                for et in 0..=shape.t_order {
                    cur[var] = et as u8;
                    out.push(cur.clone().into_boxed_slice());
                }
                cur[var] = 0;
                return;
            }
            for e in 0..=zleft {
                cur[var] = e as u8;
                rec(cur, var + 1, zleft - e, shape, out);
            }
            cur[var] = 0;
        }
        rec(&mut cur, 0, shape.order, &shape, &mut indices);
        indices.sort_by_key(|ix| {
            let z: u32 = ix[..nvars - 1].iter().map(|&e| e as u32).sum();
            let t = ix[nvars - 1];
            (z + t as u32, z, ix.clone())
        });
        let mut pos = HashMap::with_capacity(indices.len());
        for (i, ix) in indices.iter().enumerate() {
            pos.insert(ix.clone(), i as u32);
        }
        let conj_perm = indices
            .iter()
            .map(|ix| {
                let mut sw = ix.clone();
                for i in 0..shape.m {
                    sw.swap(i, shape.m + i);
                }
                pos[&sw]
            })
            .collect();
        let mut by_zdeg: Vec<Vec<u32>> = vec![Vec::new(); shape.order as usize + 1];
        for (i, ix) in indices.iter().enumerate() {
            let z: u32 = ix[..nvars - 1].iter().map(|&e| e as u32).sum();
            by_zdeg[z as usize].push(i as u32);
        }
        ShapeTable { shape, indices, pos, conj_perm, by_zdeg, prod: OnceCell::new() }
    }

    pub fn shape(&self) -> JetShape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn index(&self, i: usize) -> &[u8] {
        &self.indices[i]
    }

    pub fn position(&self, exps: &[u8]) -> Option<usize> {
        self.pos.get(exps).map(|&p| p as usize)
    }

    /// Positions of all monomials of the given total z/z̄ degree (any t power).
    pub fn positions_of_zdegree(&self, d: u32) -> &[u32] {
        &self.by_zdeg[d as usize]
    }

    fn product_table(&self) -> &[Option<u32>] {
        self.prod.get_or_init(|| {
            let n = self.indices.len();
            let nvars = 2 * self.shape.m + 1;
            let mut tab = vec![None; n * n];
            let mut sum = vec![0u8; nvars];
            for i in 0..n {
                for j in 0..n {
                    let (a, b) = (&self.indices[i], &self.indices[j]);
                    let mut zdeg = 0u32;
                    for v in 0..nvars {
                        sum[v] = a[v] + b[v];
                        if v < nvars - 1 {
                            zdeg += sum[v] as u32;
                        }
                    }
                    if zdeg <= self.shape.order && (sum[nvars - 1] as u32) <= self.shape.t_order {
                        tab[i * n + j] = self.pos.get(sum.as_slice()).copied();
                    }
                }
            }
            tab
        })
    }
}

static TABLES: Lazy<Mutex<HashMap<JetShape, Arc<ShapeTable>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn table_for(shape: JetShape) -> Arc<ShapeTable> {
    let mut map = TABLES.lock().unwrap();
    map.entry(shape).or_insert_with(|| Arc::new(ShapeTable::build(shape))).clone()
}

/// Truncated Taylor expansion at a base point.
#[derive(Clone)]
pub struct Jet {
    table: Arc<ShapeTable>,
    coeffs: Vec<C>,
    real: bool,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet{} [", self.shape())?;
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.norm_sqr() != 0.0 {
                if !first {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}: {}", self.table.index(i), c)?;
                first = false;
            }
        }
        write!(f, "]")
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.shape() == other.shape() && self.coeffs == other.coeffs
    }
}

impl Jet {
    pub fn zeros(shape: JetShape) -> Jet {
        let table = table_for(shape);
        let n = table.len();
        Jet { table, coeffs: vec![C::new(0.0, 0.0); n], real: true }
    }

    pub fn constant(shape: JetShape, value: C) -> Jet {
        let mut j = Jet::zeros(shape);
        j.coeffs[0] = value;
        j.real = value.im == 0.0;
        j
    }

    /// The jet of the coordinate function for `var` (first-degree monomial).
    pub fn variable(shape: JetShape, var: Var) -> Jet {
        let mut j = Jet::zeros(shape);
        let nvars = 2 * shape.m + 1;
        let mut exps = vec![0u8; nvars];
        match var {
            Var::Z(i) => {
                assert!(i < shape.m && shape.order >= 1);
                exps[i] = 1;
            }
            Var::Zbar(i) => {
                assert!(i < shape.m && shape.order >= 1);
                exps[shape.m + i] = 1;
            }
            Var::T => {
                assert!(shape.t_order >= 1, "shape has no t variable");
                exps[nvars - 1] = 1;
            }
        }
        let p = j.table.position(&exps).expect("variable monomial in range");
        j.coeffs[p] = C::new(1.0, 0.0);
        j.real = false;
        j
    }

    pub fn shape(&self) -> JetShape {
        self.table.shape()
    }

    pub fn table(&self) -> &ShapeTable {
        &self.table
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C] {
        self.real = false;
        &mut self.coeffs
    }

    /// Value at the base point (constant coefficient).
    pub fn c0(&self) -> C {
        self.coeffs[0]
    }

    pub fn coeff(&self, exps: &[u8]) -> C {
        match self.table.position(exps) {
            Some(p) => self.coeffs[p],
            None => C::new(0.0, 0.0),
        }
    }

    pub fn set_coeff(&mut self, exps: &[u8], value: C) {
        let p = self.table.position(exps).expect("monomial outside truncation");
        self.coeffs[p] = value;
        self.real = false;
    }

    /// Whether this jet was constructed or verified as real-valued.
    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Exact check of the realness symmetry: the coefficient at a monomial
    /// with z and z̄ exponents swapped equals the conjugate coefficient.
    pub fn real_symmetry_holds(&self, tol: f64) -> bool {
        let perm = &self.table.conj_perm;
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| (c - self.coeffs[perm[i] as usize].conj()).norm() <= tol)
    }

    /// Verify the realness symmetry and set the flag.
    pub fn into_real(mut self) -> Result<Jet> {
        if !self.real_symmetry_holds(0.0) {
            return Err(JetError::SingularInput("jet is not real-symmetric".into()));
        }
        self.real = true;
        Ok(self)
    }

    /// Symmetrize to the nearest real jet: (j + conj j)/2, flagged real.
    pub fn realified(&self) -> Jet {
        let mut out = self.checked_add(&self.conj()).unwrap().scale(C::new(0.5, 0.0));
        out.real = true;
        out
    }

    fn check_shape(&self, other: &Jet) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(JetError::ShapeMismatch { expected: self.shape(), found: other.shape() });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Jet) -> Result<Jet> {
        self.check_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Jet { table: self.table.clone(), coeffs, real: self.real && other.real })
    }

    pub fn checked_sub(&self, other: &Jet) -> Result<Jet> {
        self.check_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Jet { table: self.table.clone(), coeffs, real: self.real && other.real })
    }

    pub fn neg(&self) -> Jet {
        Jet {
            table: self.table.clone(),
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
            real: self.real,
        }
    }

    pub fn scale(&self, s: C) -> Jet {
        Jet {
            table: self.table.clone(),
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
            real: self.real && s.im == 0.0,
        }
    }

    pub fn checked_mul(&self, other: &Jet) -> Result<Jet> {
        self.check_shape(other)?;
        let n = self.table.len();
        let tab = self.table.product_table();
        let mut coeffs = vec![C::new(0.0, 0.0); n];
        for i in 0..n {
            let a = self.coeffs[i];
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            let row = &tab[i * n..(i + 1) * n];
            for j in 0..n {
                if let Some(p) = row[j] {
                    let b = other.coeffs[j];
                    if b.re != 0.0 || b.im != 0.0 {
                        coeffs[p as usize] += a * b;
                    }
                }
            }
        }
        Ok(Jet { table: self.table.clone(), coeffs, real: self.real && other.real })
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, k: u32) -> Jet {
        let mut acc = Jet::constant(self.shape(), C::new(1.0, 0.0));
        for _ in 0..k {
            acc = acc.checked_mul(self).unwrap();
        }
        acc
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    ///
    /// Computed from the Neumann series of the nilpotent part, which
    /// terminates at order + t_order.
    pub fn inverse(&self) -> Result<Jet> {
        let c = self.c0();
        if c.norm() == 0.0 {
            return Err(JetError::SingularInput("inverse of jet with zero constant term".into()));
        }
        let shape = self.shape();
        let one = Jet::constant(shape, C::new(1.0, 0.0));
        let u = self.scale(C::new(1.0, 0.0) / c).checked_sub(&one)?;
        let nil = shape.order + shape.t_order;
        let mut acc = one.clone();
        let mut pow = one;
        for _ in 0..nil {
            pow = pow.checked_mul(&u)?.neg();
            acc = acc.checked_add(&pow)?;
        }
        let mut out = acc.scale(C::new(1.0, 0.0) / c);
        out.real = self.real;
        Ok(out)
    }

    pub fn checked_div(&self, other: &Jet) -> Result<Jet> {
        self.checked_mul(&other.inverse()?)
    }

    /// Exponential: exp(c)·Σ uᵏ/k! over the nilpotent part u.
    pub fn exp(&self) -> Jet {
        let shape = self.shape();
        let c = self.c0();
        let u = self.checked_sub(&Jet::constant(shape, c)).unwrap();
        let nil = shape.order + shape.t_order;
        let mut acc = Jet::constant(shape, C::new(1.0, 0.0));
        let mut pow = Jet::constant(shape, C::new(1.0, 0.0));
        let mut fact = 1.0f64;
        for k in 1..=nil {
            pow = pow.checked_mul(&u).unwrap();
            fact *= k as f64;
            acc = acc.checked_add(&pow.scale(C::new(1.0 / fact, 0.0))).unwrap();
        }
        let mut out = acc.scale(c.exp());
        out.real = self.real;
        out
    }

    /// Principal-branch logarithm; requires a nonzero constant term.
    pub fn log(&self) -> Result<Jet> {
        let c = self.c0();
        if c.norm() == 0.0 {
            return Err(JetError::SingularInput("log of jet with zero constant term".into()));
        }
        let shape = self.shape();
        let one = Jet::constant(shape, C::new(1.0, 0.0));
        let u = self.scale(C::new(1.0, 0.0) / c).checked_sub(&one)?;
        let nil = shape.order + shape.t_order;
        let mut acc = Jet::constant(shape, c.ln());
        let mut pow = one;
        for k in 1..=nil {
            pow = pow.checked_mul(&u)?;
            let s = if k % 2 == 1 { 1.0 } else { -1.0 };
            acc = acc.checked_add(&pow.scale(C::new(s / k as f64, 0.0)))?;
        }
        let mut out = acc;
        out.real = self.real && c.im == 0.0 && c.re > 0.0;
        Ok(out)
    }

    /// Complex conjugate: swaps z and z̄ exponents and conjugates coefficients.
    pub fn conj(&self) -> Jet {
        let perm = &self.table.conj_perm;
        let mut coeffs = vec![C::new(0.0, 0.0); self.coeffs.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[perm[i] as usize] = c.conj();
        }
        Jet { table: self.table.clone(), coeffs, real: self.real }
    }

    /// Formal partial derivative; lowers the matching truncation degree by 1.
    pub fn partial(&self, var: Var) -> Result<Jet> {
        let shape = self.shape();
        let nvars = 2 * shape.m + 1;
        let (slot, new_shape) = match var {
            Var::Z(i) => {
                assert!(i < shape.m);
                if shape.order == 0 {
                    return Err(JetError::DegreeTooLow("z-derivative of an order-0 jet".into()));
                }
                (i, JetShape { order: shape.order - 1, ..shape })
            }
            Var::Zbar(i) => {
                assert!(i < shape.m);
                if shape.order == 0 {
                    return Err(JetError::DegreeTooLow("z̄-derivative of an order-0 jet".into()));
                }
                (shape.m + i, JetShape { order: shape.order - 1, ..shape })
            }
            Var::T => {
                if shape.t_order == 0 {
                    return Err(JetError::DegreeTooLow("t-derivative of a t-order-0 jet".into()));
                }
                (nvars - 1, JetShape { t_order: shape.t_order - 1, ..shape })
            }
        };
        let mut out = Jet::zeros(new_shape);
        out.real = false;
        let mut exps = vec![0u8; nvars];
        for (p, ix) in out.table.indices.iter().enumerate() {
            exps.copy_from_slice(ix);
            exps[slot] += 1;
            if let Some(src) = self.table.position(&exps) {
                out.coeffs[p] = self.coeffs[src] * C::new(exps[slot] as f64, 0.0);
            }
        }
        Ok(out)
    }

    /// Copy of this jet truncated to lower degrees.
    pub fn truncate(&self, order: u32, t_order: u32) -> Result<Jet> {
        let shape = self.shape();
        if order > shape.order || t_order > shape.t_order {
            return Err(JetError::DegreeTooLow(format!(
                "cannot truncate {} to (order={order}, t_order={t_order})",
                shape
            )));
        }
        if order == shape.order && t_order == shape.t_order {
            return Ok(self.clone());
        }
        let mut out = Jet::zeros(JetShape { order, t_order, ..shape });
        out.real = self.real;
        for (p, ix) in out.table.indices.iter().enumerate() {
            out.coeffs[p] = self.coeffs[self.table.position(ix).unwrap()];
        }
        Ok(out)
    }

    /// Largest coefficient magnitude.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient difference; errors on shape mismatch.
    pub fn max_diff(&self, other: &Jet) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                self.$checked(rhs).expect("jet shape mismatch")
            }
        }
    };
}

jet_binop!(Add, add, checked_add);
jet_binop!(Sub, sub, checked_sub);
jet_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{rng_for, uniform_disc_jet};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn mul_polynomial_identity() {
        // (1 + z)(1 - z) = 1 - z² at order 2.
        let shape = JetShape::new(1, 2, 0);
        let one = Jet::constant(shape, c(1.0, 0.0));
        let z = Jet::variable(shape, Var::Z(0));
        let prod = &(&one + &z) * &(&one - &z);
        let mut expect = one.clone();
        expect.set_coeff(&[2, 0, 0], c(-1.0, 0.0));
        assert_eq!(prod.max_diff(&expect).unwrap(), 0.0);
    }

    #[test]
    fn log_exp_roundtrip() {
        let shape = JetShape::new(2, 3, 1);
        let mut rng = rng_for("jets.logexp", 7);
        for _ in 0..20 {
            let mut j = uniform_disc_jet(&mut rng, shape, 1.0);
            j.coeffs_mut()[0] = c(0.0, 0.0);
            let back = j.exp().log().unwrap();
            assert!(back.max_diff(&j).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn conj_swaps_exponents() {
        // conj(q · z¹ z̄²) = conj(q) · z̄¹ z² for m = 2.
        let shape = JetShape::new(2, 2, 0);
        let mut j = Jet::zeros(shape);
        j.set_coeff(&[1, 0, 0, 1, 0], c(2.0, 3.0));
        let cj = j.conj();
        assert_eq!(cj.coeff(&[0, 1, 1, 0, 0]), c(2.0, -3.0));
        assert_eq!(cj.coeff(&[1, 0, 0, 1, 0]), c(0.0, 0.0));
    }

    #[test]
    fn conj_is_involution_and_fixes_real_jets() {
        let shape = JetShape::new(3, 3, 1);
        let mut rng = rng_for("jets.conj", 1);
        for _ in 0..20 {
            let j = uniform_disc_jet(&mut rng, shape, 1.0);
            assert_eq!(j.conj().conj(), j);
            let r = j.realified();
            assert_eq!(r.conj(), r);
            assert!(r.is_real());
            assert!(r.real_symmetry_holds(0.0));
        }
    }

    #[test]
    fn partial_basic_and_geometric_series() {
        // ∂_{z¹}(z¹ z̄¹) = z̄¹.
        let shape = JetShape::new(1, 2, 0);
        let z = Jet::variable(shape, Var::Z(0));
        let zb = Jet::variable(shape, Var::Zbar(0));
        let d = (&z * &zb).partial(Var::Z(0)).unwrap();
        assert_eq!(d, zb.truncate(1, 0).unwrap());

        // ∂_z̄ ∂_z log(1 + z z̄) = 1 - 2 z z̄ + 3 z²z̄² - … (alternating
        // geometric-series derivative, from expanding log(1+x) by hand).
        let shape = JetShape::new(1, 6, 0);
        let z = Jet::variable(shape, Var::Z(0));
        let zb = Jet::variable(shape, Var::Zbar(0));
        let one = Jet::constant(shape, c(1.0, 0.0));
        let k = (&one + &(&z * &zb)).log().unwrap();
        let g = k.partial(Var::Z(0)).unwrap().partial(Var::Zbar(0)).unwrap();
        assert!((g.coeff(&[0, 0, 0]) - c(1.0, 0.0)).norm() < 1e-14);
        assert!((g.coeff(&[1, 1, 0]) - c(-2.0, 0.0)).norm() < 1e-14);
        assert!((g.coeff(&[2, 2, 0]) - c(3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn mixed_partials_commute_exactly() {
        let shape = JetShape::new(3, 4, 0);
        let mut rng = rng_for("jets.mixed", 3);
        for _ in 0..100 {
            let j = uniform_disc_jet(&mut rng, shape, 1.0);
            for (u, v) in [(Var::Z(0), Var::Zbar(2)), (Var::Z(1), Var::Z(2)), (Var::Zbar(0), Var::Zbar(1))] {
                let a = j.partial(u).unwrap().partial(v).unwrap();
                let b = j.partial(v).unwrap().partial(u).unwrap();
                assert_eq!(a.max_diff(&b).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn ring_axioms_exact() {
        // Associativity and distributivity on stored coefficients must be
        // exact (coefficient-wise identical up to IEEE non-associativity of
        // the identical summation order, which these evaluation orders share).
        for order in [2u32, 3, 4] {
            for m in [1usize, 2, 3] {
                let shape = JetShape::new(m, order, 0);
                let mut rng = rng_for("jets.ring", (order as u64) * 10 + m as u64);
                for _ in 0..200 {
                    let a = uniform_disc_jet(&mut rng, shape, 1.0);
                    let b = uniform_disc_jet(&mut rng, shape, 1.0);
                    let cjet = uniform_disc_jet(&mut rng, shape, 1.0);
                    let ab_c = (&a + &b).checked_add(&cjet).unwrap();
                    let a_bc = a.checked_add(&(&b + &cjet)).unwrap();
                    assert!(ab_c.max_diff(&a_bc).unwrap() <= 1e-15);
                    // (a + b)·c = a·c + b·c with residual 0 up to one rounding
                    // of each coefficient product.
                    let lhs = (&a + &b).checked_mul(&cjet).unwrap();
                    let rhs = (&a * &cjet).checked_add(&(&b * &cjet)).unwrap();
                    assert!(lhs.max_diff(&rhs).unwrap() <= 1e-14);
                    // Commutativity is exact.
                    assert_eq!(&a * &b, &b * &a);
                }
            }
        }
    }

    #[test]
    fn leibniz_rule_exact() {
        let shape = JetShape::new(2, 3, 0);
        let mut rng = rng_for("jets.leibniz", 11);
        for _ in 0..50 {
            let a = uniform_disc_jet(&mut rng, shape, 1.0);
            let b = uniform_disc_jet(&mut rng, shape, 1.0);
            for v in [Var::Z(0), Var::Zbar(1)] {
                let d_ab = (&a * &b).partial(v).unwrap();
                let da_b = &a.partial(v).unwrap() * &b.truncate(shape.order - 1, 0).unwrap();
                let a_db = &a.truncate(shape.order - 1, 0).unwrap() * &b.partial(v).unwrap();
                assert!(d_ab.max_diff(&(&da_b + &a_db)).unwrap() <= 1e-14);
            }
        }
    }

    #[test]
    fn shape_mixing_is_rejected() {
        let a = Jet::zeros(JetShape::new(2, 3, 0));
        let b = Jet::zeros(JetShape::new(2, 2, 0));
        assert!(matches!(a.checked_add(&b), Err(JetError::ShapeMismatch { .. })));
        let t = Jet::zeros(JetShape::new(2, 3, 1));
        assert!(matches!(a.checked_mul(&t), Err(JetError::ShapeMismatch { .. })));
    }

    #[test]
    fn singular_inputs_are_rejected() {
        let shape = JetShape::new(1, 2, 0);
        let z = Jet::variable(shape, Var::Z(0));
        assert!(matches!(z.inverse(), Err(JetError::SingularInput(_))));
        assert!(matches!(z.log(), Err(JetError::SingularInput(_))));
        let o0 = Jet::zeros(JetShape::new(1, 0, 0));
        assert!(matches!(o0.partial(Var::Z(0)), Err(JetError::DegreeTooLow(_))));
    }

    #[test]
    fn t_variable_has_independent_truncation() {
        let shape = JetShape::new(1, 2, 1);
        let t = Jet::variable(shape, Var::T);
        // t² truncates away while z²·t⁰ survives.
        assert_eq!((&t * &t).norm_inf(), 0.0);
        let z = Jet::variable(shape, Var::Z(0));
        assert!((&z * &z).norm_inf() > 0.0);
        let dt = (&z * &t).partial(Var::T).unwrap();
        assert_eq!(dt.shape().t_order, 0);
        assert_eq!(dt.coeff(&[1, 0, 0]), c(1.0, 0.0));
    }
}
