//! Dense matrices with jet entries.
//!
//! Used for metric components, chart Jacobians and their inverses. Inversion
//! factors out the constant-term matrix and sums the terminating Neumann
//! series of the nilpotent remainder, so `M · M⁻¹ = I` holds exactly on
//! stored coefficients whenever the constant term is invertible.

use super::{C, Jet, JetError, JetShape, Result};
use nalgebra::DMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct JetMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Jet>,
}

impl JetMatrix {
    pub fn zeros(shape: JetShape, rows: usize, cols: usize) -> JetMatrix {
        JetMatrix { rows, cols, data: vec![Jet::zeros(shape); rows * cols] }
    }

    pub fn identity(shape: JetShape, n: usize) -> JetMatrix {
        let mut m = JetMatrix::zeros(shape, n, n);
        for i in 0..n {
            m.data[i * n + i] = Jet::constant(shape, C::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Jet) -> JetMatrix {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        let m = JetMatrix { rows, cols, data };
        m.validate();
        m
    }

    fn validate(&self) {
        let shape = self.data[0].shape();
        assert!(
            self.data.iter().all(|j| j.shape() == shape),
            "jet matrix entries must share one shape"
        );
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> JetShape {
        self.data[0].shape()
    }

    pub fn get(&self, r: usize, c: usize) -> &Jet {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, j: Jet) {
        assert_eq!(j.shape(), self.shape(), "jet matrix entries must share one shape");
        self.data[r * self.cols + c] = j;
    }

    pub fn truncate(&self, order: u32, t_order: u32) -> Result<JetMatrix> {
        let mut data = Vec::with_capacity(self.data.len());
        for j in &self.data {
            data.push(j.truncate(order, t_order)?);
        }
        Ok(JetMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn add(&self, other: &JetMatrix) -> Result<JetMatrix> {
        self.check_dims(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<_>>()?;
        Ok(JetMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &JetMatrix) -> Result<JetMatrix> {
        self.check_dims(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.checked_sub(b))
            .collect::<Result<_>>()?;
        Ok(JetMatrix { rows: self.rows, cols: self.cols, data })
    }

    fn check_dims(&self, other: &JetMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(JetError::SizeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn neg(&self) -> JetMatrix {
        JetMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(Jet::neg).collect() }
    }

    pub fn scale(&self, s: C) -> JetMatrix {
        JetMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|j| j.scale(s)).collect(),
        }
    }

    pub fn matmul(&self, other: &JetMatrix) -> Result<JetMatrix> {
        if self.cols != other.rows {
            return Err(JetError::SizeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let shape = self.shape();
        let mut out = JetMatrix::zeros(shape, self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = Jet::zeros(shape);
                for k in 0..self.cols {
                    acc = acc.checked_add(&self.get(r, k).checked_mul(other.get(k, c))?)?;
                }
                out.data[r * other.cols + c] = acc;
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> JetMatrix {
        JetMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    /// Entrywise complex conjugate (no transposition).
    pub fn conj_entries(&self) -> JetMatrix {
        JetMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Jet::conj).collect(),
        }
    }

    pub fn adjoint(&self) -> JetMatrix {
        self.conj_entries().transpose()
    }

    /// Constant terms as a numeric matrix.
    pub fn constant_term(&self) -> DMatrix<C> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c).c0())
    }

    fn square(&self) -> Result<usize> {
        if self.rows != self.cols {
            return Err(JetError::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(self.rows)
    }

    /// Matrix inverse via the terminating Neumann series of M relative to its
    /// constant term; errors if the constant term is singular.
    pub fn inverse(&self) -> Result<JetMatrix> {
        let n = self.square()?;
        let shape = self.shape();
        let c0 = self.constant_term();
        let c0_inv = c0
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| JetError::SingularInput("singular constant-term matrix".into()))?;
        let c0_inv_jets = JetMatrix::from_fn(n, n, |r, c| Jet::constant(shape, c0_inv[(r, c)]));
        // M = C(I + C⁻¹U) with U the non-constant part, so
        // M⁻¹ = Σ (−C⁻¹U)ᵏ · C⁻¹, terminating at order + t_order.
        let u = self.sub(&JetMatrix::from_fn(n, n, |r, c| Jet::constant(shape, c0[(r, c)])))?;
        let v = c0_inv_jets.matmul(&u)?.neg();
        let nil = shape.order + shape.t_order;
        let mut acc = JetMatrix::identity(shape, n);
        let mut pow = JetMatrix::identity(shape, n);
        for _ in 0..nil {
            pow = pow.matmul(&v)?;
            acc = acc.add(&pow)?;
        }
        acc.matmul(&c0_inv_jets)
    }

    /// Determinant. Uses exact Laplace expansion for n ≤ 4 and the
    /// exp-trace-log factorization for larger matrices.
    pub fn det(&self) -> Result<Jet> {
        let n = self.square()?;
        if n <= 4 {
            return Ok(self.det_laplace(&(0..n).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>()));
        }
        let shape = self.shape();
        let c0 = self.constant_term();
        let det_c0 = c0.clone().lu().determinant();
        if det_c0.norm() == 0.0 {
            return Err(JetError::SingularInput(
                "determinant series requires invertible constant term".into(),
            ));
        }
        Ok(self.log_det_series(&c0)?.exp().scale(det_c0))
    }

    /// log det M with the principal branch at the constant term.
    pub fn logdet(&self) -> Result<Jet> {
        let n = self.square()?;
        if n <= 4 {
            return self.det()?.log();
        }
        let c0 = self.constant_term();
        let det_c0 = c0.clone().lu().determinant();
        if det_c0.norm() == 0.0 {
            return Err(JetError::SingularInput("logdet of singular constant term".into()));
        }
        self.log_det_series(&c0)?.checked_add(&Jet::constant(self.shape(), det_c0.ln()))
    }

    /// tr log(I + C⁻¹U) for M = C + U.
    fn log_det_series(&self, c0: &DMatrix<C>) -> Result<Jet> {
        let n = self.rows;
        let shape = self.shape();
        let c0_inv = c0
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| JetError::SingularInput("singular constant-term matrix".into()))?;
        let c0_inv_jets = JetMatrix::from_fn(n, n, |r, c| Jet::constant(shape, c0_inv[(r, c)]));
        let u = self.sub(&JetMatrix::from_fn(n, n, |r, c| Jet::constant(shape, c0[(r, c)])))?;
        let v = c0_inv_jets.matmul(&u)?;
        let nil = shape.order + shape.t_order;
        let mut acc = Jet::zeros(shape);
        let mut pow = JetMatrix::identity(shape, n);
        for k in 1..=nil {
            pow = pow.matmul(&v)?;
            let s = if k % 2 == 1 { 1.0 } else { -1.0 };
            let mut tr = Jet::zeros(shape);
            for i in 0..n {
                tr = tr.checked_add(pow.get(i, i))?;
            }
            acc = acc.checked_add(&tr.scale(C::new(s / k as f64, 0.0)))?;
        }
        Ok(acc)
    }

    fn det_laplace(&self, rows: &[usize], cols: &[usize]) -> Jet {
        let shape = self.shape();
        if rows.len() == 1 {
            return self.get(rows[0], cols[0]).clone();
        }
        let mut acc = Jet::zeros(shape);
        let sub_rows: Vec<usize> = rows[1..].to_vec();
        for (k, &c) in cols.iter().enumerate() {
            let entry = self.get(rows[0], c);
            if entry.norm_inf() == 0.0 {
                continue;
            }
            let sub_cols: Vec<usize> =
                cols.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &cc)| cc).collect();
            let minor = self.det_laplace(&sub_rows, &sub_cols);
            let term = entry.checked_mul(&minor).unwrap();
            acc = if k % 2 == 0 {
                acc.checked_add(&term).unwrap()
            } else {
                acc.checked_sub(&term).unwrap()
            };
        }
        acc
    }
}
