//! Dense matrices of normalized expressions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symexpr::{Bindings, DerivationTable, Expr, RatFn};

/// Row-major matrix whose entries are always in canonical form.
///
/// Arithmetic operators panic on shape mismatch, like most linear algebra
/// crates; the `checked_*` methods return errors instead.
#[derive(Clone)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Expr>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Expr>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let data = data.iter().map(|e| e.normalize()).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Expr>>) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map(|v| v.len()).unwrap_or(0);
        if rows.iter().any(|v| v.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Matrix::new(r, c, rows.into_iter().flatten().collect())
    }

    fn raw(rows: usize, cols: usize, data: Vec<RatFn>) -> Matrix {
        Matrix { rows, cols, data: data.into_iter().map(Expr::normal).collect() }
    }

    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix::raw(rows, cols, vec![RatFn::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Expr::one();
        }
        m
    }

    pub fn diag(entries: Vec<Expr>) -> Result<Matrix> {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m.data[i * n + i] = e.normalize()?;
        }
        Ok(m)
    }

    pub fn column(entries: Vec<Expr>) -> Result<Matrix> {
        let n = entries.len();
        Matrix::new(n, 1, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: Expr) -> Result<()> {
        self.data[i * self.cols + j] = e.normalize()?;
        Ok(())
    }

    pub fn entries(&self) -> &[Expr] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Expr] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Expr> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Expr>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    fn rf(&self, i: usize, j: usize) -> &RatFn {
        self.data[i * self.cols + j].as_ratfn().expect("matrix entries are normalized")
    }

    pub fn checked_mul(&self, o: &Matrix) -> Result<Matrix> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Vec::with_capacity(self.rows * o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = RatFn::zero();
                for k in 0..self.cols {
                    let (a, b) = (self.rf(i, k), o.rf(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                out.push(acc);
            }
        }
        Ok(Matrix::raw(self.rows, o.cols, out))
    }

    fn zip(&self, o: &Matrix, f: impl Fn(&RatFn, &RatFn) -> RatFn) -> Result<Matrix> {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} versus {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let data = (0..self.data.len())
            .map(|k| {
                f(
                    self.data[k].as_ratfn().unwrap(),
                    o.data[k].as_ratfn().unwrap(),
                )
            })
            .collect();
        Ok(Matrix::raw(self.rows, self.cols, data))
    }

    pub fn checked_add(&self, o: &Matrix) -> Result<Matrix> {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn checked_sub(&self, o: &Matrix) -> Result<Matrix> {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn scale(&self, k: &Expr) -> Result<Matrix> {
        let k = k.to_ratfn()?;
        Ok(self.map_rf(|a| a.mul(&k)))
    }

    fn map_rf(&self, f: impl Fn(&RatFn) -> RatFn) -> Matrix {
        Matrix::raw(
            self.rows,
            self.cols,
            self.data.iter().map(|e| f(e.as_ratfn().unwrap())).collect(),
        )
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Result<Expr>) -> Result<Matrix> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>>>()?;
        Matrix::new(self.rows, self.cols, data)
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn trace(&self) -> Expr {
        let mut acc = RatFn::zero();
        for i in 0..self.rows.min(self.cols) {
            acc = acc.add(self.rf(i, i));
        }
        Expr::normal(acc)
    }

    fn det_rf(&self) -> RatFn {
        let n = self.rows;
        match n {
            0 => RatFn::one(),
            1 => self.rf(0, 0).clone(),
            2 => self.rf(0, 0).mul(self.rf(1, 1)).sub(&self.rf(0, 1).mul(self.rf(1, 0))),
            _ => {
                let mut acc = RatFn::zero();
                for j in 0..n {
                    let a = self.rf(0, j);
                    if a.is_zero() {
                        continue;
                    }
                    let minor = self.minor(0, j).det_rf();
                    let t = a.mul(&minor);
                    acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
                }
                acc
            }
        }
    }

    fn minor(&self, r: usize, c: usize) -> Matrix {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != r && j != c {
                    data.push(self.get(i, j).clone());
                }
            }
        }
        Matrix { rows: self.rows - 1, cols: self.cols - 1, data }
    }

    /// Determinant by cofactor expansion (sizes here are at most 4).
    pub fn det(&self) -> Result<Expr> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        Ok(Expr::normal(self.det_rf()))
    }

    /// Exact inverse through the adjugate.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let d = self.det_rf();
        if d.is_zero() {
            return Err(Error::SingularGauge);
        }
        let dinv = d.inv()?;
        let n = self.rows;
        if n == 1 {
            return Ok(Matrix::raw(1, 1, vec![dinv]));
        }
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                // adj[i][j] = (-1)^(i+j) det(minor(j, i))
                let c = self.minor(j, i).det_rf();
                let c = if (i + j) % 2 == 0 { c } else { c.neg() };
                data.push(c.mul(&dinv));
            }
        }
        Ok(Matrix::raw(n, n, data))
    }

    pub fn diff(&self, table: &DerivationTable) -> Result<Matrix> {
        let data = self
            .data
            .iter()
            .map(|e| table.derive(e.as_ratfn().unwrap()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::raw(self.rows, self.cols, data))
    }

    /// Rewrite jets at or above their ODE order through `table`.
    pub fn reduce(&self, table: &DerivationTable) -> Result<Matrix> {
        let data = self
            .data
            .iter()
            .map(|e| table.reduce(e.as_ratfn().unwrap()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::raw(self.rows, self.cols, data))
    }

    pub fn subs(&self, map: &[(&str, Expr)]) -> Result<Matrix> {
        self.map(|e| e.subs(map))
    }

    pub fn subs_with(&self, map: &[(&str, Expr)], table: &DerivationTable) -> Result<Matrix> {
        self.map(|e| e.subs_with(map, table))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.as_ratfn().unwrap().is_zero())
    }

    /// Exact entrywise equality.
    pub fn equiv(&self, o: &Matrix) -> bool {
        (self.rows, self.cols) == (o.rows, o.cols)
            && self
                .data
                .iter()
                .zip(&o.data)
                .all(|(a, b)| a.as_ratfn().unwrap().equals(b.as_ratfn().unwrap()))
    }

    /// Positions of entries where two matrices differ.
    pub fn differences(&self, o: &Matrix) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.rows.min(o.rows) {
            for j in 0..self.cols.min(o.cols) {
                if !self.get(i, j).equiv(o.get(i, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn commutator(&self, o: &Matrix) -> Matrix {
        &(self * o) - &(o * self)
    }

    pub fn eval(&self, b: &Bindings) -> Result<Vec<Complex64>> {
        self.data.iter().map(|e| e.eval(b)).collect()
    }

    pub fn to_sexpr_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.to_sexpr()).collect())
            .collect()
    }
}

impl PartialEq for Matrix {
    fn eq(&self, o: &Matrix) -> bool {
        self.equiv(o)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, o: &Matrix) -> Matrix {
        self.checked_mul(o).expect("matrix shapes")
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, o: &Matrix) -> Matrix {
        self.checked_add(o).expect("matrix shapes")
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, o: &Matrix) -> Matrix {
        self.checked_sub(o).expect("matrix shapes")
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.map_rf(|a| a.neg())
    }
}

/// Build a matrix from rows of expressions; panics on ragged input.
#[macro_export]
macro_rules! mat {
    ($([$($e:expr),* $(,)?]),* $(,)?) => {
        $crate::matrix::Matrix::from_rows(vec![$(vec![$($crate::symexpr::Expr::from($e)),*]),*])
            .expect("well-formed matrix literal")
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_symbolic_2x2() {
        let (a, b, c, d) = (Expr::sym("a"), Expr::sym("b"), Expr::sym("c"), Expr::sym("d"));
        let m = mat![[a.clone(), b.clone()], [c.clone(), d.clone()]];
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).equiv(&Matrix::identity(2)));
        assert_eq!(m.det().unwrap(), a * d - b * c);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = mat![[1, 2], [2, 4]];
        assert!(matches!(m.inverse(), Err(Error::SingularGauge)));
    }

    #[test]
    fn three_by_three_determinant() {
        let m = mat![[2, 0, 1], [1, 3, 0], [0, 1, 1]];
        assert_eq!(m.det().unwrap(), Expr::int(7));
        assert!((&m * &m.inverse().unwrap()).equiv(&Matrix::identity(3)));
    }

    #[test]
    fn shape_errors() {
        let a = Matrix::zeros(2, 3);
        assert!(a.checked_mul(&a).is_err());
        assert!(a.det().is_err());
    }
}
