//! Symmetric powers of matrices and systems, in the group sense (`Sym^m`,
//! linear substitution) and in the Lie-algebra sense (`sym^m`, derivation).
//!
//! Both act on plain monomial coefficients. Solution vectors in the usual
//! printed form, such as `(y^2, 2 y y', y'^2)`, are columns of `Sym^2(X)`;
//! converting monomial *values* `(y^2, y y', y'^2)` into that form multiplies
//! by multinomial weights, see [`MonomialBasis::weights`].

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linsys::{LinearSystem, SecondOrderFamily};
use crate::matrix::Matrix;
use crate::symexpr::{DerivationTable, Expr};

/// Degree-`m` monomials in `n` variables, ordered
/// `X1^m, X1^(m-1) X2, ..., Xn^m` (lexicographically decreasing exponents).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    n: usize,
    m: usize,
    exps: Vec<Vec<u32>>,
}

impl MonomialBasis {
    pub fn new(n: usize, m: usize) -> MonomialBasis {
        let mut exps = Vec::new();
        let mut cur = vec![0u32; n];
        fill(&mut exps, &mut cur, 0, m as u32);
        MonomialBasis { n, m, exps }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exps
    }

    pub fn index_of(&self, e: &[u32]) -> Option<usize> {
        self.exps.iter().position(|v| v == e)
    }

    /// Multinomial coefficients `m! / prod(e_i!)`, e.g. `(1, 2, 1)` for `n = m = 2`.
    pub fn weights(&self) -> Vec<i64> {
        let fact = |k: u32| (1..=k as i64).product::<i64>();
        self.exps
            .iter()
            .map(|e| fact(self.m as u32) / e.iter().map(|k| fact(*k)).product::<i64>())
            .collect()
    }

    /// Monomial values of a vector `v`, e.g. `(v1^2, v1 v2, v2^2)`.
    pub fn monomials_of(&self, v: &[Expr]) -> Vec<Expr> {
        self.exps
            .iter()
            .map(|e| e.iter().zip(v).map(|(k, x)| x.pow(*k as i64)).product())
            .collect()
    }

    /// Monomial values to weighted solution-vector form.
    pub fn to_weighted(&self, values: &[Expr]) -> Vec<Expr> {
        values.iter().zip(self.weights()).map(|(v, w)| v * w).collect()
    }

    /// Inverse of [`MonomialBasis::to_weighted`].
    pub fn from_weighted(&self, vector: &[Expr]) -> Vec<Expr> {
        vector
            .iter()
            .zip(self.weights())
            .map(|(v, w)| v / Expr::int(w))
            .collect()
    }
}

fn fill(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, i: usize, left: u32) {
    if i + 1 == cur.len() {
        cur[i] = left;
        out.push(cur.clone());
        return;
    }
    if cur.is_empty() {
        return;
    }
    for k in (0..=left).rev() {
        cur[i] = k;
        fill(out, cur, i + 1, left - k);
    }
    cur[i] = 0;
}

/// Polynomial in `X1..Xn` with expression coefficients.
type VPoly = BTreeMap<Vec<u32>, Expr>;

fn vmul(a: &VPoly, b: &VPoly) -> VPoly {
    let mut out = VPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let c = ca * cb;
            let slot = out.entry(e).or_insert_with(Expr::zero);
            *slot = &*slot + &c;
        }
    }
    out
}

fn check_square(m: &Matrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "symmetric power of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// `X_j -> sum_i M_ij X_i` as a linear form.
fn column_form(mat: &Matrix, j: usize) -> VPoly {
    let n = mat.rows();
    let mut f = VPoly::new();
    for i in 0..n {
        if !mat.get(i, j).is_zero() {
            let mut e = vec![0; n];
            e[i] = 1;
            f.insert(e, mat.get(i, j).clone());
        }
    }
    f
}

fn to_matrix(basis: &MonomialBasis, cols: Vec<VPoly>) -> Result<Matrix> {
    let k = basis.len();
    let mut out = Matrix::zeros(k, k);
    for (j, poly) in cols.into_iter().enumerate() {
        for (e, c) in poly {
            if c.is_zero() {
                continue;
            }
            let i = basis.index_of(&e).expect("homogeneous of the basis degree");
            out.set(i, j, c)?;
        }
    }
    Ok(out)
}

/// `Sym^m(M)`: column `j` holds the coefficients of `P_j(M X)` where `P_j`
/// is the `j`-th basis monomial and `X_j -> sum_i M_ij X_i`.
pub fn sym_group(mat: &Matrix, m: usize) -> Result<Matrix> {
    check_square(mat)?;
    let basis = MonomialBasis::new(mat.rows(), m);
    let forms: Vec<VPoly> = (0..mat.rows()).map(|j| column_form(mat, j)).collect();
    let mut cols = Vec::with_capacity(basis.len());
    for e in basis.exponents() {
        let mut acc: VPoly = [(vec![0; mat.rows()], Expr::one())].into_iter().collect();
        for (j, k) in e.iter().enumerate() {
            for _ in 0..*k {
                acc = vmul(&acc, &forms[j]);
            }
        }
        cols.push(acc);
    }
    to_matrix(&basis, cols)
}

/// `sym^m(M)`: column `j` holds the coefficients of `D_M(P_j)` with
/// `D_M = sum_j (sum_i M_ij X_i) d/dX_j`.
pub fn sym_lie(mat: &Matrix, m: usize) -> Result<Matrix> {
    check_square(mat)?;
    let n = mat.rows();
    let basis = MonomialBasis::new(n, m);
    let forms: Vec<VPoly> = (0..n).map(|j| column_form(mat, j)).collect();
    let mut cols = Vec::with_capacity(basis.len());
    for e in basis.exponents() {
        let mut acc = VPoly::new();
        for j in 0..n {
            if e[j] == 0 {
                continue;
            }
            let mut lowered = e.clone();
            lowered[j] -= 1;
            let partial: VPoly = [(lowered, Expr::int(e[j] as i64))].into_iter().collect();
            for (k, c) in vmul(&partial, &forms[j]) {
                let slot = acc.entry(k).or_insert_with(Expr::zero);
                *slot = &*slot + &c;
            }
        }
        cols.push(acc);
    }
    to_matrix(&basis, cols)
}

/// Coefficients `(a2, a1, a0)` of `d^3 + a2 d^2 + a1 d + a0`, the second
/// symmetric power of `d^2 + p d + q`.
pub fn sym2_operator_coeffs(p: &Expr, q: &Expr, table: &DerivationTable) -> Result<(Expr, Expr, Expr)> {
    let dp = p.diff(table)?;
    let dq = q.diff(table)?;
    let a2 = p * 3;
    let a1 = q * 4 + dp + p.pow(2) * 2;
    let a0 = (dq + p * q * 2) * 2;
    Ok((a2, a1, a0))
}

/// Second symmetric power of the family operator, with `q - m r` in place of `q`.
pub fn sym2_operator(f: &SecondOrderFamily) -> Result<(Expr, Expr, Expr)> {
    sym2_operator_coeffs(f.p(), &f.potential(), f.table())
}

/// The system solved by `Sym^m` of solution matrices: `A -> sym^m(A)`.
pub fn sym_system(system: &LinearSystem, m: usize) -> Result<LinearSystem> {
    let a = sym_lie(system.matrix(), m)?;
    Ok(LinearSystem::new(a, system.table().clone())?
        .with_note(format!("symmetric power of degree {m}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linsys::companion;
    use crate::mat;

    fn syms(names: &[&str]) -> DerivationTable {
        names.iter().fold(DerivationTable::new(), |t, n| t.with_free(n))
    }

    #[test]
    fn basis_order_and_weights() {
        let b = MonomialBasis::new(2, 2);
        assert_eq!(b.exponents(), &[vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(b.weights(), vec![1, 2, 1]);
        assert_eq!(MonomialBasis::new(3, 2).len(), 6);
        let y = vec![Expr::sym("y"), Expr::jet("y", 1)];
        let v = b.to_weighted(&b.monomials_of(&y));
        assert_eq!(v[1], Expr::sym("y") * Expr::jet("y", 1) * 2);
    }

    #[test]
    fn group_power_by_substitution() {
        let (a, b, c, d) = (Expr::sym("a"), Expr::sym("b"), Expr::sym("c"), Expr::sym("d"));
        let m = mat![[a.clone(), b.clone()], [c.clone(), d.clone()]];
        let s = sym_group(&m, 2).unwrap();
        let want = mat![
            [a.pow(2), &a * &b, b.pow(2)],
            [&a * &c * 2, &a * &d + &b * &c, &b * &d * 2],
            [c.pow(2), &c * &d, d.pow(2)]
        ];
        assert!(s.equiv(&want));
        assert!(sym_group(&Matrix::identity(2), 2).unwrap().equiv(&Matrix::identity(3)));
    }

    #[test]
    fn lie_power_of_companion() {
        let (p, q) = (Expr::sym("p"), Expr::sym("q"));
        let a0 = mat![[0, -1], [q.clone(), p.clone()]];
        let s = sym_lie(&a0, 2).unwrap();
        let want = mat![[0, -1, 0], [&q * 2, p.clone(), Expr::int(-2)], [Expr::zero(), q, &p * 2]];
        assert!(s.equiv(&want));
        assert!(sym_lie(&Matrix::zeros(2, 2), 2).unwrap().is_zero());
    }

    #[test]
    fn lie_power_of_traceless_form() {
        let (w, q) = (Expr::sym("w"), Expr::sym("q"));
        let b0 = mat![[Expr::zero(), -w.inv()], [&w * &q, Expr::zero()]];
        let s = sym_lie(&b0, 2).unwrap();
        let want = mat![
            [Expr::zero(), -w.inv(), Expr::zero()],
            [&w * &q * 2, Expr::zero(), w.inv() * -2],
            [Expr::zero(), &w * &q, Expr::zero()]
        ];
        assert!(s.equiv(&want));
    }

    #[test]
    fn lifted_companion_perturbation() {
        let t = syms(&["p", "q", "r"]);
        let f = crate::linsys::SecondOrderFamily::with_p(
            Expr::zero(),
            Expr::sym("q"),
            Expr::sym("r"),
            Expr::one(),
            "m",
            t,
        )
        .unwrap();
        let s = sym_system(&companion(&f), 2).unwrap();
        let parts = s.coefficients_in("m").unwrap();
        let r = Expr::sym("r");
        let n2 = mat![[0, 0, 0], [&r * -2, Expr::zero(), Expr::zero()], [Expr::zero(), -&r, Expr::zero()]];
        assert!(parts[1].equiv(&n2));
    }

    #[test]
    fn sym2_of_fundamental_matrix_solves_lifted_system() {
        let t = syms(&["p", "q", "r"]).with_ode("w", 1, &(Expr::sym("p") * Expr::sym("w"))).unwrap();
        let f = SecondOrderFamily::new(Expr::sym("w"), Expr::sym("q"), Expr::sym("r"), "m", t).unwrap();
        let (x, table) = f.fundamental("y1", "y2").unwrap();
        let y = sym_group(&x, 2).unwrap();
        let s = sym_system(&companion(&f), 2).unwrap();
        assert!(s.residual_in(&y, &table).unwrap().is_zero());
    }

    #[test]
    fn third_order_operator() {
        let t = syms(&["q"]);
        let (a2, a1, a0) = sym2_operator_coeffs(&Expr::zero(), &Expr::sym("q"), &t).unwrap();
        assert!(a2.is_zero());
        assert_eq!(a1, Expr::sym("q") * 4);
        assert_eq!(a0, Expr::jet("q", 1) * 2);
    }

    #[test]
    fn square_of_solution_solves_third_order_equation() {
        // w = x, q = 1: y'' + y'/x + (1 - m) y = 0
        let x = Expr::x();
        let f = SecondOrderFamily::new(x.clone(), Expr::one(), Expr::one(), "m", DerivationTable::new())
            .unwrap();
        let (a2, a1, a0) = sym2_operator(&f).unwrap();
        let m = Expr::param("m");
        assert_eq!(a2, x.inv() * 3);
        assert_eq!(a1, (1 - &m) * 4 - x.pow(-2) + x.pow(-2) * 2);
        assert_eq!(a0, (1 - &m) * x.inv() * 4);
        let table = f.solution_table(&["y1"]).unwrap();
        let y = Expr::sym("y1").pow(2);
        let d1 = y.diff(&table).unwrap();
        let d2 = d1.diff(&table).unwrap();
        let d3 = d2.diff(&table).unwrap();
        assert!((d3 + a2 * d2 + a1 * d1 + a0 * y).is_zero());
    }
}
