//! Linear differential systems `X' = -A X`, companion forms and gauge
//! transformations.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::symexpr::{DerivationTable, Expr};

/// Sign convention tag carried by every system and its JSON form.
pub const CONVENTION: &str = "Xp=-AX";

/// The system `X' = -A X`.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    a: Matrix,
    table: DerivationTable,
    notes: Vec<String>,
}

impl LinearSystem {
    pub fn new(a: Matrix, table: DerivationTable) -> Result<LinearSystem> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "coefficient matrix is {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        Ok(LinearSystem { a, table, notes: Vec::new() })
    }

    /// Ingest `Y' = M Y`, stored as `A = -M`.
    pub fn from_positive(m: Matrix, table: DerivationTable) -> Result<LinearSystem> {
        let mut s = LinearSystem::new(-&m, table)?;
        s.notes.push("converted from Y' = M Y with A = -M".into());
        Ok(s)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn table(&self) -> &DerivationTable {
        &self.table
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn size(&self) -> usize {
        self.a.rows()
    }

    pub fn with_table(mut self, table: DerivationTable) -> Self {
        self.table = table;
        self
    }

    fn check(&self, p: &GaugeMatrix) -> Result<()> {
        if p.size() != self.size() {
            return Err(Error::DimensionMismatch(format!(
                "gauge of size {} on a system of size {}",
                p.size(),
                self.size()
            )));
        }
        Ok(())
    }

    /// `P[A] = P^-1 A P + P^-1 P'`: the system satisfied by `Y = P^-1 X`.
    pub fn gauge(&self, p: &GaugeMatrix) -> Result<LinearSystem> {
        self.check(p)?;
        let dp = p.p.diff(&self.table)?;
        let a = &(&(&p.inv * &self.a) * &p.p) + &(&p.inv * &dp);
        Ok(LinearSystem { a, table: self.table.clone(), notes: self.notes.clone() })
    }

    /// The system satisfied by `Y = P X`, i.e. `(P^-1)[A] = P A P^-1 - P' P^-1`.
    pub fn gauge_forward(&self, p: &GaugeMatrix) -> Result<LinearSystem> {
        self.check(p)?;
        let dp = p.p.diff(&self.table)?;
        let a = &(&(&p.p * &self.a) * &p.inv) - &(&dp * &p.inv);
        Ok(LinearSystem { a, table: self.table.clone(), notes: self.notes.clone() })
    }

    /// `candidate' + A candidate`; zero certifies a solution matrix.
    pub fn residual(&self, candidate: &Matrix) -> Result<Matrix> {
        self.residual_in(candidate, &self.table)
    }

    /// Residual using a richer table (for example one that adds ODE rules for
    /// solution symbols).
    pub fn residual_in(&self, candidate: &Matrix, table: &DerivationTable) -> Result<Matrix> {
        let d = candidate.diff(table)?;
        let r = d.checked_add(&self.a.checked_mul(candidate)?)?;
        r.reduce(table)
    }

    /// Coefficient matrices of `param^k` in `A`.
    pub fn coefficients_in(&self, param: &str) -> Result<Vec<Matrix>> {
        matrix_coefficients(&self.a, param)
    }
}

/// Split a matrix polynomial in `param` into coefficient matrices.
pub fn matrix_coefficients(a: &Matrix, param: &str) -> Result<Vec<Matrix>> {
    let mut cols: Vec<Vec<Expr>> = Vec::new();
    for e in a.entries() {
        let c = e
            .coefficients_in(param)?
            .ok_or_else(|| Error::Input(format!("entry {e} is not polynomial in {param}")))?;
        cols.push(c);
    }
    let deg = cols.iter().map(|c| c.len()).max().unwrap_or(1);
    (0..deg)
        .map(|k| {
            let data = cols.iter().map(|c| c.get(k).cloned().unwrap_or_else(Expr::zero)).collect();
            Matrix::new(a.rows(), a.cols(), data)
        })
        .collect()
}

/// An invertible matrix with its exact inverse.
#[derive(Clone, Debug)]
pub struct GaugeMatrix {
    p: Matrix,
    inv: Matrix,
}

impl GaugeMatrix {
    pub fn new(p: Matrix) -> Result<GaugeMatrix> {
        let inv = p.inverse()?;
        Ok(GaugeMatrix { p, inv })
    }

    pub fn identity(n: usize) -> GaugeMatrix {
        GaugeMatrix { p: Matrix::identity(n), inv: Matrix::identity(n) }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.p
    }

    pub fn inverse(&self) -> &Matrix {
        &self.inv
    }

    pub fn size(&self) -> usize {
        self.p.rows()
    }

    pub fn inverted(&self) -> GaugeMatrix {
        GaugeMatrix { p: self.inv.clone(), inv: self.p.clone() }
    }

    /// `self * other`, so that `(P R)[A] = R[P[A]]`.
    pub fn compose(&self, other: &GaugeMatrix) -> GaugeMatrix {
        GaugeMatrix { p: &self.p * &other.p, inv: &other.inv * &self.inv }
    }

    pub fn det(&self) -> Expr {
        self.p.det().expect("gauge matrices are square")
    }
}

/// `L_m = d^2 + p d + (q - m r)` with `p = w'/w`.
#[derive(Clone, Debug)]
pub struct SecondOrderFamily {
    p: Expr,
    q: Expr,
    r: Expr,
    w: Expr,
    param: String,
    table: DerivationTable,
}

impl SecondOrderFamily {
    /// Build from the Wronskian datum `w`; `p` is computed as `w'/w`.
    pub fn new(w: Expr, q: Expr, r: Expr, param: &str, table: DerivationTable) -> Result<Self> {
        let w = w.normalize()?;
        if w.is_zero() {
            return Err(Error::InvalidFamily("w must be nonzero".into()));
        }
        let p = (w.diff(&table)? / w.clone()).normalize()?;
        SecondOrderFamily::with_p(p, q, r, w, param, table)
    }

    /// Build with an explicit `p`, checking `p = w'/w`.
    pub fn with_p(
        p: Expr,
        q: Expr,
        r: Expr,
        w: Expr,
        param: &str,
        table: DerivationTable,
    ) -> Result<Self> {
        let (p, q, r, w) = (p.normalize()?, q.normalize()?, r.normalize()?, w.normalize()?);
        if r.is_zero() {
            return Err(Error::InvalidFamily("r must be nonzero".into()));
        }
        if w.is_zero() {
            return Err(Error::InvalidFamily("w must be nonzero".into()));
        }
        let dw = w.diff(&table)?;
        if !(dw - &p * &w).is_zero() {
            return Err(Error::InvalidFamily(format!("p = {p} is not w'/w for w = {w}")));
        }
        for e in [&p, &q, &r] {
            e.diff(&table)?;
        }
        Ok(SecondOrderFamily { p, q, r, w, param: param.to_string(), table })
    }

    /// `p = 0, w = 1`.
    pub fn normal_form(q: Expr, r: Expr, param: &str, table: DerivationTable) -> Result<Self> {
        SecondOrderFamily::with_p(Expr::zero(), q, r, Expr::one(), param, table)
    }

    pub fn p(&self) -> &Expr {
        &self.p
    }

    pub fn q(&self) -> &Expr {
        &self.q
    }

    pub fn r(&self) -> &Expr {
        &self.r
    }

    pub fn w(&self) -> &Expr {
        &self.w
    }

    pub fn param(&self) -> &str {
        &self.param
    }

    pub fn m(&self) -> Expr {
        Expr::param(&self.param)
    }

    pub fn table(&self) -> &DerivationTable {
        &self.table
    }

    /// Same family with a different `q`.
    pub fn with_q(&self, q: Expr) -> Result<Self> {
        let mut f = self.clone();
        f.q = q.normalize()?;
        f.q.diff(&f.table)?;
        Ok(f)
    }

    pub fn with_table(&self, table: DerivationTable) -> Self {
        let mut f = self.clone();
        f.table = table;
        f
    }

    /// Zeroth-order coefficient `q - m r`.
    pub fn potential(&self) -> Expr {
        &self.q - &self.m() * &self.r
    }

    /// `L_m y` for an expression `y` differentiable under `table`.
    pub fn apply_in(&self, y: &Expr, table: &DerivationTable) -> Result<Expr> {
        let d1 = y.diff(table)?;
        let d2 = d1.diff(table)?;
        let out = d2 + &self.p * &d1 + self.potential() * y;
        Ok(Expr::normal(table.reduce(&out.to_ratfn()?)?))
    }

    pub fn apply(&self, y: &Expr) -> Result<Expr> {
        self.apply_in(y, &self.table)
    }

    /// Family table extended with `y'' = -p y' - (q - m r) y` for each name.
    pub fn solution_table(&self, names: &[&str]) -> Result<DerivationTable> {
        let mut t = self.table.clone();
        for n in names {
            let y = Expr::sym(n);
            let rhs = -(&self.p * Expr::jet(n, 1)) - self.potential() * &y;
            t = t.with_free(n).with_ode(n, 2, &rhs)?;
        }
        Ok(t)
    }

    /// Symbolic fundamental matrix `[[y1, y2], [y1', y2']]`.
    pub fn fundamental(&self, y1: &str, y2: &str) -> Result<(Matrix, DerivationTable)> {
        let t = self.solution_table(&[y1, y2])?;
        let x = crate::mat![
            [Expr::sym(y1), Expr::sym(y2)],
            [Expr::jet(y1, 1), Expr::jet(y2, 1)]
        ];
        Ok((x, t))
    }
}

/// `A_0 = [[0, -1], [q, p]]` and `N = [[0, 0], [-r, 0]]`.
pub fn companion_parts(f: &SecondOrderFamily) -> (Matrix, Matrix) {
    let a0 = crate::mat![[0, -1], [f.q().clone(), f.p().clone()]];
    let n = crate::mat![[0, 0], [-f.r(), Expr::zero()]];
    (a0, n)
}

/// Companion system `X' = -(A_0 + m N) X` for the state `(y, y')`.
pub fn companion(f: &SecondOrderFamily) -> LinearSystem {
    let (a0, n) = companion_parts(f);
    let a = &a0 + &n.scale(&f.m()).expect("normalized parameter");
    LinearSystem::new(a, f.table().clone()).expect("square")
}

/// Companion system of `y''' + a2 y'' + a1 y' + a0 y = 0` for `(y, y', y'')`.
pub fn companion3(a2: &Expr, a1: &Expr, a0: &Expr, table: DerivationTable) -> Result<LinearSystem> {
    let a = Matrix::from_rows(vec![
        vec![Expr::zero(), Expr::int(-1), Expr::zero()],
        vec![Expr::zero(), Expr::zero(), Expr::int(-1)],
        vec![a0.clone(), a1.clone(), a2.clone()],
    ])?;
    LinearSystem::new(a, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat;

    fn oscillator() -> SecondOrderFamily {
        let x = Expr::x();
        SecondOrderFamily::normal_form(1 - x.pow(2), Expr::one(), "m", DerivationTable::new())
            .unwrap()
    }

    #[test]
    fn oscillator_companion() {
        let s = companion(&oscillator());
        let x = Expr::x();
        let m = Expr::param("m");
        let want = mat![[0, -1], [1 - x.pow(2) - m, Expr::zero()]];
        assert!(s.matrix().equiv(&want));
    }

    #[test]
    fn free_particle_companion() {
        let f = SecondOrderFamily::normal_form(Expr::zero(), Expr::one(), "m", DerivationTable::new())
            .unwrap();
        let s = companion(&f).matrix().subs(&[("m", Expr::zero())]).unwrap();
        assert!(s.equiv(&mat![[0, -1], [0, 0]]));
    }

    #[test]
    fn perturbation_is_nilpotent() {
        let t = DerivationTable::new().with_free("r").with_free("q");
        let f = SecondOrderFamily::normal_form(Expr::sym("q"), Expr::sym("r"), "m", t).unwrap();
        let (_, n) = companion_parts(&f);
        assert!((&n * &n).is_zero());
    }

    #[test]
    fn identity_gauge_is_trivial() {
        let s = companion(&oscillator());
        let g = s.gauge(&GaugeMatrix::identity(2)).unwrap();
        assert!(g.matrix().equiv(s.matrix()));
    }

    #[test]
    fn delta_gauge_gives_traceless_system() {
        // w' = p w with p a free symbol
        let t = DerivationTable::new().with_free("q").with_free("p");
        let t = t.with_ode("w", 1, &(Expr::sym("p") * Expr::sym("w"))).unwrap();
        let w = Expr::sym("w");
        let f = SecondOrderFamily::new(w.clone(), Expr::sym("q"), Expr::one(), "m", t).unwrap();
        let (a0, _) = companion_parts(&f);
        let s = LinearSystem::new(a0, f.table().clone()).unwrap();
        let delta = GaugeMatrix::new(Matrix::diag(vec![Expr::one(), w.clone()]).unwrap()).unwrap();
        let b0 = s.gauge_forward(&delta).unwrap();
        let want = mat![[Expr::zero(), -w.inv()], [&w * Expr::sym("q"), Expr::zero()]];
        assert!(b0.matrix().equiv(&want), "{}", b0.matrix());
        assert!(b0.matrix().trace().is_zero());
    }

    #[test]
    fn fundamental_matrix_residual_vanishes() {
        let t = DerivationTable::new().with_free("q").with_free("r").with_free("p");
        let t = t.with_ode("w", 1, &(Expr::sym("p") * Expr::sym("w"))).unwrap();
        let f = SecondOrderFamily::new(Expr::sym("w"), Expr::sym("q"), Expr::sym("r"), "m", t)
            .unwrap();
        let (x, table) = f.fundamental("y1", "y2").unwrap();
        let s = companion(&f);
        assert!(s.residual_in(&x, &table).unwrap().is_zero());
        let mut bad = x.clone();
        bad.set(0, 1, Expr::sym("y2") + Expr::x()).unwrap();
        assert!(!s.residual_in(&bad, &table).unwrap().is_zero());
    }

    #[test]
    fn zero_system_identity_candidate() {
        let s = LinearSystem::new(Matrix::zeros(3, 3), DerivationTable::new()).unwrap();
        assert!(s.residual(&Matrix::identity(3)).unwrap().is_zero());
    }

    #[test]
    fn inconsistent_wronskian_is_rejected() {
        let x = Expr::x();
        let r = SecondOrderFamily::with_p(
            Expr::zero(),
            Expr::zero(),
            Expr::one(),
            x,
            "m",
            DerivationTable::new(),
        );
        assert!(matches!(r, Err(Error::InvalidFamily(_))));
    }
}
