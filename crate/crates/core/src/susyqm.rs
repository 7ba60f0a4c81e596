//! Witten-style supersymmetric quantum mechanics on top of the Darboux
//! machinery: partner potentials, shape invariance, the 2x2 and 3x3 matrix
//! Schrodinger operators `H = -d/dx + V`, ladder operators and oscillator
//! states.
//!
//! Matrix states are `Psi = (psi, psi')` (order 2) or
//! `Psi = (psi^2, 2 psi psi', psi'^2)` (order 3), and eigenvalue problems read
//! `-Psi' + V_- Psi = lambda (-N) Psi`.

use num_bigint::BigInt;

use crate::darboux::{darboux_gauge, darboux_potential, DarbouxSeed};
use crate::error::{Error, Result};
use crate::linsys::{GaugeMatrix, SecondOrderFamily};
use crate::mat;
use crate::matrix::Matrix;
use crate::symexpr::{DerivationTable, Expr, GaussRat};
use crate::sympow::sym_group;
use crate::tensordt::FactoredGauge;

/// Name of the energy parameter in matrix formulas.
pub const ENERGY: &str = "lambda";

/// `W = -theta0` for the ground-state log-derivative `theta0 = psi0'/psi0`.
pub fn superpotential(theta0: &Expr) -> Expr {
    -theta0
}

/// A superpotential with its partner potentials `V_-+ = W^2 -+ W'`.
#[derive(Clone, Debug)]
pub struct SusyPair {
    pub w: Expr,
    pub v_minus: Expr,
    pub v_plus: Expr,
    /// Ground-state energy of `H_-`; zero since `H_- = A^dagger A`.
    pub lambda0: Expr,
    pub table: DerivationTable,
}

pub fn partner_potentials(w: &Expr, table: &DerivationTable) -> Result<SusyPair> {
    let dw = w.diff(table)?;
    let w2 = w.pow(2);
    Ok(SusyPair {
        w: w.clone(),
        v_minus: &w2 - &dw,
        v_plus: &w2 + &dw,
        lambda0: Expr::zero(),
        table: table.clone(),
    })
}

impl SusyPair {
    /// Normal-form family `y'' = (V_- - lambda) y`, i.e. `q = -V_-`, `r = 1`.
    pub fn family(&self) -> Result<SecondOrderFamily> {
        SecondOrderFamily::normal_form(-&self.v_minus, Expr::one(), ENERGY, self.table.clone())
    }

    /// Ground-state seed `theta0 = -W`.
    pub fn seed(&self) -> Result<DarbouxSeed> {
        DarbouxSeed::new(&self.family()?, -&self.w)
    }

    /// The Darboux image of [`SusyPair::family`]; its potential is `-V_+`.
    pub fn partner_family(&self) -> Result<SecondOrderFamily> {
        darboux_potential(&self.family()?, &self.seed()?)
    }

    fn ladder(&self, kind: Ladder, e: &Expr, table: &DerivationTable) -> Result<Expr> {
        ScalarLadder { kind, w: self.w.clone() }.apply(e, table)
    }

    /// `(A^dagger A - H_-) y` and `(A A^dagger - H_+) y` for a free symbol `y`.
    pub fn factorization_residuals(&self) -> Result<(Expr, Expr)> {
        let t = self.table.clone().with_free("psi");
        let y = Expr::sym("psi");
        let y2 = Expr::jet("psi", 2);
        let hm = -&y2 + &self.v_minus * &y;
        let hp = -&y2 + &self.v_plus * &y;
        let lm = self.ladder(Ladder::Raise, &self.ladder(Ladder::Lower, &y, &t)?, &t)?;
        let lp = self.ladder(Ladder::Lower, &self.ladder(Ladder::Raise, &y, &t)?, &t)?;
        Ok((lm - hm, lp - hp))
    }
}

/// `A = d/dx + W` lowers, `A^dagger = -d/dx + W` raises.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Lower,
    Raise,
}

#[derive(Clone, Debug)]
pub struct ScalarLadder {
    pub kind: Ladder,
    pub w: Expr,
}

impl ScalarLadder {
    pub fn apply(&self, psi: &Expr, table: &DerivationTable) -> Result<Expr> {
        let d = psi.diff(table)?;
        let d = if self.kind == Ladder::Lower { d } else { -d };
        Ok(d + &self.w * psi)
    }
}

/// Matrix wrapper of a scalar ladder: entry `(i, j)` acts as
/// `constant[i][j] + coeff[i][j] * op`.
#[derive(Clone, Debug)]
pub struct MatrixLadder {
    pub op: ScalarLadder,
    pub coeff: Matrix,
    pub constant: Matrix,
}

impl MatrixLadder {
    pub fn apply(&self, psi: &[Expr], table: &DerivationTable) -> Result<Vec<Expr>> {
        let n = self.coeff.rows();
        if psi.len() != n {
            return Err(Error::DimensionMismatch(format!("state of length {} for a {n}x{n} ladder", psi.len())));
        }
        let ops = psi
            .iter()
            .enumerate()
            .map(|(j, p)| {
                if (0..n).all(|i| self.coeff.get(i, j).is_zero()) {
                    Ok(Expr::zero())
                } else {
                    self.op.apply(p, table)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.constant.get(i, j) * &psi[j] + self.coeff.get(i, j) * &ops[j])
                    .sum::<Expr>()
                    .normalize()
            })
            .collect()
    }
}

/// Matrix formulation of a partner pair.
#[derive(Clone, Debug)]
pub struct MatrixFormalism {
    pub order: usize,
    pub pair: SusyPair,
    pub v_minus: Matrix,
    pub v_plus: Matrix,
    /// `-N` (order 2) or `-N_1` (order 3).
    pub minus_n: Matrix,
    pub lower: MatrixLadder,
    /// Raising operator exactly as in the textbook matrix form; it maps
    /// `(psi, psi')` to `(A^dagger psi, (A^dagger psi)')` only when `H_- psi = 0`.
    pub raise: MatrixLadder,
}

fn potential_matrix(order: usize, v: &Expr) -> Matrix {
    if order == 2 {
        mat![[Expr::zero(), Expr::one()], [v.clone(), Expr::zero()]]
    } else {
        mat![[0, 1, 0], [v * 2, Expr::zero(), Expr::int(2)], [Expr::zero(), v.clone(), Expr::zero()]]
    }
}

pub fn matrix_formalism(pair: &SusyPair, order: usize) -> Result<MatrixFormalism> {
    let w = &pair.w;
    let dw = w.diff(&pair.table)?;
    let z = Expr::zero;
    let (minus_n, lower, raise) = match order {
        2 => (
            mat![[0, 0], [1, 0]],
            (mat![[Expr::one(), z()], [w.clone(), z()]], Matrix::zeros(2, 2)),
            (mat![[Expr::one(), z()], [-w, z()]], mat![[z(), z()], [&dw * 2, z()]]),
        ),
        3 => {
            let (w2, w3) = (w.pow(2), w.pow(3));
            (
                mat![[0, 0, 0], [2, 0, 0], [0, 1, 0]],
                (
                    mat![[w.clone(), z(), z()], [&w2 * 2, z(), z()], [w3.clone(), z(), z()]],
                    mat![[z(), z(), Expr::one()], [z(), z(), w * 2], [z(), z(), w2.clone()]],
                ),
                (
                    mat![[w.clone(), z(), z()], [-(&w2 * 2), z(), z()], [w3, z(), z()]],
                    mat![[z(), z(), Expr::one()], [z(), z(), -(w * 2)], [z(), z(), w2]],
                ),
            )
        }
        n => return Err(Error::UnsupportedOrder(n)),
    };
    let wrap = |kind, (coeff, constant): (Matrix, Matrix)| MatrixLadder {
        op: ScalarLadder { kind, w: w.clone() },
        coeff,
        constant,
    };
    Ok(MatrixFormalism {
        order,
        pair: pair.clone(),
        v_minus: potential_matrix(order, &pair.v_minus),
        v_plus: potential_matrix(order, &pair.v_plus),
        minus_n,
        lower: wrap(Ladder::Lower, lower),
        raise: wrap(Ladder::Raise, raise),
    })
}

impl MatrixFormalism {
    /// `E_lambda = lambda (-N)`.
    pub fn energy_matrix(&self, lambda: &Expr) -> Matrix {
        self.minus_n.scale(lambda).expect("normal")
    }

    /// `V_+ - V_-`, which equals `2W' (-N)`.
    pub fn partner_gap(&self) -> Matrix {
        &self.v_plus - &self.v_minus
    }

    /// `-Psi' + V Psi - lambda (-N) Psi` for `V = V_-` or `V_+`.
    pub fn hamiltonian_residual(&self, plus: bool, psi: &[Expr], lambda: &Expr, table: &DerivationTable) -> Result<Vec<Expr>> {
        let v = if plus { &self.v_plus } else { &self.v_minus };
        let col = Matrix::column(psi.to_vec())?;
        let h = &(v - &self.energy_matrix(lambda)) * &col;
        let d = col.diff(table)?;
        (&h - &d).reduce(table).map(|m| m.col(0))
    }

    /// Energy-aware raising operator: the second row gains `lambda` so that
    /// `(psi, psi')` at energy `lambda` is mapped to `(phi, phi')` with
    /// `phi = A^dagger psi`. Equal to [`MatrixFormalism::raise`] at `lambda = 0`.
    pub fn raise_at(&self, lambda: &Expr) -> Result<MatrixLadder> {
        if self.order != 2 {
            return Err(Error::UnsupportedOrder(self.order));
        }
        let mut r = self.raise.clone();
        let c = r.constant.get(1, 0) + lambda;
        r.constant.set(1, 0, c)?;
        Ok(r)
    }

    /// `P_lambda` with its splitting into a `lambda` block and a `W` block.
    pub fn darboux_matrix(&self) -> Result<FactoredGauge> {
        let f = self.pair.family()?;
        let dg = darboux_gauge(&f, &self.pair.seed()?)?;
        // family parameter m enters as -lambda in the matrix formalism
        let lam = [(ENERGY, -Expr::param(ENERGY))];
        let (p, l, r) = (dg.p.matrix().subs(&lam)?, dg.l.subs(&lam)?, dg.r.matrix().clone());
        let (p, l, r) = if self.order == 2 {
            (p, l, r)
        } else {
            (sym_group(&p, 2)?, sym_group(&l, 2)?, sym_group(&r, 2)?)
        };
        Ok(FactoredGauge { gauge: GaugeMatrix::new(p)?, left: l, right: r })
    }
}

/// A superpotential depending on a parameter together with a
/// reparametrization `a -> f(a)`.
#[derive(Clone, Debug)]
pub struct ParametricPotential {
    pub w: Expr,
    pub param: String,
    pub f: Expr,
    pub table: DerivationTable,
}

impl ParametricPotential {
    pub fn pair(&self) -> Result<SusyPair> {
        partner_potentials(&self.w, &self.table)
    }

    /// `a_0 = a0`, `a_{k+1} = f(a_k)`.
    pub fn parameters(&self, a0: &Expr, n: usize) -> Result<Vec<Expr>> {
        let mut out = vec![a0.clone()];
        for _ in 1..n {
            let next = self.f.subs(&[(self.param.as_str(), out.last().unwrap().clone())])?;
            out.push(next);
        }
        Ok(out)
    }
}

/// `R(a) = V_+(x; a) - V_-(x; f(a))` when it is `x`-free.
pub fn shape_invariance(pot: &ParametricPotential) -> Result<Expr> {
    let pair = pot.pair()?;
    let shifted = pair.v_minus.subs(&[(pot.param.as_str(), pot.f.clone())])?;
    let r = (&pair.v_plus - &shifted).normalize()?;
    if r.is_x_free()? {
        Ok(r)
    } else {
        Err(Error::NotShapeInvariant(r.to_string()))
    }
}

/// Energies `E_n = sum_{k<n} R(a_k)` for `n = 0..count`.
pub fn spectrum(pot: &ParametricPotential, a0: &Expr, count: usize) -> Result<Vec<Expr>> {
    let r = shape_invariance(pot)?;
    let params = pot.parameters(a0, count)?;
    let mut acc = Expr::zero();
    let mut out = Vec::with_capacity(count);
    for a in params.iter().take(count) {
        out.push(acc.clone());
        acc = (&acc + r.subs(&[(pot.param.as_str(), a.clone())])?).normalize()?;
    }
    Ok(out)
}

/// Physicists' Hermite polynomial `H_n(x)`.
pub fn hermite(n: usize) -> Expr {
    let mut prev = vec![BigInt::from(1)];
    if n == 0 {
        return poly_expr(&prev);
    }
    let mut cur = vec![BigInt::from(0), BigInt::from(2)];
    for k in 1..n {
        let mut next = vec![BigInt::from(0); k + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c * 2;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c * BigInt::from(2 * k as i64);
        }
        prev = std::mem::replace(&mut cur, next);
    }
    poly_expr(&cur)
}

fn poly_expr(c: &[BigInt]) -> Expr {
    c.iter()
        .enumerate()
        .map(|(k, a)| Expr::constant(GaussRat::new(a.clone().into(), num_rational::BigRational::from_integer(BigInt::from(0)))) * Expr::x().pow(k as i64))
        .sum()
}

/// Oscillator states `Psi_n` for `W = x`, built by the energy-aware ladder
/// from `Psi_0 = (e^{-x^2/2}, -x e^{-x^2/2})`. Order 3 lifts each state to
/// `(psi^2, 2 psi psi', psi'^2)`. Entry `n` lives at `lambda = 2n`.
pub fn oscillator_states(n: usize, order: usize) -> Result<Vec<Vec<Expr>>> {
    if order != 2 && order != 3 {
        return Err(Error::UnsupportedOrder(order));
    }
    let t = DerivationTable::new();
    let pair = partner_potentials(&Expr::x(), &t)?;
    let mf = matrix_formalism(&pair, 2)?;
    let g = (-Expr::x().pow(2) * Expr::rat(1, 2)).exp();
    let mut psi = vec![g.clone(), -(Expr::x() * &g)];
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        out.push(psi.clone());
        if k < n {
            psi = mf.raise_at(&Expr::int(2 * k as i64))?.apply(&psi, &t)?;
        }
    }
    if order == 3 {
        out = out
            .into_iter()
            .map(|s| vec![s[0].pow(2), &s[0] * &s[1] * 2, s[1].pow(2)])
            .collect();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> DerivationTable {
        DerivationTable::new()
    }

    #[test]
    fn superpotentials() {
        let g = (-Expr::x().pow(2) / 2).exp();
        let theta = (g.diff(&t()).unwrap() / &g).normalize().unwrap();
        assert_eq!(superpotential(&theta), Expr::x());
        assert!(superpotential(&Expr::zero()).is_zero());
        let g = (-Expr::x().pow(3) / 3).exp();
        let theta = g.diff(&t()).unwrap() / &g;
        assert_eq!(superpotential(&theta), Expr::x().pow(2));
    }

    #[test]
    fn partner_pairs() {
        let x = Expr::x();
        let p = partner_potentials(&x, &t()).unwrap();
        assert_eq!((p.v_minus.clone(), p.v_plus.clone()), (x.pow(2) - 1, x.pow(2) + 1));
        let p = partner_potentials(&Expr::zero(), &t()).unwrap();
        assert!(p.v_minus.is_zero() && p.v_plus.is_zero());
        let p = partner_potentials(&x.pow(2), &t()).unwrap();
        assert_eq!(p.v_minus, x.pow(4) - &x * 2);
        assert_eq!(p.v_plus, x.pow(4) + &x * 2);
    }

    #[test]
    fn factorization_for_generic_w() {
        let table = t().with_free("W");
        let p = partner_potentials(&Expr::sym("W"), &table).unwrap();
        let (a, b) = p.factorization_residuals().unwrap();
        assert!(a.is_zero() && b.is_zero());
    }

    #[test]
    fn darboux_maps_minus_to_plus() {
        let table = t().with_free("W");
        let p = partner_potentials(&Expr::sym("W"), &table).unwrap();
        let g = p.partner_family().unwrap();
        assert_eq!(g.q().clone(), -&p.v_plus);
    }

    #[test]
    fn matrix_partners_differ_by_nilpotent() {
        let x = Expr::x();
        let p = partner_potentials(&x, &t()).unwrap();
        let m2 = matrix_formalism(&p, 2).unwrap();
        assert_eq!(m2.partner_gap(), mat![[0, 0], [2, 0]]);
        let m3 = matrix_formalism(&p, 3).unwrap();
        assert_eq!(m3.partner_gap(), mat![[0, 0, 0], [4, 0, 0], [0, 2, 0]]);
        let z = matrix_formalism(&partner_potentials(&Expr::zero(), &t()).unwrap(), 2).unwrap();
        assert!(z.partner_gap().is_zero());
        assert!(matches!(matrix_formalism(&p, 4), Err(Error::UnsupportedOrder(4))));
        let table = t().with_free("W");
        let g = partner_potentials(&Expr::sym("W"), &table).unwrap();
        let dw = Expr::jet("W", 1) * 2;
        for order in [2, 3] {
            let mf = matrix_formalism(&g, order).unwrap();
            assert_eq!(mf.partner_gap(), mf.minus_n.scale(&dw).unwrap());
        }
    }

    #[test]
    fn darboux_matrices_in_susy_form() {
        let table = t().with_free("W");
        let p = partner_potentials(&Expr::sym("W"), &table).unwrap();
        let (w, l) = (Expr::sym("W"), Expr::param(ENERGY));
        let m2 = matrix_formalism(&p, 2).unwrap().darboux_matrix().unwrap();
        let nu = w.pow(2) - &l;
        assert_eq!(m2.matrix().clone(), mat![[w.clone(), Expr::one()], [nu.clone(), w.clone()]]);
        assert_eq!(m2.left, mat![[Expr::zero(), Expr::one()], [-&l, w.clone()]]);
        let m3 = matrix_formalism(&p, 3).unwrap().darboux_matrix().unwrap();
        let expect = mat![
            [w.pow(2), w.clone(), Expr::one()],
            [&w * &nu * 2, w.pow(2) * 2 - &l, &w * 2],
            [nu.pow(2), &w * &nu, w.pow(2)]
        ];
        assert_eq!(m3.matrix().clone(), expect);
        assert!(m3.factorization_holds());
        assert_eq!(m3.right, mat![[Expr::one(), Expr::zero(), Expr::zero()], [&w * 2, Expr::one(), Expr::zero()], [w.pow(2), w.clone(), Expr::one()]]);
    }

    #[test]
    fn shape_invariant_oscillator() {
        let a = Expr::param("a");
        let pot = ParametricPotential { w: &a * Expr::x(), param: "a".into(), f: a.clone(), table: t() };
        assert_eq!(shape_invariance(&pot).unwrap(), &a * 2);
        let e = spectrum(&pot, &Expr::one(), 6).unwrap();
        assert_eq!(e, (0..6).map(|n| Expr::int(2 * n)).collect::<Vec<_>>());
        let bad = ParametricPotential { f: &a * 2, ..pot.clone() };
        assert!(matches!(shape_invariance(&bad), Err(Error::NotShapeInvariant(_))));
        let quartic = ParametricPotential { w: &a * Expr::x().pow(2), ..pot };
        assert!(matches!(shape_invariance(&quartic), Err(Error::NotShapeInvariant(_))));
    }

    #[test]
    fn hermite_polynomials() {
        let x = Expr::x();
        assert!(hermite(0).is_one());
        assert_eq!(hermite(1), &x * 2);
        assert_eq!(hermite(3), x.pow(3) * 8 - &x * 12);
        for n in 0..6 {
            let h = hermite(n);
            let lhs = h.diff(&t()).unwrap().diff(&t()).unwrap() - &x * 2 * h.diff(&t()).unwrap() + &h * (2 * n as i64);
            assert!(lhs.is_zero());
        }
    }

    #[test]
    fn oscillator_states_solve_matrix_equation() {
        let x = Expr::x();
        let p = partner_potentials(&x, &t()).unwrap();
        let g = (-x.pow(2) * Expr::rat(1, 2)).exp();
        for order in [2, 3] {
            let mf = matrix_formalism(&p, order).unwrap();
            let states = oscillator_states(5, order).unwrap();
            for (n, s) in states.iter().enumerate() {
                let r = mf.hamiltonian_residual(false, s, &Expr::int(2 * n as i64), &t()).unwrap();
                assert!(r.iter().all(Expr::is_zero), "order {order}, n = {n}");
            }
        }
        let s = oscillator_states(5, 2).unwrap();
        assert_eq!(s[0], vec![g.clone(), -(&x * &g)]);
        for (n, st) in s.iter().enumerate() {
            assert_eq!(st[0], hermite(n) * &g);
        }
    }

    #[test]
    fn printed_ladder_agrees_at_ground_state_only() {
        let x = Expr::x();
        let mf = matrix_formalism(&partner_potentials(&x, &t()).unwrap(), 2).unwrap();
        let s = oscillator_states(2, 2).unwrap();
        assert_eq!(mf.raise.apply(&s[0], &t()).unwrap(), s[1]);
        assert_ne!(mf.raise.apply(&s[1], &t()).unwrap(), s[2]);
        assert_eq!(mf.lower.apply(&s[0], &t()).unwrap()[0], Expr::zero());
    }
}
