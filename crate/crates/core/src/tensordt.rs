//! Lifted Darboux transformations: second symmetric powers, the two
//! orthogonal (so(3)) forms reached through the constant gauges `Q` and `S`,
//! fundamental matrices, first integrals and the Riccati parametrization of
//! unit solutions of orthogonal systems.
//!
//! Orthogonal systems are stored by their vector `(f, g, h)` and read
//! `Z' = skew(f, g, h) Z`, which is the cross-product form `Z' = Z x Omega`.
//! In the crate-wide convention this is `Z' = -A Z` with `A = -skew`.
//! Nothing here trusts a printed sign: the coefficient matrices of both
//! routes are computed by gauge transformation of the lifted companion
//! system, and checked against residuals of fundamental matrices in tests.

use std::sync::OnceLock;

use crate::darboux::{darboux_gauge, DarbouxSeed};
use crate::error::{Error, Result};
use crate::linsys::{companion, GaugeMatrix, LinearSystem, SecondOrderFamily};
use crate::mat;
use crate::matrix::Matrix;
use crate::sympow::{sym_group, sym_lie, sym_system};
use crate::symexpr::{DerivationTable, Expr};

/// `[[0, h, -g], [-h, 0, f], [g, -f, 0]]`.
pub fn skew(f: &Expr, g: &Expr, h: &Expr) -> Matrix {
    mat![
        [Expr::zero(), h.clone(), -g],
        [-h, Expr::zero(), f.clone()],
        [g.clone(), -f, Expr::zero()]
    ]
}

/// The orthogonal system `Z' = skew(f, g, h) Z`.
#[derive(Clone, Debug)]
pub struct OrthogonalSystem {
    f: Expr,
    g: Expr,
    h: Expr,
    table: DerivationTable,
}

impl OrthogonalSystem {
    pub fn new(f: Expr, g: Expr, h: Expr, table: DerivationTable) -> Result<OrthogonalSystem> {
        Ok(OrthogonalSystem { f: f.normalize()?, g: g.normalize()?, h: h.normalize()?, table })
    }

    /// Read `(f, g, h)` off a skew matrix `M` of `Z' = M Z`.
    pub fn from_matrix(m: &Matrix, table: DerivationTable) -> Result<OrthogonalSystem> {
        if m.rows() != 3 || !m.is_square() {
            return Err(Error::DimensionMismatch("orthogonal systems are 3x3".into()));
        }
        if !(m + &m.transpose()).is_zero() {
            return Err(Error::Input(format!("matrix is not skew-symmetric:\n{m}")));
        }
        OrthogonalSystem::new(m.get(1, 2).clone(), m.get(2, 0).clone(), m.get(0, 1).clone(), table)
    }

    /// From a system `Z' = -A Z` whose `A` is skew.
    pub fn from_system(s: &LinearSystem) -> Result<OrthogonalSystem> {
        OrthogonalSystem::from_matrix(&-s.matrix(), s.table().clone())
    }

    pub fn f(&self) -> &Expr {
        &self.f
    }

    pub fn g(&self) -> &Expr {
        &self.g
    }

    pub fn h(&self) -> &Expr {
        &self.h
    }

    pub fn omega(&self) -> [Expr; 3] {
        [self.f.clone(), self.g.clone(), self.h.clone()]
    }

    pub fn table(&self) -> &DerivationTable {
        &self.table
    }

    /// `skew(f, g, h)`, the matrix of `Z' = M Z`.
    pub fn skew(&self) -> Matrix {
        skew(&self.f, &self.g, &self.h)
    }

    /// The same system in the `Z' = -A Z` convention.
    pub fn to_linear(&self) -> LinearSystem {
        LinearSystem::new(-&self.skew(), self.table.clone())
            .expect("3x3")
            .with_note("converted from Z' = Z x Omega with A = -skew(Omega)")
    }

    pub fn subs(&self, map: &[(&str, Expr)]) -> Result<OrthogonalSystem> {
        OrthogonalSystem::new(self.f.subs(map)?, self.g.subs(map)?, self.h.subs(map)?, self.table.clone())
    }
}

/// The constant gauges `Q` and `S` with exact inverses.
#[derive(Clone, Debug)]
pub struct ConstantGauge {
    pub q: GaugeMatrix,
    pub s: GaugeMatrix,
}

static GAUGES: OnceLock<std::result::Result<ConstantGauge, String>> = OnceLock::new();

impl ConstantGauge {
    /// The gauges, after a one-time exact check of
    /// `Q sym^2(C) Q^-1 = skew(f, g, h)` for symbolic `f, g, h`.
    pub fn get() -> Result<&'static ConstantGauge> {
        GAUGES
            .get_or_init(|| {
                let i = Expr::i();
                let q = mat![[1, 0, -1], [i.clone(), Expr::zero(), i.clone()], [0, -1, 0]];
                let s = mat![[1, 0, 1], [Expr::zero(), i.clone(), Expr::zero()], [i.clone(), Expr::zero(), -&i]];
                let cg = ConstantGauge {
                    q: GaugeMatrix::new(q).map_err(|e| e.to_string())?,
                    s: GaugeMatrix::new(s).map_err(|e| e.to_string())?,
                };
                let (f, g, h) = (Expr::sym("f"), Expr::sym("g"), Expr::sym("h"));
                let c = sym2_from_so3(&f, &g, &h);
                let conj = &(cg.q.matrix() * &sym_lie(&c, 2).map_err(|e| e.to_string())?) * cg.q.inverse();
                if !conj.equiv(&skew(&f, &g, &h)) {
                    return Err(format!("Q-conjugation identity failed:\n{conj}"));
                }
                Ok(cg)
            })
            .as_ref()
            .map_err(|e| Error::IdentityFailed(e.clone()))
    }
}

/// `C = (1/2) [[i h, g + i f], [-(g - i f), -i h]]`.
pub fn sym2_from_so3(f: &Expr, g: &Expr, h: &Expr) -> Matrix {
    let i = Expr::i();
    let half = Expr::rat(1, 2);
    mat![
        [&i * h * &half, (g + &i * f) * &half],
        [-(g - &i * f) * &half, -(&i * h) * &half]
    ]
}

/// Inverse of [`sym2_from_so3`]: `Z = Q Y` turns `Z' = skew(f, g, h) Z`
/// into `Y' = sym^2(C) Y`.
pub fn so3_from_sym2(c: &Matrix, table: DerivationTable) -> Result<OrthogonalSystem> {
    if c.rows() != 2 || !c.is_square() {
        return Err(Error::DimensionMismatch("expected a 2x2 matrix".into()));
    }
    if !c.trace().is_zero() {
        return Err(Error::NotTraceless);
    }
    let i = Expr::i();
    let h = -(&i * c.get(0, 0)) * 2;
    let g = c.get(0, 1) - c.get(1, 0);
    let f = -(&i * (c.get(0, 1) + c.get(1, 0)));
    OrthogonalSystem::new(f, g, h, table)
}

/// `Delta = diag(1, w)`.
pub fn delta(f: &SecondOrderFamily) -> Result<GaugeMatrix> {
    GaugeMatrix::new(Matrix::diag(vec![Expr::one(), f.w().clone()])?)
}

/// Lifted companion system `Y' = -sym^2(A_0 + m N) Y`.
pub fn sym2_companion(f: &SecondOrderFamily) -> Result<LinearSystem> {
    sym_system(&companion(f), 2)
}

/// `Delta`-gauged companion system `X1' = -(B_0 + m N_1) X1`, `X1 = Delta X`.
pub fn sl2_companion(f: &SecondOrderFamily) -> Result<LinearSystem> {
    companion(f).gauge_forward(&delta(f)?)
}

/// Lifted `Delta` system `Y1' = -sym^2(B_0 + m N_1) Y1`.
pub fn sym2_sl2_companion(f: &SecondOrderFamily) -> Result<LinearSystem> {
    sym_system(&sl2_companion(f)?, 2)
}

/// First route: `Z = w Q Sym^2(X)`.
pub fn q_route_system(f: &SecondOrderFamily) -> Result<LinearSystem> {
    let cg = ConstantGauge::get()?;
    let wq = GaugeMatrix::new(cg.q.matrix().scale(f.w())?)?;
    sym2_companion(f)?.gauge_forward(&wq)
}

/// Second route: `Z1 = S Sym^2(Delta X)`.
pub fn s_route_system(f: &SecondOrderFamily) -> Result<LinearSystem> {
    let cg = ConstantGauge::get()?;
    sym2_sl2_companion(f)?.gauge_forward(&cg.s)
}

pub fn q_route(f: &SecondOrderFamily) -> Result<OrthogonalSystem> {
    OrthogonalSystem::from_system(&q_route_system(f)?)
}

pub fn s_route(f: &SecondOrderFamily) -> Result<OrthogonalSystem> {
    OrthogonalSystem::from_system(&s_route_system(f)?)
}

/// A gauge matrix with a two-factor splitting `matrix = left * right`.
#[derive(Clone, Debug)]
pub struct FactoredGauge {
    pub gauge: GaugeMatrix,
    /// Factor carrying the spectral parameter.
    pub left: Matrix,
    /// Factor depending on the seed only.
    pub right: Matrix,
}

impl FactoredGauge {
    pub fn matrix(&self) -> &Matrix {
        self.gauge.matrix()
    }

    pub fn factorization_holds(&self) -> bool {
        (&self.left * &self.right).equiv(self.gauge.matrix())
    }

    fn conjugate(&self, c: &GaugeMatrix) -> Result<FactoredGauge> {
        let m = &(c.matrix() * self.gauge.matrix()) * c.inverse();
        Ok(FactoredGauge {
            gauge: GaugeMatrix::new(m)?,
            left: c.matrix() * &self.left,
            right: &self.right * c.inverse(),
        })
    }
}

/// `P_{1,m} = Sym^2(P_m) = Sym^2(L_m) Sym^2(R)`.
pub fn p1(f: &SecondOrderFamily, seed: &DarbouxSeed) -> Result<FactoredGauge> {
    let dg = darboux_gauge(f, seed)?;
    Ok(FactoredGauge {
        gauge: GaugeMatrix::new(sym_group(dg.p.matrix(), 2)?)?,
        left: sym_group(&dg.l, 2)?,
        right: sym_group(dg.r.matrix(), 2)?,
    })
}

/// `P_{2,m} = Sym^2(Delta P_m Delta^-1) = Sym^2(Delta L_m) Sym^2(R Delta^-1)`.
pub fn p2(f: &SecondOrderFamily, seed: &DarbouxSeed) -> Result<FactoredGauge> {
    let dg = darboux_gauge(f, seed)?;
    let d = delta(f)?;
    let pd = &(d.matrix() * dg.p.matrix()) * d.inverse();
    Ok(FactoredGauge {
        gauge: GaugeMatrix::new(sym_group(&pd, 2)?)?,
        left: sym_group(&(d.matrix() * &dg.l), 2)?,
        right: sym_group(&(dg.r.matrix() * d.inverse()), 2)?,
    })
}

/// `T_{1,m} = Q P_{1,m} Q^-1`, split as `(Q Sym^2(L_m)) (Sym^2(R) Q^-1)`.
pub fn t1(f: &SecondOrderFamily, seed: &DarbouxSeed) -> Result<FactoredGauge> {
    p1(f, seed)?.conjugate(&ConstantGauge::get()?.q)
}

/// `T_{2,m} = S P_{2,m} S^-1`, split as `(S Sym^2(Delta L_m)) (Sym^2(R Delta^-1) S^-1)`.
pub fn t2(f: &SecondOrderFamily, seed: &DarbouxSeed) -> Result<FactoredGauge> {
    p2(f, seed)?.conjugate(&ConstantGauge::get()?.s)
}

/// Side-by-side view of the two so(3) transformations of one step.
#[derive(Clone, Debug)]
pub struct RouteComparison {
    pub t1: Matrix,
    pub t2: Matrix,
    /// Literal equality; the routes use different bases, so this is rarely true.
    pub equal: bool,
    /// Whether `T2 = (S Q^-1) T1 (S Q^-1)^-1`, which holds exactly when `w = 1`.
    pub conjugate: bool,
}

pub fn compare_routes(f: &SecondOrderFamily, seed: &DarbouxSeed) -> Result<RouteComparison> {
    let a = t1(f, seed)?;
    let b = t2(f, seed)?;
    let cg = ConstantGauge::get()?;
    let k = cg.s.matrix() * cg.q.inverse();
    let kinv = cg.q.matrix() * cg.s.inverse();
    let moved = &(&k * a.matrix()) * &kinv;
    Ok(RouteComparison {
        equal: a.matrix().equiv(b.matrix()),
        conjugate: moved.equiv(b.matrix()),
        t1: a.matrix().clone(),
        t2: b.matrix().clone(),
    })
}

/// Symbolic fundamental matrices over two solutions `y1, y2`.
#[derive(Clone, Debug)]
pub struct FundamentalMatrices {
    /// `[[y1, y2], [y1', y2']]`.
    pub x: Matrix,
    /// `Sym^2(X)`.
    pub y: Matrix,
    /// `w Q Y`.
    pub z: Matrix,
    /// `Delta X`.
    pub x1: Matrix,
    /// `Sym^2(X1)`.
    pub y1: Matrix,
    /// `S Y1`.
    pub z1: Matrix,
    /// Family table plus the ODE rules of `y1, y2`.
    pub table: DerivationTable,
}

pub fn fundamental_matrices(f: &SecondOrderFamily) -> Result<FundamentalMatrices> {
    let cg = ConstantGauge::get()?;
    let (x, table) = f.fundamental("y1", "y2")?;
    let y = sym_group(&x, 2)?;
    let z = (cg.q.matrix() * &y).scale(f.w())?;
    let x1 = delta(f)?.matrix() * &x;
    let y1 = sym_group(&x1, 2)?;
    let z1 = cg.s.matrix() * &y1;
    Ok(FundamentalMatrices { x, y, z, x1, y1, z1, table })
}

/// Which first integral to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegralKind {
    /// `alpha^2 + beta^2 + gamma^2` in the symbols `alpha, beta, gamma`.
    Orthogonal,
    /// `w^2 (4 z1 z3 - z2^2)` in the symbols `z1, z2, z3`.
    Sym2,
}

/// State symbols used by [`first_integral`].
pub fn integral_vars(kind: IntegralKind) -> [&'static str; 3] {
    match kind {
        IntegralKind::Orthogonal => ["alpha", "beta", "gamma"],
        IntegralKind::Sym2 => ["z1", "z2", "z3"],
    }
}

pub fn first_integral(kind: IntegralKind, w: &Expr) -> Expr {
    let [a, b, c] = integral_vars(kind).map(Expr::sym);
    match kind {
        IntegralKind::Orthogonal => a.pow(2) + b.pow(2) + c.pow(2),
        IntegralKind::Sym2 => w.pow(2) * (&a * &c * 4 - b.pow(2)),
    }
}

/// Derivative of `e` along `Z' = -A Z`, with `vars` naming the components of `Z`.
pub fn flow_derivative(e: &Expr, vars: &[&str], system: &LinearSystem) -> Result<Expr> {
    if vars.len() != system.size() {
        return Err(Error::DimensionMismatch(format!(
            "{} state symbols for a system of size {}",
            vars.len(),
            system.size()
        )));
    }
    let mut t = system.table().clone();
    for v in vars {
        t = t.with_free(v);
    }
    let z = Matrix::column(vars.iter().map(|v| Expr::sym(v)).collect())?;
    let rhs = -&(system.matrix() * &z);
    for (k, v) in vars.iter().enumerate() {
        t = t.with_ode(v, 1, rhs.get(k, 0))?;
    }
    e.diff(&t)
}

/// Riccati data `theta' = omega0 + mu theta + omega1 theta^2` of an
/// orthogonal system.
#[derive(Clone, Debug)]
pub struct RiccatiData {
    pub omega0: Expr,
    pub omega1: Expr,
    pub mu: Expr,
}

/// `omega0 = (g - i f)/2`, `omega1 = (g + i f)/2`, `mu = -i h`.
pub fn so3_to_riccati(sys: &OrthogonalSystem) -> RiccatiData {
    let i = Expr::i();
    let half = Expr::rat(1, 2);
    RiccatiData {
        omega0: (sys.g() - &i * sys.f()) * &half,
        omega1: (sys.g() + &i * sys.f()) * &half,
        mu: -(&i * sys.h()),
    }
}

impl RiccatiData {
    /// `theta' - (omega0 + mu theta + omega1 theta^2)` for an expression `theta`.
    pub fn defect(&self, theta: &Expr, table: &DerivationTable) -> Result<Expr> {
        Ok(theta.diff(table)? - (&self.omega0 + &self.mu * theta + &self.omega1 * theta.pow(2)))
    }

    /// Coefficients `(a1, a0)` of `y'' + a1 y' + a0 y = 0` obtained with
    /// `theta = -(1/omega1) y'/y`: `a1 = -(mu + omega1'/omega1)`,
    /// `a0 = omega0 omega1`.
    pub fn linear_form(&self, table: &DerivationTable) -> Result<(Expr, Expr)> {
        if self.omega1.is_zero() {
            return Err(Error::OmegaOneZero);
        }
        let d1 = self.omega1.diff(table)?;
        Ok((-(&self.mu + d1 / &self.omega1), &self.omega0 * &self.omega1))
    }

    /// `-(1/omega1) y'/y`.
    pub fn theta_from(&self, y: &Expr, table: &DerivationTable) -> Result<Expr> {
        if self.omega1.is_zero() {
            return Err(Error::OmegaOneZero);
        }
        Ok(-(y.diff(table)? / (y * &self.omega1)))
    }
}

/// `((1 - uv)/(u - v), i (1 + uv)/(u - v), (u + v)/(u - v))`.
pub fn riccati_parametrize(u: &Expr, v: &Expr) -> [Expr; 3] {
    let d = u - v;
    let uv = u * v;
    [(1 - &uv) / &d, Expr::i() * (1 + &uv) / &d, (u + v) / &d]
}

/// `u = (alpha + i beta)/(1 - gamma)`, `v = -(1 - gamma)/(alpha - i beta)`;
/// requires `alpha^2 + beta^2 + gamma^2 = 1` exactly.
pub fn riccati_invert(z: &[Expr; 3]) -> Result<(Expr, Expr)> {
    let [a, b, c] = z;
    if !(a.pow(2) + b.pow(2) + c.pow(2) - 1).is_zero() {
        return Err(Error::NotUnitNorm);
    }
    let i = Expr::i();
    let u = (a + &i * b) / (1 - c);
    let v = -((1 - c) / (a - &i * b));
    Ok((u.normalize()?, v.normalize()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darboux::darboux_potential;

    fn generic() -> (SecondOrderFamily, DarbouxSeed) {
        let t = DerivationTable::new()
            .with_free("p")
            .with_free("q")
            .with_free("r")
            .with_ode("w", 1, &(Expr::sym("p") * Expr::sym("w")))
            .unwrap();
        let f = SecondOrderFamily::new(Expr::sym("w"), Expr::sym("q"), Expr::sym("r"), "m", t)
            .unwrap();
        let seed = DarbouxSeed::symbolic(&f, "th", Expr::zero()).unwrap();
        (f, seed)
    }

    #[test]
    fn lemma_identity_holds() {
        assert!(ConstantGauge::get().is_ok());
    }

    #[test]
    fn so3_sym2_round_trip() {
        let (f, g, h) = (Expr::sym("f"), Expr::sym("g"), Expr::sym("h"));
        let c = sym2_from_so3(&f, &g, &h);
        let s = so3_from_sym2(&c, DerivationTable::new()).unwrap();
        assert_eq!(s.omega(), [f, g, h]);
        let z = so3_from_sym2(&Matrix::zeros(2, 2), DerivationTable::new()).unwrap();
        assert!(z.omega().iter().all(|e| e.is_zero()));
        assert!(matches!(
            so3_from_sym2(&Matrix::identity(2), DerivationTable::new()),
            Err(Error::NotTraceless)
        ));
    }

    #[test]
    fn q_route_vector() {
        let (f, _) = generic();
        let s = q_route(&f.with_q(Expr::sym("q")).unwrap()).unwrap();
        let m0 = s.subs(&[("m", Expr::zero())]).unwrap();
        let i = Expr::i();
        let q = Expr::sym("q");
        assert_eq!(m0.omega(), [&i * (&q - 1), &q + 1, -(&i * Expr::sym("p"))]);
    }

    #[test]
    fn fundamental_matrices_solve_their_systems() {
        let (f, _) = generic();
        let fm = fundamental_matrices(&f).unwrap();
        let t = &fm.table;
        assert!(companion(&f).residual_in(&fm.x, t).unwrap().is_zero());
        assert!(sym2_companion(&f).unwrap().residual_in(&fm.y, t).unwrap().is_zero());
        assert!(q_route_system(&f).unwrap().residual_in(&fm.z, t).unwrap().is_zero());
        assert!(sl2_companion(&f).unwrap().residual_in(&fm.x1, t).unwrap().is_zero());
        assert!(sym2_sl2_companion(&f).unwrap().residual_in(&fm.y1, t).unwrap().is_zero());
        assert!(s_route_system(&f).unwrap().residual_in(&fm.z1, t).unwrap().is_zero());
        assert!(q_route(&f).is_ok() && s_route(&f).is_ok());
    }

    #[test]
    fn lifted_gauges_and_diagrams() {
        let (f, seed) = generic();
        let g = darboux_potential(&f, &seed).unwrap();
        let f = f.with_table(seed.table().clone());
        let m3 = -f.m().pow(3);
        for (gauge, src, dst) in [
            (p1(&f, &seed).unwrap(), sym2_companion(&f).unwrap(), sym2_companion(&g).unwrap()),
            (p2(&f, &seed).unwrap(), sym2_sl2_companion(&f).unwrap(), sym2_sl2_companion(&g).unwrap()),
            (t1(&f, &seed).unwrap(), q_route_system(&f).unwrap(), q_route_system(&g).unwrap()),
            (t2(&f, &seed).unwrap(), s_route_system(&f).unwrap(), s_route_system(&g).unwrap()),
        ] {
            assert!(gauge.factorization_holds());
            assert_eq!(gauge.gauge.det(), m3);
            let moved = src.gauge_forward(&gauge.gauge).unwrap();
            assert!(moved.matrix().equiv(dst.matrix()));
        }
    }

    #[test]
    fn routes_agree_up_to_basis_when_w_is_one() {
        let t = DerivationTable::new().with_free("q");
        let f = SecondOrderFamily::normal_form(Expr::sym("q"), Expr::one(), "m", t).unwrap();
        let seed = DarbouxSeed::symbolic(&f, "th", Expr::zero()).unwrap();
        let f = f.with_table(seed.table().clone());
        assert!(p1(&f, &seed).unwrap().matrix().equiv(p2(&f, &seed).unwrap().matrix()));
        assert!(compare_routes(&f, &seed).unwrap().conjugate);
    }

    #[test]
    fn first_integrals_are_conserved() {
        let (f, _) = generic();
        let o = first_integral(IntegralKind::Orthogonal, &Expr::one());
        let d = flow_derivative(&o, &integral_vars(IntegralKind::Orthogonal), &q_route_system(&f).unwrap())
            .unwrap();
        assert!(d.is_zero());
        let s = first_integral(IntegralKind::Sym2, f.w());
        let d = flow_derivative(&s, &integral_vars(IntegralKind::Sym2), &sym2_companion(&f).unwrap())
            .unwrap();
        assert!(d.is_zero());
        let fm = fundamental_matrices(&f).unwrap();
        let col = fm.y.col(0);
        let v = s.subs(&[("z1", col[0].clone()), ("z2", col[1].clone()), ("z3", col[2].clone())]).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn parametrization_has_unit_norm_and_inverts() {
        let (u, v) = (Expr::sym("u"), Expr::sym("v"));
        let z = riccati_parametrize(&u, &v);
        let n = z.iter().map(|e| e.pow(2)).sum::<Expr>();
        assert!(n.is_one());
        assert_eq!(riccati_invert(&z).unwrap(), (u, v));
        let bad = [Expr::one(), Expr::one(), Expr::zero()];
        assert!(matches!(riccati_invert(&bad), Err(Error::NotUnitNorm)));
    }

    #[test]
    fn riccati_solutions_give_orthogonal_solutions() {
        let base = DerivationTable::new().with_free("f").with_free("g").with_free("h");
        let sys = OrthogonalSystem::new(Expr::sym("f"), Expr::sym("g"), Expr::sym("h"), base.clone())
            .unwrap();
        let rd = so3_to_riccati(&sys);
        let rule = |n: &str| {
            let t = Expr::sym(n);
            &rd.omega0 + &rd.mu * &t + &rd.omega1 * t.pow(2)
        };
        let t = base
            .with_free("u")
            .with_ode("u", 1, &rule("u"))
            .unwrap()
            .with_free("v")
            .with_ode("v", 1, &rule("v"))
            .unwrap();
        let z = Matrix::column(riccati_parametrize(&Expr::sym("u"), &Expr::sym("v")).to_vec()).unwrap();
        assert!(sys.to_linear().residual_in(&z, &t).unwrap().is_zero());
    }

    #[test]
    fn linear_form_matches_riccati() {
        let t = DerivationTable::new().with_free("f").with_free("g").with_free("h");
        let sys = OrthogonalSystem::new(Expr::sym("f"), Expr::sym("g"), Expr::sym("h"), t.clone())
            .unwrap();
        let rd = so3_to_riccati(&sys);
        let (a1, a0) = rd.linear_form(&t).unwrap();
        let t = t.with_free("y").with_ode("y", 2, &(-(&a1 * Expr::jet("y", 1)) - &a0 * Expr::sym("y"))).unwrap();
        let theta = rd.theta_from(&Expr::sym("y"), &t).unwrap();
        assert!(rd.defect(&theta, &t).unwrap().is_zero());
        let zero = OrthogonalSystem::new(Expr::one(), -Expr::i(), Expr::zero(), DerivationTable::new()).unwrap();
        assert!(matches!(so3_to_riccati(&zero).linear_form(&DerivationTable::new()), Err(Error::OmegaOneZero)));
    }
}
