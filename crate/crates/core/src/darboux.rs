//! Darboux transformations of `L_m = d^2 + p d + (q - m r)`: potential map,
//! solution map, gauge matrix and iterated chains.
//!
//! A seed is given by its logarithmic derivative `theta = y0'/y0`, never by
//! `y0` itself. Seeds may sit at a nonzero level `m0` of the family
//! (`L_{m0} y0 = 0`), which is what iterated chains need; the plain case is
//! `m0 = 0`.

use crate::error::{Error, Result};
use crate::linsys::{GaugeMatrix, SecondOrderFamily};
use crate::mat;
use crate::matrix::Matrix;
use crate::symexpr::{DerivationTable, Expr};

/// Symbol used for the seed solution in the compact potential formula.
const SEED_SYMBOL: &str = "y0";

/// Seed data for one transformation step of a given family.
#[derive(Clone, Debug)]
pub struct DarbouxSeed {
    theta: Expr,
    energy: Expr,
    rho: Expr,
    nu: Expr,
    table: DerivationTable,
}

/// `theta' + q + p theta + theta^2 - m0 r`; zero iff the Riccati certificate holds.
pub fn riccati_defect(
    f: &SecondOrderFamily,
    theta: &Expr,
    energy: &Expr,
    table: &DerivationTable,
) -> Result<Expr> {
    let d = theta.diff(table)?;
    let e = d + f.q() + f.p() * theta + theta.pow(2) - energy * f.r();
    Ok(Expr::normal(table.reduce(&e.to_ratfn()?)?))
}

/// `r'/(2r)`.
pub fn r_hat(f: &SecondOrderFamily) -> Result<Expr> {
    Ok(f.r().diff(f.table())? / (f.r() * 2))
}

impl DarbouxSeed {
    /// Seed at `m = 0`: `theta' = -q - p theta - theta^2`.
    pub fn new(f: &SecondOrderFamily, theta: Expr) -> Result<DarbouxSeed> {
        DarbouxSeed::with_energy(f, theta, Expr::zero())
    }

    /// Seed at level `m0`: `theta' = -q - p theta - theta^2 + m0 r`.
    pub fn with_energy(f: &SecondOrderFamily, theta: Expr, energy: Expr) -> Result<DarbouxSeed> {
        DarbouxSeed::build(f, theta, energy, f.table().clone(), 0)
    }

    /// Seed whose level is read off from the Riccati defect, which must be
    /// a constant multiple of `r`.
    pub fn infer(f: &SecondOrderFamily, theta: Expr) -> Result<DarbouxSeed> {
        DarbouxSeed::infer_at(f, theta, 0)
    }

    fn infer_at(f: &SecondOrderFamily, theta: Expr, step: usize) -> Result<DarbouxSeed> {
        let d = riccati_defect(f, &theta, &Expr::zero(), f.table())?;
        let m0 = (d / f.r()).normalize()?;
        let constant = m0.is_x_free()? && !m0.free_names()?.iter().any(|n| n == f.param());
        if !constant {
            return Err(Error::SeedNotSolution { step, residual: m0.to_string() });
        }
        DarbouxSeed::build(f, theta, m0, f.table().clone(), step)
    }

    /// Symbolic seed: registers `name` with the Riccati rule
    /// `name' = -q - p name - name^2 + m0 r` in the family table.
    pub fn symbolic(f: &SecondOrderFamily, name: &str, energy: Expr) -> Result<DarbouxSeed> {
        let theta = Expr::sym(name);
        let rhs = -f.q() - f.p() * &theta - theta.pow(2) + &energy * f.r();
        let table = f.table().clone().with_free(name).with_ode(name, 1, &rhs)?;
        DarbouxSeed::build(f, theta, energy, table, 0)
    }

    fn build(
        f: &SecondOrderFamily,
        theta: Expr,
        energy: Expr,
        table: DerivationTable,
        step: usize,
    ) -> Result<DarbouxSeed> {
        let theta = theta.normalize()?;
        let energy = energy.normalize()?;
        let defect = riccati_defect(f, &theta, &energy, &table)?;
        if !defect.is_zero() {
            return Err(Error::SeedNotSolution { step, residual: defect.to_string() });
        }
        let rho = (-&theta - f.p() - r_hat(f)?).normalize()?;
        let nu = ((f.m() - &energy) * f.r() - &theta * &rho).normalize()?;
        Ok(DarbouxSeed { theta, energy, rho, nu, table })
    }

    pub fn theta(&self) -> &Expr {
        &self.theta
    }

    /// Level `m0` of the seed.
    pub fn energy(&self) -> &Expr {
        &self.energy
    }

    /// `rho = -theta - p - r'/(2r)`.
    pub fn rho(&self) -> &Expr {
        &self.rho
    }

    /// `nu = (m - m0) r - theta rho`.
    pub fn nu(&self) -> &Expr {
        &self.nu
    }

    /// Family table, extended with the seed's rule for symbolic seeds.
    pub fn table(&self) -> &DerivationTable {
        &self.table
    }
}

/// `q0 = 2 theta' + rh' + p' - rh (rh + p + 2 theta)` with `rh = r'/(2r)`.
pub fn potential_shift(f: &SecondOrderFamily, seed: &DarbouxSeed) -> Result<Expr> {
    let t = seed.table();
    let rh = r_hat(f)?;
    let q0 = seed.theta().diff(t)? * 2 + rh.diff(t)? + f.p().diff(t)?
        - &rh * (&rh + f.p() + seed.theta() * 2);
    Ok(Expr::normal(t.reduce(&q0.to_ratfn()?)?))
}

/// Table with the seed solution `y0' = theta y0`.
pub fn seed_table(seed: &DarbouxSeed) -> Result<DerivationTable> {
    let y0 = Expr::sym(SEED_SYMBOL);
    seed.table()
        .clone()
        .with_free(SEED_SYMBOL)
        .with_ode(SEED_SYMBOL, 1, &(seed.theta() * &y0))
}

/// Compact form `u (p/u - (1/u)')' + m0 r` with `u = y0 sqrt(r)`.
///
/// The `m0 r` term vanishes for seeds at `m = 0`.
pub fn compact_potential(f: &SecondOrderFamily, seed: &DarbouxSeed) -> Result<Expr> {
    let t = seed_table(seed)?;
    let u = Expr::sym(SEED_SYMBOL) * f.r().sqrt();
    let inner = f.p() / &u - u.inv().diff(&t)?;
    let q = &u * inner.diff(&t)? + seed.energy() * f.r();
    Ok(Expr::normal(t.reduce(&q.to_ratfn()?)?))
}

/// The transformed family: same `p, r, w` and parameter, `q -> q + q0`.
///
/// The result is cross-checked against [`compact_potential`].
pub fn darboux_potential(f: &SecondOrderFamily, seed: &DarbouxSeed) -> Result<SecondOrderFamily> {
    let defect = riccati_defect(f, seed.theta(), seed.energy(), seed.table())?;
    if !defect.is_zero() {
        return Err(Error::SeedNotSolution { step: 0, residual: defect.to_string() });
    }
    let q = f.q() + potential_shift(f, seed)?;
    let compact = compact_potential(f, seed)?;
    if !(&q - &compact).is_zero() {
        return Err(Error::IdentityFailed(format!(
            "transformed potential {q} disagrees with compact form {compact}"
        )));
    }
    let out = f.with_table(seed.table().clone()).with_q(q)?;
    log::debug!("darboux potential: {}", out.q());
    Ok(out)
}

/// `(y' - theta y)/sqrt(r)` for a solution symbol `y` of `L_m`.
pub fn darboux_solution(f: &SecondOrderFamily, seed: &DarbouxSeed, y: &str) -> Result<Expr> {
    let t = f.with_table(seed.table().clone()).solution_table(&[y])?;
    darboux_map(f, seed, &Expr::sym(y), &t)
}

/// The solution map applied to an arbitrary expression `y`.
pub fn darboux_map(
    f: &SecondOrderFamily,
    seed: &DarbouxSeed,
    y: &Expr,
    table: &DerivationTable,
) -> Result<Expr> {
    Ok((y.diff(table)? - seed.theta() * y) / f.r().sqrt())
}

/// `L~_m ytilde` where `ytilde` is the image of a generic solution `y`;
/// zero when the transformation is correct.
pub fn solution_residual(f: &SecondOrderFamily, seed: &DarbouxSeed, y: &str) -> Result<Expr> {
    let g = darboux_potential(f, seed)?;
    let t = f.with_table(seed.table().clone()).solution_table(&[y])?;
    let yt = darboux_map(f, seed, &Expr::sym(y), &t)?;
    g.apply_in(&yt, &t)
}

/// `ytilde' - rho ytilde - (m - m0) sqrt(r) y`; zero for every solution `y`.
pub fn first_order_link(f: &SecondOrderFamily, seed: &DarbouxSeed, y: &str) -> Result<Expr> {
    let t = f.with_table(seed.table().clone()).solution_table(&[y])?;
    let yv = Expr::sym(y);
    let yt = darboux_map(f, seed, &yv, &t)?;
    let e = yt.diff(&t)? - seed.rho() * &yt - (f.m() - seed.energy()) * f.r().sqrt() * yv;
    Ok(Expr::normal(t.reduce(&e.to_ratfn()?)?))
}

/// `P_m` together with its factors `L_m` and `R`.
#[derive(Clone, Debug)]
pub struct DarbouxGauge {
    pub p: GaugeMatrix,
    /// `[[0, 1], [(m - m0) r, rho]]`; singular at `m = m0`, so kept as a plain matrix.
    pub l: Matrix,
    pub r: GaugeMatrix,
}

/// `P_m = (1/sqrt r) [[-theta, 1], [nu, rho]] = L_m R`, mapping `(y, y')` to
/// `(ytilde, ytilde')`. Use [`crate::linsys::LinearSystem::gauge_forward`]
/// to carry the companion system along.
pub fn darboux_gauge(f: &SecondOrderFamily, seed: &DarbouxSeed) -> Result<DarbouxGauge> {
    let s = f.r().sqrt().inv();
    let th = seed.theta();
    let p = mat![[-th * &s, s.clone()], [seed.nu() * &s, seed.rho() * &s]];
    let l = mat![[0, 1], [(f.m() - seed.energy()) * f.r(), seed.rho().clone()]];
    let r = mat![[s.clone(), Expr::zero()], [-th * &s, s.clone()]];
    Ok(DarbouxGauge { p: GaugeMatrix::new(p)?, l, r: GaugeMatrix::new(r)? })
}

/// Families `f, f1, ..., fk` obtained by `k` successive transformations.
///
/// `thetas[i]` seeds step `i`; the last entry is reused when fewer than `k`
/// are given. Each seed's level is inferred from its Riccati defect.
pub fn darboux_chain(f: &SecondOrderFamily, thetas: &[Expr], k: usize) -> Result<Vec<SecondOrderFamily>> {
    Ok(chain_with_seeds(f, thetas, k)?.into_iter().map(|(g, _)| g).collect())
}

/// Like [`darboux_chain`], also returning the seed used to leave each family.
pub fn chain_with_seeds(
    f: &SecondOrderFamily,
    thetas: &[Expr],
    k: usize,
) -> Result<Vec<(SecondOrderFamily, Option<DarbouxSeed>)>> {
    if k > 0 && thetas.is_empty() {
        return Err(Error::Input("a chain needs at least one seed".into()));
    }
    let mut out = Vec::with_capacity(k + 1);
    let mut cur = f.clone();
    for step in 0..k {
        let theta = thetas[step.min(thetas.len() - 1)].clone();
        let seed = DarbouxSeed::infer_at(&cur, theta, step)?;
        let next = darboux_potential(&cur, &seed)?;
        out.push((cur, Some(seed)));
        cur = next;
    }
    out.push((cur, None));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linsys::companion;

    fn oscillator() -> SecondOrderFamily {
        let x = Expr::x();
        SecondOrderFamily::normal_form(1 - x.pow(2), Expr::one(), "m", DerivationTable::new())
            .unwrap()
    }

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
    fn oscillator_ground_state() {
        let f = oscillator();
        let x = Expr::x();
        let seed = DarbouxSeed::new(&f, -&x).unwrap();
        let g = darboux_potential(&f, &seed).unwrap();
        assert_eq!(*g.q(), -x.pow(2) - 1);
    }

    #[test]
    fn normal_form_shift_is_twice_theta_prime() {
        let t = DerivationTable::new().with_free("q");
        let f = SecondOrderFamily::normal_form(Expr::sym("q"), Expr::one(), "m", t).unwrap();
        let seed = DarbouxSeed::symbolic(&f, "th", Expr::zero()).unwrap();
        let g = darboux_potential(&f, &seed).unwrap();
        let want = Expr::sym("q") + seed.theta().diff(seed.table()).unwrap() * 2;
        assert_eq!(*g.q(), want);
    }

    #[test]
    fn constant_seed_fixes_potential() {
        let c = Expr::rat(3, 2);
        let f = SecondOrderFamily::normal_form(-c.pow(2), Expr::one(), "m", DerivationTable::new())
            .unwrap();
        let seed = DarbouxSeed::new(&f, c).unwrap();
        assert_eq!(*darboux_potential(&f, &seed).unwrap().q(), *f.q());
    }

    #[test]
    fn wrong_seed_is_rejected() {
        let f = oscillator();
        assert!(matches!(
            DarbouxSeed::new(&f, Expr::x()),
            Err(Error::SeedNotSolution { .. })
        ));
    }

    #[test]
    fn generic_covariance() {
        let (f, seed) = generic();
        assert!(solution_residual(&f, &seed, "y").unwrap().is_zero());
        assert!(first_order_link(&f, &seed, "y").unwrap().is_zero());
        let g = darboux_potential(&f, &seed).unwrap();
        let m_part = g.potential().coefficients_in("m").unwrap().unwrap();
        assert_eq!(m_part[1], -f.r());
    }

    #[test]
    fn seed_is_annihilated() {
        let (f, seed) = generic();
        let t = seed_table(&seed).unwrap();
        let y = darboux_map(&f, &seed, &Expr::sym(SEED_SYMBOL), &t).unwrap();
        assert!(y.is_zero());
    }

    #[test]
    fn hermite_image() {
        let f = oscillator();
        let x = Expr::x();
        let seed = DarbouxSeed::new(&f, -&x).unwrap();
        let g = darboux_potential(&f, &seed).unwrap();
        let gauss = (x.pow(2) * Expr::rat(-1, 2)).exp();
        let y = &x * 2 * &gauss;
        let yt = darboux_map(&f, &seed, &y, f.table()).unwrap();
        assert_eq!(yt, &gauss * 2);
        // the image solves the transformed equation at m = -2
        let r = g.apply_in(&yt, f.table()).unwrap();
        assert!(r.subs(&[("m", Expr::int(-2))]).unwrap().is_zero());
    }

    #[test]
    fn gauge_factorization_and_determinant() {
        let (f, seed) = generic();
        let g = darboux_gauge(&f, &seed).unwrap();
        assert!((&g.l * g.r.matrix()).equiv(g.p.matrix()));
        assert_eq!(g.p.det(), -f.m());
    }

    #[test]
    fn gauge_carries_companion_systems() {
        let (f, seed) = generic();
        let g = darboux_gauge(&f, &seed).unwrap();
        let sys = companion(&f).with_table(seed.table().clone());
        let moved = sys.gauge_forward(&g.p).unwrap();
        let target = companion(&darboux_potential(&f, &seed).unwrap());
        assert!(moved.matrix().equiv(target.matrix()));
    }

    #[test]
    fn susy_form_of_the_gauge() {
        let t = DerivationTable::new().with_free("W");
        let f = SecondOrderFamily::normal_form(Expr::sym("q"), Expr::one(), "m", t.with_free("q"))
            .unwrap();
        let w = Expr::sym("W");
        let seed = DarbouxSeed::symbolic(&f, "th", Expr::zero()).unwrap();
        let g = darboux_gauge(&f, &seed).unwrap();
        let lam = Expr::param("lam");
        let p = g.p.matrix().subs(&[("th", -&w), ("m", -&lam)]).unwrap();
        let want = crate::mat![[w.clone(), Expr::one()], [w.pow(2) - &lam, w.clone()]];
        assert!(p.equiv(&want));
    }

    #[test]
    fn oscillator_chain() {
        let f = oscillator();
        let x = Expr::x();
        let chain = darboux_chain(&f, &[-&x], 3).unwrap();
        let qs: Vec<Expr> = chain.iter().map(|g| g.q().clone()).collect();
        let want = [1 - x.pow(2), -x.pow(2) - 1, -x.pow(2) - 3, -x.pow(2) - 5];
        assert_eq!(qs, want);
        assert_eq!(darboux_chain(&f, &[-&x], 0).unwrap().len(), 1);
        for (g, s) in chain_with_seeds(&f, &[-&x], 3).unwrap() {
            if let Some(s) = s {
                assert!(first_order_link(&g, &s, "y").unwrap().is_zero());
                assert!(solution_residual(&g, &s, "y").unwrap().is_zero());
            }
        }
    }

    #[test]
    fn chain_reports_failing_step() {
        let f = oscillator();
        let x = Expr::x();
        let r = darboux_chain(&f, &[-&x, x.pow(3)], 2);
        assert!(matches!(r, Err(Error::SeedNotSolution { step: 1, .. })));
    }
}
