//! The shipped golden suite: every exact construction re-checked numerically
//! at random parameter instantiations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{drift, integrate, max_abs, integrate_symbols, residual_sweep, CheckReport, Trajectory, C};
use crate::apps::{frenet_family, rigid_family, Application, FrenetData, RigidData, Route};
use crate::darboux::{darboux_gauge, darboux_potential, DarbouxSeed};
use crate::error::Result;
use crate::linsys::{companion, LinearSystem, SecondOrderFamily};
use crate::matrix::Matrix;
use crate::susyqm::{matrix_formalism, oscillator_states, partner_potentials};
use crate::symexpr::{Bindings, DerivationTable, Expr};
use crate::sympow::sym_group;
use crate::tensordt::{
    first_integral, fundamental_matrices, integral_vars, q_route_system, riccati_parametrize, s_route_system,
    so3_to_riccati, sym2_companion, t1, t2, IntegralKind, OrthogonalSystem,
};

/// Knobs shared by all golden checks.
#[derive(Clone, Debug)]
pub struct Settings {
    pub h: f64,
    pub tol: f64,
    pub interval: (f64, f64),
    pub seed: u64,
    /// Random parameter instantiations per check.
    pub trials: usize,
    /// Interior grid points per residual sweep (`0` = all).
    pub samples: usize,
}

impl Default for Settings {
    fn default() -> Settings {
        Settings {
            h: super::DEFAULT_STEP,
            tol: super::DEFAULT_TOL,
            interval: super::DEFAULT_INTERVAL,
            seed: 20240611,
            trials: 5,
            samples: 25,
        }
    }
}

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn num(v: f64) -> Expr {
    // exact binary value of an f64 sample
    let (mant, exp) = {
        let bits = v.to_bits();
        let e = ((bits >> 52) & 0x7ff) as i64;
        let m = (bits & ((1u64 << 52) - 1)) as i64;
        if e == 0 {
            (m, -1074)
        } else {
            (m | (1i64 << 52), e - 1075)
        }
    };
    let sign = if v < 0.0 { -1 } else { 1 };
    let m = Expr::int(sign * mant);
    if exp >= 0 {
        m * Expr::int(2).pow(exp)
    } else {
        m / Expr::int(2).pow(-exp)
    }
}

struct Sampler(ChaCha8Rng);

impl Sampler {
    fn new(seed: u64) -> Sampler {
        Sampler(ChaCha8Rng::seed_from_u64(seed))
    }

    /// A short dyadic value in `[lo, hi)`, exact in both worlds.
    fn value(&mut self, lo: f64, hi: f64) -> f64 {
        let v: f64 = self.0.gen_range(lo..hi);
        (v * 64.0).round() / 64.0
    }
}

fn run(name: &str, s: &Settings, tol: f64, f: impl FnOnce() -> Result<f64>) -> CheckReport {
    match f() {
        Ok(v) => CheckReport::new(name, v, tol).with_seed(s.seed),
        Err(e) => {
            log::warn!("{name}: {e}");
            CheckReport::new(name, f64::NAN, tol).with_seed(s.seed).with_note(e.to_string())
        }
    }
}

fn harmonic() -> Result<LinearSystem> {
    let f = SecondOrderFamily::normal_form(Expr::one(), Expr::one(), "m", DerivationTable::new())?;
    Ok(companion(&f))
}

fn cos_error(h: f64) -> Result<f64> {
    let b = Bindings::new().with("m", 0.0);
    let t = integrate(&harmonic()?, &b, &[c(1.0), c(0.0)], (0.0, 1.0), h)?;
    let e = t.endpoint();
    Ok((e[0] - c(1f64.cos())).norm().max((e[1] + c(1f64.sin())).norm()))
}

/// Endpoint error on `y'' = -y`, `y(0) = 1`, against `(cos 1, -sin 1)`.
pub fn check_rk4_closed_form(s: &Settings) -> CheckReport {
    run("rk4_closed_form", s, 1e-10, || cos_error(s.h))
}

/// Ratio of endpoint errors for `h = 0.1` and `h = 0.05`; about 16 for a
/// fourth-order method.
pub fn rk4_order_ratio() -> Result<f64> {
    Ok(cos_error(0.1)? / cos_error(0.05)?)
}

pub fn check_rk4_order(s: &Settings) -> CheckReport {
    run("rk4_order", s, 4.0, || Ok((rk4_order_ratio()? - 16.0).abs()))
}

/// Oscillator at `lambda = 2` (`m = -2`) from `Psi_1(0)` against `Psi_1(1)`.
pub fn check_oscillator_state(s: &Settings) -> CheckReport {
    run("oscillator_state", s, s.tol, || {
        let f = SecondOrderFamily::normal_form(1 - Expr::x().pow(2), Expr::one(), "m", DerivationTable::new())?;
        let psi = &oscillator_states(1, 2)?[1];
        let at = |x: f64| -> Result<Vec<C>> { psi.iter().map(|e| e.eval(&Bindings::new().with("x", x))).collect() };
        let b = Bindings::new().with("m", -2.0);
        let t = integrate(&companion(&f), &b, &at(s.interval.0)?, s.interval, s.h)?;
        let want = at(s.interval.1)?;
        Ok(t.endpoint().iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    })
}

fn unit_columns(n: usize) -> Vec<Vec<C>> {
    (0..n).map(|k| (0..n).map(|i| c(if i == k { 1.0 } else { 0.0 })).collect()).collect()
}

/// Rigid body on the first route with `w2 = 2`, `w1 = 0`: the quadratic norm
/// of each fundamental column is constant.
pub fn check_rigid_norm(s: &Settings) -> CheckReport {
    run("rigid_norm_drift", s, 1e-9, || {
        let app = rigid_family(&RigidData {
            omega1: Expr::zero(),
            omega2: Expr::int(2),
            route: Route::Q,
            table: DerivationTable::new(),
        })?;
        let sys = app.system.to_linear();
        let n = first_integral(IntegralKind::Orthogonal, &Expr::one());
        let mut worst = 0.0f64;
        for col in unit_columns(3) {
            let t = integrate(&sys, &Bindings::new(), &col, s.interval, s.h)?.with_names(&integral_vars(IntegralKind::Orthogonal));
            worst = worst.max(drift(&n, &t, &Bindings::new())?);
        }
        Ok(worst)
    })
}

/// Random family `w = 1 + a x`, `q = b + c x`, `r = 1 + d x^2` and a value of `m`.
struct RandomFamily {
    family: SecondOrderFamily,
    params: Bindings,
    theta0: f64,
}

fn random_family(sm: &mut Sampler, with_r: bool) -> Result<RandomFamily> {
    let (a, b, cc, d) = (sm.value(0.2, 1.0), sm.value(-1.0, 1.0), sm.value(-1.0, 1.0), sm.value(0.2, 1.0));
    let x = Expr::x();
    let w = 1 + &x * num(a);
    let q = num(b) + &x * num(cc);
    let r = if with_r { 1 + x.pow(2) * num(d) } else { Expr::one() };
    let family = SecondOrderFamily::new(w, q, r, "m", DerivationTable::new())?;
    let params = Bindings::new().with("m", sm.value(-1.0, 1.0));
    Ok(RandomFamily { family, params, theta0: sm.value(-0.5, 0.5) })
}

fn max_over(trials: usize, mut f: impl FnMut(usize) -> Result<f64>) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..trials {
        worst = worst.max(f(k)?);
    }
    Ok(worst)
}

/// Drift of `w^2 (4 z1 z3 - z2^2)` on lifted companion trajectories and of
/// `alpha^2 + beta^2 + gamma^2` on first-route trajectories.
pub fn check_first_integrals(s: &Settings) -> Vec<CheckReport> {
    let mut sm = Sampler::new(s.seed ^ 0x11);
    let mut sym2 = 0.0f64;
    let mut orth = 0.0f64;
    let r = (|| -> Result<()> {
        for _ in 0..s.trials {
            let rf = random_family(&mut sm, true)?;
            let x0: Vec<C> = (0..3).map(|_| C::new(sm.value(-1.0, 1.0), sm.value(-1.0, 1.0))).collect();
            let t = integrate(&sym2_companion(&rf.family)?, &rf.params, &x0, s.interval, s.h)?
                .with_names(&integral_vars(IntegralKind::Sym2));
            sym2 = sym2.max(drift(&first_integral(IntegralKind::Sym2, rf.family.w()), &t, &rf.params)?);
            let t = integrate(&q_route_system(&rf.family)?, &rf.params, &x0, s.interval, s.h)?
                .with_names(&integral_vars(IntegralKind::Orthogonal));
            orth = orth.max(drift(&first_integral(IntegralKind::Orthogonal, &Expr::one()), &t, &rf.params)?);
        }
        Ok(())
    })();
    match r {
        Ok(()) => vec![
            CheckReport::new("sym2_integral_drift", sym2, s.tol).with_seed(s.seed),
            CheckReport::new("orthogonal_integral_drift", orth, s.tol).with_seed(s.seed),
        ],
        Err(e) => vec![CheckReport::new("first_integrals", f64::NAN, s.tol).with_seed(s.seed).with_note(e.to_string())],
    }
}

/// Trajectory of `y1, y2` (unit initial data) and the seed symbol.
fn family_flow(rf: &RandomFamily, seed: &DarbouxSeed, s: &Settings) -> Result<(Matrix, DerivationTable, Trajectory)> {
    let (x, tab) = rf.family.fundamental("y1", "y2")?;
    let tab = tab.merged(seed.table());
    let t = integrate_symbols(
        &tab,
        &[("y1", vec![c(1.0), c(0.0)]), ("y2", vec![c(0.0), c(1.0)]), ("theta", vec![c(rf.theta0)])],
        &rf.params,
        s.interval,
        s.h,
    )?;
    Ok((x, tab, t))
}

/// Residual sweeps of the symbolic constructions on random families whose
/// solutions and Riccati seed are integrated numerically.
pub fn check_constructions(s: &Settings) -> Vec<CheckReport> {
    let names = [
        "sym_compatibility",
        "darboux_covariance",
        "q_route_fundamental",
        "s_route_fundamental",
        "t1_diagram",
        "t2_diagram",
    ];
    let mut worst = [0.0f64; 6];
    let mut sm = Sampler::new(s.seed ^ 0x22);
    let r = (|| -> Result<()> {
        for _ in 0..s.trials {
            let rf = random_family(&mut sm, true)?;
            let f = &rf.family;
            let seed = DarbouxSeed::symbolic(f, "theta", Expr::zero())?;
            let (x, _, t) = family_flow(&rf, &seed, s)?;
            let fm = fundamental_matrices(f)?;
            let g = darboux_potential(f, &seed)?;
            let fs = f.with_table(seed.table().clone());
            let pm = darboux_gauge(f, &seed)?.p;
            let sweep = |cand: &Matrix, sys: &LinearSystem| residual_sweep(cand, sys, &t, &rf.params, s.samples);
            let vals = [
                sweep(&sym_group(&x, 2)?, &sym2_companion(f)?)?,
                sweep(&(pm.matrix() * &x), &companion(&g))?,
                sweep(&fm.z, &q_route_system(f)?)?,
                sweep(&fm.z1, &s_route_system(f)?)?,
                sweep(&(t1(&fs, &seed)?.matrix() * &fm.z), &q_route_system(&g)?)?,
                sweep(&(t2(&fs, &seed)?.matrix() * &fm.z1), &s_route_system(&g)?)?,
            ];
            for (w, v) in worst.iter_mut().zip(vals) {
                *w = w.max(v);
            }
        }
        Ok(())
    })();
    match r {
        Ok(()) => names
            .iter()
            .zip(worst)
            .map(|(n, v)| CheckReport::new(*n, v, s.tol).with_seed(s.seed))
            .collect(),
        Err(e) => vec![CheckReport::new("constructions", f64::NAN, s.tol).with_seed(s.seed).with_note(e.to_string())],
    }
}

/// `(alpha, beta, gamma)` built from two integrated Riccati solutions solves
/// a random orthogonal system.
pub fn check_riccati_parametrization(s: &Settings) -> CheckReport {
    let mut sm = Sampler::new(s.seed ^ 0x33);
    run("riccati_parametrization", s, s.tol, || {
        max_over(s.trials, |_| {
            let x = Expr::x();
            let mut lin = || num(sm.value(-1.0, 1.0)) + &x * num(sm.value(-1.0, 1.0));
            let sys = OrthogonalSystem::new(lin(), lin(), lin(), DerivationTable::new())?;
            let rd = so3_to_riccati(&sys);
            let rule = |n: &str| {
                let t = Expr::sym(n);
                &rd.omega0 + &rd.mu * &t + &rd.omega1 * t.pow(2)
            };
            let tab = DerivationTable::new().with_ode("u", 1, &rule("u"))?.with_ode("v", 1, &rule("v"))?;
            let (u0, v0) = (sm.value(0.5, 1.0), sm.value(-1.0, -0.5));
            let t = integrate_symbols(&tab, &[("u", vec![c(u0)]), ("v", vec![c(v0)])], &Bindings::new(), s.interval, s.h * 0.5)?;
            let cand = Matrix::column(riccati_parametrize(&Expr::sym("u"), &Expr::sym("v")).to_vec())?;
            residual_sweep(&cand, &sys.to_linear(), &t, &Bindings::new(), s.samples)
        })
    })
}

/// Oscillator states `Psi_n`, `n <= 5`, against `-Psi' + V_- Psi = 2n (-N) Psi`
/// in both matrix formalisms. States are unnormalized (entries reach 1e4 at
/// `n = 5`), so the residual is taken relative to each state's sup norm.
pub fn check_susy_states(s: &Settings) -> CheckReport {
    run("susy_states", s, s.tol, || {
        let pair = partner_potentials(&Expr::x(), &DerivationTable::new())?;
        let grid = Trajectory::grid(s.interval, s.h)?;
        let mut worst = 0.0f64;
        for order in [2, 3] {
            let mf = matrix_formalism(&pair, order)?;
            for (n, psi) in oscillator_states(5, order)?.into_iter().enumerate() {
                let a = &mf.energy_matrix(&Expr::int(2 * n as i64)) - &mf.v_minus;
                let sys = LinearSystem::new(a, DerivationTable::new())?;
                let scale = psi.iter().map(|e| max_abs(e, &grid, &Bindings::new())).collect::<Result<Vec<_>>>()?;
                let scale = scale.into_iter().fold(0.0, f64::max);
                let r = residual_sweep(&Matrix::column(psi)?, &sys, &grid, &Bindings::new(), s.samples)?;
                worst = worst.max(r / scale);
            }
        }
        Ok(worst)
    })
}

fn app_sweep(app: &Application, params: &Bindings, s: &Settings) -> Result<f64> {
    let mut init = vec![("y1", vec![c(1.0), c(0.0)]), ("y2", vec![c(0.0), c(1.0)])];
    if app.fundamental.table.contains("w") && !app.family.w().free_names()?.is_empty() {
        init.push(("w", vec![c(1.0)]));
    }
    let t = integrate_symbols(&app.fundamental.table, &init, params, s.interval, s.h)?;
    residual_sweep(app.z(), &app.route_system()?, &t, params, s.samples)
}

/// Both Frenet routes and both rigid routes at random data.
pub fn check_applications(s: &Settings) -> Vec<CheckReport> {
    let mut sm = Sampler::new(s.seed ^ 0x44);
    let x = Expr::x();
    let i = Expr::i();
    let mut out = Vec::new();
    for (name, route, frenet) in [
        ("frenet_q_route", Route::Q, true),
        ("frenet_s_route", Route::S, true),
        ("rigid_q_route", Route::Q, false),
        ("rigid_s_route", Route::S, false),
    ] {
        out.push(run(name, s, s.tol, || {
            max_over(s.trials, |_| {
                let lin = |sm: &mut Sampler| num(sm.value(0.5, 1.5)) + &x * num(sm.value(0.0, 1.0));
                let table = DerivationTable::new();
                let app = if frenet {
                    let kappa = lin(&mut sm);
                    let tau = if route == Route::Q { -(&i * 2) } else { lin(&mut sm) };
                    frenet_family(&FrenetData { kappa, tau, route, table })?
                } else {
                    let omega1 = lin(&mut sm);
                    let omega2 = if route == Route::Q { 2 - &i * &omega1 } else { Expr::zero() };
                    rigid_family(&RigidData { omega1, omega2, route, table })?
                };
                let params = Bindings::new().with("m", sm.value(-1.0, 1.0));
                app_sweep(&app, &params, s)
            })
        }));
    }
    out
}

/// Level at which a Darboux step is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// `P_m X` against the transformed companion system.
    Companion,
    /// `P_{1,m} Sym^2(X)` against the transformed lifted system.
    Sym2,
    /// `T_{1,m} Z` against the transformed first-route system.
    QRoute,
    /// `T_{2,m} Z1` against the transformed second-route system.
    SRoute,
}

/// Numerical check of one Darboux step. Every ODE symbol of the family and
/// seed tables is integrated (first jets sampled in `[0.5, 1)`, higher jets
/// zero) and `m` is sampled per trial. Returns `None` when the tables contain
/// free symbols, which have no numerical value.
pub fn check_step(kind: StepKind, f: &SecondOrderFamily, seed: &DarbouxSeed, s: &Settings) -> Option<CheckReport> {
    let (x, tab) = match f.fundamental("y1", "y2") {
        Ok(v) => v,
        Err(e) => return Some(CheckReport::new("step", f64::NAN, s.tol).with_note(e.to_string())),
    };
    let tab = tab.merged(seed.table());
    if tab.rules().any(|(_, r)| matches!(r, crate::symexpr::Rule::Free)) {
        return None;
    }
    let name = match kind {
        StepKind::Companion => "step_companion",
        StepKind::Sym2 => "step_sym2",
        StepKind::QRoute => "step_q_route",
        StepKind::SRoute => "step_s_route",
    };
    let mut sm = Sampler::new(s.seed ^ 0x55);
    Some(run(name, s, s.tol, || {
        let g = darboux_potential(f, seed)?;
        let fs = f.with_table(seed.table().clone());
        let (cand, sys) = match kind {
            StepKind::Companion => (darboux_gauge(f, seed)?.p.matrix() * &x, companion(&g)),
            StepKind::Sym2 => (crate::tensordt::p1(&fs, seed)?.matrix() * &sym_group(&x, 2)?, sym2_companion(&g)?),
            StepKind::QRoute => (t1(&fs, seed)?.matrix() * &fundamental_matrices(f)?.z, q_route_system(&g)?),
            StepKind::SRoute => (t2(&fs, seed)?.matrix() * &fundamental_matrices(f)?.z1, s_route_system(&g)?),
        };
        max_over(s.trials, |_| {
            let mut init: Vec<(&str, Vec<C>)> = Vec::new();
            for (n, r) in tab.rules() {
                if let crate::symexpr::Rule::Ode { order, .. } = r {
                    let jets = match n {
                        "y1" => vec![c(1.0), c(0.0)],
                        "y2" => vec![c(0.0), c(1.0)],
                        _ => (0..*order).map(|k| c(if k == 0 { sm.value(0.5, 1.0) } else { 0.0 })).collect(),
                    };
                    init.push((n, jets));
                }
            }
            let params = Bindings::new().with(f.param(), sm.value(-1.0, 1.0));
            let t = integrate_symbols(&tab, &init, &params, s.interval, s.h)?;
            residual_sweep(&cand, &sys, &t, &params, s.samples)
        })
    }))
}

/// Every golden check.
pub fn golden_suite(s: &Settings) -> Vec<CheckReport> {
    let mut out = vec![
        check_rk4_closed_form(s),
        check_rk4_order(s),
        check_oscillator_state(s),
        check_rigid_norm(s),
    ];
    out.extend(check_first_integrals(s));
    out.extend(check_constructions(s));
    out.push(check_riccati_parametrization(s));
    out.push(check_susy_states(s));
    out.extend(check_applications(s));
    out
}
