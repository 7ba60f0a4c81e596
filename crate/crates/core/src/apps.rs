//! Frenet-Serret frames and the Poisson equation of a rigid body, mapped onto
//! the two orthogonal routes.
//!
//! Both systems are read in the crate convention: `(T, N, B)' = -Omega (T, N, B)`
//! with `Omega = [[0, -kappa, 0], [kappa, 0, -tau], [0, tau, 0]]`, and
//! `gamma' = -Omega gamma` with `Omega = [[0, 0, w2], [0, 0, -w1], [-w2, w1, 0]]`.

use serde::{Deserialize, Serialize};

use crate::darboux::DarbouxSeed;
use crate::error::{Error, Result};
use crate::linsys::{LinearSystem, SecondOrderFamily};
use crate::mat;
use crate::matrix::Matrix;
use crate::symexpr::{DerivationTable, Expr};
use crate::tensordt::{
    fundamental_matrices, q_route_system, s_route_system, t1, t2, FactoredGauge, FundamentalMatrices,
    OrthogonalSystem,
};

/// `Q`: `Z = w Q Sym^2(X)`; `S`: `Z1 = S Sym^2(Delta X)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    Q,
    S,
}

impl std::str::FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Route> {
        match s {
            "Q" | "q" => Ok(Route::Q),
            "S" | "s" => Ok(Route::S),
            _ => Err(Error::Input(format!("unknown route {s:?}, expected Q or S"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FrenetData {
    pub kappa: Expr,
    pub tau: Expr,
    pub route: Route,
    pub table: DerivationTable,
}

#[derive(Clone, Debug)]
pub struct RigidData {
    pub omega1: Expr,
    pub omega2: Expr,
    pub route: Route,
    pub table: DerivationTable,
}

/// Which of the two models an [`Application`] describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    Frenet,
    Rigid,
}

/// A model realized through one route.
#[derive(Clone, Debug)]
pub struct Application {
    pub model: Model,
    pub route: Route,
    pub family: SecondOrderFamily,
    /// Unperturbed orthogonal system (`m = 0`).
    pub system: OrthogonalSystem,
    pub fundamental: FundamentalMatrices,
    /// Identities the route imposed on the input data.
    pub constraints: Vec<String>,
}

impl Application {
    /// The route's 3x3 fundamental matrix (`Z` or `Z1`).
    pub fn z(&self) -> &Matrix {
        match self.route {
            Route::Q => &self.fundamental.z,
            Route::S => &self.fundamental.z1,
        }
    }

    /// Route system with the spectral parameter, `Z' = -(Omega + m N) Z`.
    pub fn route_system(&self) -> Result<LinearSystem> {
        route_system(&self.family, self.route)
    }
}

fn route_system(f: &SecondOrderFamily, route: Route) -> Result<LinearSystem> {
    match route {
        Route::Q => q_route_system(f),
        Route::S => s_route_system(f),
    }
}

pub fn frenet_matrix(kappa: &Expr, tau: &Expr) -> Matrix {
    mat![[Expr::zero(), -kappa, Expr::zero()], [kappa.clone(), Expr::zero(), -tau], [Expr::zero(), tau.clone(), Expr::zero()]]
}

pub fn rigid_matrix(omega1: &Expr, omega2: &Expr) -> Matrix {
    mat![[Expr::zero(), Expr::zero(), omega2.clone()], [Expr::zero(), Expr::zero(), -omega1], [-omega2, omega1.clone(), Expr::zero()]]
}

fn violated(msg: String) -> Error {
    Error::RouteConstraintViolated(msg)
}

fn realize(model: Model, route: Route, f: SecondOrderFamily, target: Matrix, constraints: Vec<String>) -> Result<Application> {
    let sys = route_system(&f, route)?;
    let base = sys.matrix().subs(&[(f.param(), Expr::zero())])?;
    let diff = (&base - &target).reduce(f.table())?;
    if !diff.is_zero() {
        return Err(Error::IdentityFailed(format!("route matrix differs from the model matrix by\n{diff}")));
    }
    let system = OrthogonalSystem::from_matrix(&-&target, f.table().clone())?;
    let fundamental = fundamental_matrices(&f)?;
    Ok(Application { model, route, family: f, system, fundamental, constraints })
}

/// Q route: `tau = -2i`, `p = i kappa`, `q = -1`, `w` registered with
/// `w' = i kappa w`. S route: `w = 2/(i kappa - tau)`, `q = (kappa^2 + tau^2)/4`.
pub fn frenet_family(d: &FrenetData) -> Result<Application> {
    let i = Expr::i();
    let target = frenet_matrix(&d.kappa, &d.tau);
    match d.route {
        Route::Q => {
            let c = (&d.tau + &i * 2).normalize()?;
            if !c.is_zero() {
                return Err(violated(format!("tau + 2i = {c} is not zero")));
            }
            let table = d.table.clone().with_ode("w", 1, &(&i * &d.kappa * Expr::sym("w")))?;
            let f = SecondOrderFamily::new(Expr::sym("w"), Expr::int(-1), Expr::one(), "m", table)?;
            realize(Model::Frenet, Route::Q, f, target, vec!["tau = -2i".into(), "w' = i kappa w".into()])
        }
        Route::S => {
            let eta = (&i * &d.kappa - &d.tau).normalize()?;
            if eta.is_zero() {
                return Err(violated("i kappa - tau vanishes".into()));
            }
            let w = Expr::int(2) / &eta;
            let q = (d.kappa.pow(2) + d.tau.pow(2)) * Expr::rat(1, 4);
            let f = SecondOrderFamily::new(w, q, Expr::one(), "m", d.table.clone())?;
            realize(Model::Frenet, Route::S, f, target, vec!["i kappa - tau != 0".into()])
        }
    }
}

/// Q route: `i w1 + w2 = 2`, `p = 0`, `q = w2 - 1`, `w = 1`.
/// S route: `w2 = 0`, `w = -2/w1`, `q = w1^2/4`.
pub fn rigid_family(d: &RigidData) -> Result<Application> {
    let i = Expr::i();
    let target = rigid_matrix(&d.omega1, &d.omega2);
    match d.route {
        Route::Q => {
            let c = (&i * &d.omega1 + &d.omega2 - 2).normalize()?;
            if !c.is_zero() {
                return Err(violated(format!("i w1 + w2 - 2 = {c} is not zero")));
            }
            let f = SecondOrderFamily::new(Expr::one(), &d.omega2 - 1, Expr::one(), "m", d.table.clone())?;
            realize(Model::Rigid, Route::Q, f, target, vec!["i w1 + w2 = 2".into()])
        }
        Route::S => {
            if !d.omega2.is_zero() {
                return Err(violated(format!("w2 = {} is not zero", d.omega2)));
            }
            if d.omega1.is_zero() {
                return Err(violated("w1 vanishes".into()));
            }
            let w = Expr::int(-2) / &d.omega1;
            let q = d.omega1.pow(2) * Expr::rat(1, 4);
            let f = SecondOrderFamily::new(w, q, Expr::one(), "m", d.table.clone())?;
            realize(Model::Rigid, Route::S, f, target, vec!["w2 = 0".into(), "w1 != 0".into()])
        }
    }
}

/// The two perturbation shapes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Perturbation {
    /// `r [[0, 0, -1], [0, 0, i], [1, -i, 0]]`, first route.
    N3,
    /// `w r [[0, i, 0], [-i, 0, -1], [0, 1, 0]]`, second route.
    N3Hat,
}

#[derive(Clone, Debug)]
pub struct PerturbedSystem {
    /// `Omega + m N` in the `Z' = -A Z` convention.
    pub system: LinearSystem,
    /// Coefficient of `m`.
    pub perturbation: Matrix,
}

pub fn perturbed_system(app: &Application, which: Perturbation) -> Result<PerturbedSystem> {
    match (app.route, which) {
        (Route::Q, Perturbation::N3) | (Route::S, Perturbation::N3Hat) => {}
        _ => return Err(Error::RouteMismatch),
    }
    let system = app.route_system()?;
    let c = system.coefficients_in(app.family.param())?;
    let perturbation = c.get(1).cloned().unwrap_or_else(|| Matrix::zeros(3, 3));
    Ok(PerturbedSystem { system, perturbation })
}

/// Seeds for a chain: explicit log-derivatives (energies inferred, the last
/// one reused) or a fresh Riccati symbol `theta0, theta1, ...` per step.
#[derive(Clone, Debug)]
pub enum SeedChoice {
    Explicit(Vec<Expr>),
    Symbolic,
}

#[derive(Clone, Debug)]
pub struct ChainStep {
    pub family: SecondOrderFamily,
    pub system: LinearSystem,
    /// Gauge from the previous step's system to this one (`T1` on the first
    /// route, `T2` on the second).
    pub transform: Option<FactoredGauge>,
}

/// `k` Darboux steps of an application, lifted to the orthogonal systems.
/// Requires `r = 1`.
pub fn application_chain(app: &Application, seeds: &SeedChoice, k: usize) -> Result<Vec<ChainStep>> {
    if !app.family.r().is_one() {
        return Err(Error::InvalidFamily("application chains require r = 1".into()));
    }
    let mut f = app.family.clone();
    let mut out = vec![ChainStep { system: app.route_system()?, family: f.clone(), transform: None }];
    for step in 0..k {
        let seed = match seeds {
            SeedChoice::Symbolic => DarbouxSeed::symbolic(&f, &format!("theta{step}"), Expr::zero())?,
            SeedChoice::Explicit(t) => {
                let th = t
                    .get(step)
                    .or(t.last())
                    .ok_or_else(|| Error::Input("no seeds given".into()))?;
                DarbouxSeed::infer(&f, th.clone()).map_err(|e| match e {
                    Error::SeedNotSolution { residual, .. } => Error::SeedNotSolution { step, residual },
                    e => e,
                })?
            }
        };
        let fs = f.with_table(seed.table().clone());
        let transform = match app.route {
            Route::Q => t1(&fs, &seed)?,
            Route::S => t2(&fs, &seed)?,
        };
        let g = crate::darboux::darboux_potential(&f, &seed)?;
        out.push(ChainStep { system: route_system(&g, app.route)?, family: g.clone(), transform: Some(transform) });
        f = g;
    }
    Ok(out)
}
