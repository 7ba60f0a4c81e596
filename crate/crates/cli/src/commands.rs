use darbouxkit::apps::{
    application_chain, frenet_family, perturbed_system, rigid_family, ChainStep, Model, Perturbation, SeedChoice,
};
use darbouxkit::darboux::{chain_with_seeds, darboux_gauge, darboux_potential, solution_residual};
use darbouxkit::io::{FamilyJson, GaugeJson, OrthogonalJson, SystemJson, matrix_to_json, from_json};
use darbouxkit::linsys::companion;
use darbouxkit::numverify::{self, check_step, golden_suite, Settings, StepKind};
use darbouxkit::susyqm::{
    matrix_formalism, oscillator_states, partner_potentials, shape_invariance, spectrum, ParametricPotential,
};
use darbouxkit::sympow::{sym2_operator, sym_group, sym_system};
use darbouxkit::tensordt::{q_route, q_route_system, s_route, s_route_system, so3_to_riccati, t1, t2};
use darbouxkit::{
    Application, CheckReport, DarbouxSeed, DerivationTable, Error, Expr, FactoredGauge, FrenetData, LinearSystem,
    Matrix, OrthogonalSystem, Result, RigidData, Route, SecondOrderFamily,
};
use serde_json::{json, Value};

use crate::report::Outcome;
use crate::*;

/// `--family` and `--system` accept inline JSON or a path.
fn read_doc(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| Error::Input(format!("cannot read {arg}: {e}")))
}

fn load_family(arg: &str) -> Result<SecondOrderFamily> {
    from_json::<FamilyJson>(&read_doc(arg)?)?.to_family()
}

/// Parses `text` and registers every unknown symbol in it as free.
fn parse_in(text: &str, params: &[&str], table: &DerivationTable) -> Result<(Expr, DerivationTable)> {
    let e = Expr::parse(text, params)?;
    let mut t = table.clone();
    for n in e.free_names()? {
        let base = n.trim_end_matches('\'');
        if !params.contains(&base) && !t.contains(base) {
            log::info!("registering `{base}` as a free symbol");
            t = t.with_free(base);
        }
    }
    Ok((e, t))
}

fn show(e: &Expr) -> Value {
    json!({ "expr": e.to_sexpr(), "text": e.to_string() })
}

fn value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("artifact types serialize")
}

/// Outcome of an exact identity as a report with tolerance zero.
fn exact(name: &str, holds: bool) -> CheckReport {
    CheckReport::new(name, if holds { 0.0 } else { 1.0 }, 0.0).with_note("exact symbolic identity")
}

fn vanishes(m: &Matrix, table: &DerivationTable) -> Result<bool> {
    Ok(m.reduce(table)?.is_zero())
}

fn same_system(a: &LinearSystem, b: &LinearSystem, table: &DerivationTable) -> Result<bool> {
    vanishes(&(a.matrix() - b.matrix()), table)
}

fn settings(cfg: &RunConfig) -> Settings {
    Settings { h: cfg.step, tol: cfg.tol, interval: cfg.interval, seed: cfg.seed, ..Settings::default() }
}

fn numeric(cfg: &RunConfig, out: Outcome, kind: StepKind, f: &SecondOrderFamily, seed: &DarbouxSeed) -> Outcome {
    if !cfg.check {
        return out;
    }
    match check_step(kind, f, seed, &settings(cfg)) {
        Some(r) => out.check(r.with_seed(cfg.seed)),
        None => out.note("numerical check skipped: the tables contain free symbols"),
    }
}

fn seed_json(s: &DarbouxSeed) -> Value {
    json!({ "theta": show(s.theta()), "energy": show(s.energy()) })
}

fn seed_for(f: &SecondOrderFamily, theta0: Option<&str>, energy: Option<&str>) -> Result<DarbouxSeed> {
    let params = [f.param()];
    let energy = energy.map(|e| Expr::parse(e, &params)).transpose()?;
    match theta0 {
        None => DarbouxSeed::symbolic(f, "theta", energy.unwrap_or_else(Expr::zero)),
        Some(t) => {
            let (th, tab) = parse_in(t, &params, f.table())?;
            let f = f.with_table(tab);
            match energy {
                Some(e) => DarbouxSeed::with_energy(&f, th, e),
                None => DarbouxSeed::infer(&f, th),
            }
        }
    }
}

fn route_system(f: &SecondOrderFamily, route: Route) -> Result<LinearSystem> {
    match route {
        Route::Q => q_route_system(f),
        Route::S => s_route_system(f),
    }
}

pub fn run(cfg: &RunConfig, cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Darboux(DarbouxCmd::Apply { family, theta0, energy }) => {
            darboux_apply(cfg, &family.family, theta0.as_deref(), energy.as_deref())
        }
        Command::Darboux(DarbouxCmd::Chain { family, theta0, k }) => darboux_chain(cfg, &family.family, theta0, *k),
        Command::Sympow(a) => sympow(&a.family.family, a.power as usize),
        Command::So3(So3Cmd::Lift { family, route }) => so3_lift(&family.family, *route),
        Command::So3(So3Cmd::Darboux { family, route, theta0, model }) => {
            so3_darboux(cfg, family.as_deref(), *route, theta0.as_deref(), model)
        }
        Command::So3(So3Cmd::Riccati { system, family, route }) => so3_riccati(system.as_deref(), family.as_deref(), *route),
        Command::Susy(SusyCmd::Partners { w }) => susy_partners(w),
        Command::Susy(SusyCmd::Spectrum { n, potential }) => susy_spectrum(*n, potential),
        Command::Susy(SusyCmd::States { n, order }) => susy_states(*n, *order),
        Command::Frenet(c) => app_command(c, |a, r| frenet_app(a, r)),
        Command::Rigid(c) => app_command(c, |a, r| rigid_app(a, r)),
        Command::Verify(a) => verify(cfg, a),
    }
}

fn darboux_apply(cfg: &RunConfig, family: &str, theta0: Option<&str>, energy: Option<&str>) -> Result<Outcome> {
    let f = load_family(family)?;
    let seed = seed_for(&f, theta0, energy)?;
    let f = f.with_table(seed.table().clone());
    let g = darboux_potential(&f, &seed)?;
    let dg = darboux_gauge(&f, &seed)?;
    let moved = companion(&f).gauge_forward(&dg.p)?;
    let covariant = solution_residual(&f, &seed, "y")?.is_zero();
    let result = json!({
        "input": value(&FamilyJson::from_family(&f)),
        "seed": seed_json(&seed),
        "family": value(&FamilyJson::from_family(&g)),
        "potential": show(g.q()),
        "gauge": {
            "matrix": matrix_to_json(dg.p.matrix()),
            "left": matrix_to_json(&dg.l),
            "right": matrix_to_json(dg.r.matrix()),
        },
    });
    let out = Outcome::new("darboux apply", result)
        .check(exact("solution_residual", covariant))
        .check(exact("gauge_equivalence", same_system(&moved, &companion(&g), seed.table())?));
    Ok(numeric(cfg, out, StepKind::Companion, &f, &seed))
}

fn darboux_chain(cfg: &RunConfig, family: &str, thetas: &[String], k: usize) -> Result<Outcome> {
    let f = load_family(family)?;
    let params = [f.param()];
    let mut table = f.table().clone();
    let mut seeds = Vec::with_capacity(thetas.len());
    for t in thetas {
        let (e, tab) = parse_in(t, &params, &table)?;
        seeds.push(e);
        table = tab;
    }
    let f = f.with_table(table);
    let chain = chain_with_seeds(&f, &seeds, k)?;
    let mut out = Outcome::new("darboux chain", Value::Null);
    let mut steps = Vec::with_capacity(chain.len());
    for (i, (fam, seed)) in chain.iter().enumerate() {
        let mut step = json!({ "step": i, "family": value(&FamilyJson::from_family(fam)), "potential": show(fam.q()) });
        if let Some(s) = seed {
            step["seed"] = seed_json(s);
            out = out.check(exact(&format!("solution_residual[{i}]"), solution_residual(fam, s, "y")?.is_zero()));
            out = numeric(cfg, out, StepKind::Companion, fam, s);
        }
        steps.push(step);
    }
    out.result = json!({ "k": k, "steps": steps });
    Ok(out)
}

fn sympow(family: &str, power: usize) -> Result<Outcome> {
    let f = load_family(family)?;
    let sys = sym_system(&companion(&f), power)?;
    let (x, tab) = f.fundamental("y1", "y2")?;
    let holds = vanishes(&sys.residual_in(&sym_group(&x, power)?, &tab)?, &tab)?;
    let mut result = json!({ "power": power, "system": value(&SystemJson::from_system(&sys)) });
    if power == 2 {
        let (a2, a1, a0) = sym2_operator(&f)?;
        result["operator"] = json!({ "a2": show(&a2), "a1": show(&a1), "a0": show(&a0) });
    }
    Ok(Outcome::new("sympow", result).check(exact("sym_fundamental_residual", holds)))
}

fn so3_lift(family: &str, route: Route) -> Result<Outcome> {
    let f = load_family(family)?;
    let (o, sys) = match route {
        Route::Q => (q_route(&f)?, q_route_system(&f)?),
        Route::S => (s_route(&f)?, s_route_system(&f)?),
    };
    let fm = darbouxkit::tensordt::fundamental_matrices(&f)?;
    let z = if route == Route::Q { &fm.z } else { &fm.z1 };
    let holds = vanishes(&sys.residual_in(z, &fm.table)?, &fm.table)?;
    let result = json!({
        "route": route,
        "system": value(&OrthogonalJson::from_system(&o)),
        "linear": value(&SystemJson::from_system(&sys)),
        "fundamental": matrix_to_json(z),
    });
    Ok(Outcome::new("so3 lift", result).check(exact("fundamental_residual", holds)))
}

fn gauge_checks(out: Outcome, t: &FactoredGauge, from: &LinearSystem, to: &LinearSystem, table: &DerivationTable) -> Result<Outcome> {
    let moved = from.clone().with_table(table.clone()).gauge_forward(&t.gauge)?;
    Ok(out
        .check(exact("diagram_commutes", same_system(&moved, to, table)?))
        .check(exact("factorization", t.factorization_holds())))
}

fn so3_darboux(cfg: &RunConfig, family: Option<&str>, route: Route, theta0: Option<&str>, model: &ModelArgs) -> Result<Outcome> {
    if model.rigid || model.frenet {
        let app = if model.rigid { rigid_app(&model.rigid_data, route)? } else { frenet_app(&model.frenet_data, route)? };
        let seeds = explicit_seeds(&app, theta0.into_iter())?;
        let chain = application_chain(&app, &seeds, 1)?;
        let step = &chain[1];
        let t = step.transform.as_ref().expect("steps after the first carry a transform");
        let table = chain[0].family.table().merged(step.family.table());
        let result = json!({
            "model": model_name(app.model),
            "route": route,
            "gauge": value(&GaugeJson::from_gauge(t)),
            "family": value(&FamilyJson::from_family(&step.family)),
            "system": value(&SystemJson::from_system(&step.system)),
        });
        return gauge_checks(Outcome::new("so3 darboux", result), t, &chain[0].system, &step.system, &table);
    }
    let family = family.ok_or_else(|| Error::Input("give --family, --rigid or --frenet".into()))?;
    let f = load_family(family)?;
    let seed = seed_for(&f, theta0, None)?;
    let fs = f.with_table(seed.table().clone());
    let (t, kind) = match route {
        Route::Q => (t1(&fs, &seed)?, StepKind::QRoute),
        Route::S => (t2(&fs, &seed)?, StepKind::SRoute),
    };
    let g = darboux_potential(&fs, &seed)?;
    let to = route_system(&g, route)?;
    let det = (t.gauge.det() + (fs.m() - seed.energy()).pow(3)).normalize()?.is_zero();
    let result = json!({
        "route": route,
        "seed": seed_json(&seed),
        "gauge": value(&GaugeJson::from_gauge(&t)),
        "family": value(&FamilyJson::from_family(&g)),
        "system": value(&SystemJson::from_system(&to)),
    });
    let out = gauge_checks(Outcome::new("so3 darboux", result), &t, &route_system(&fs, route)?, &to, seed.table())?
        .check(exact("determinant", det));
    Ok(numeric(cfg, out, kind, &fs, &seed))
}

fn so3_riccati(system: Option<&str>, family: Option<&str>, route: Option<Route>) -> Result<Outcome> {
    let sys: OrthogonalSystem = match (system, family, route) {
        (Some(s), _, _) => from_json::<OrthogonalJson>(&read_doc(s)?)?.to_system(&["m"])?,
        (None, Some(f), Some(Route::Q)) => q_route(&load_family(f)?)?,
        (None, Some(f), Some(Route::S)) => s_route(&load_family(f)?)?,
        _ => return Err(Error::Input("give --system, or --family with --route".into())),
    };
    let d = so3_to_riccati(&sys);
    let mut result = json!({
        "system": value(&OrthogonalJson::from_system(&sys)),
        "omega0": show(&d.omega0),
        "omega1": show(&d.omega1),
        "mu": show(&d.mu),
    });
    let mut out = Outcome::new("so3 riccati", Value::Null);
    match d.linear_form(sys.table()) {
        Ok((a1, a0)) => {
            let y = Expr::sym("y");
            let rhs = -(&a1 * Expr::jet("y", 1)) - &a0 * &y;
            let tab = sys.table().clone().with_free("y").with_ode("y", 2, &rhs)?;
            let th = d.theta_from(&y, &tab)?;
            let holds = d.defect(&th, &tab)?.normalize()?.is_zero();
            result["linear_form"] = json!({ "a1": show(&a1), "a0": show(&a0) });
            out = out.check(exact("linear_form_gives_riccati_solution", holds));
        }
        Err(Error::OmegaOneZero) => out = out.note("omega1 = 0: the Riccati equation is linear, no second-order form"),
        Err(e) => return Err(e),
    }
    out.result = result;
    Ok(out)
}

fn susy_partners(w: &str) -> Result<Outcome> {
    let (w, tab) = parse_in(w, &[], &DerivationTable::new())?;
    let pair = partner_potentials(&w, &tab)?;
    let (rm, rp) = pair.factorization_residuals()?;
    let partner = pair.partner_family()?;
    let matches = (partner.q() + &pair.v_plus).normalize()?.is_zero();
    let result = json!({ "w": show(&pair.w), "v_minus": show(&pair.v_minus), "v_plus": show(&pair.v_plus) });
    Ok(Outcome::new("susy partners", result)
        .check(exact("factorization_minus", rm.is_zero()))
        .check(exact("factorization_plus", rp.is_zero()))
        .check(exact("darboux_partner", matches)))
}

fn susy_spectrum(n: usize, p: &PotentialArgs) -> Result<Outcome> {
    let params = [p.param.as_str()];
    let (w, tab) = parse_in(&p.w, &params, &DerivationTable::new())?;
    let pot = ParametricPotential { w, param: p.param.clone(), f: Expr::parse(&p.map, &params)?, table: tab };
    let r = shape_invariance(&pot)?;
    let a0 = Expr::parse(&p.a0, &[])?;
    let energies = spectrum(&pot, &a0, n)?;
    let pair = pot.pair()?;
    let result = json!({
        "w": show(&pot.w),
        "v_minus": show(&pair.v_minus),
        "v_plus": show(&pair.v_plus),
        "remainder": show(&r),
        "parameters": pot.parameters(&a0, n)?.iter().map(show).collect::<Vec<_>>(),
        "energies": energies.iter().map(show).collect::<Vec<_>>(),
    });
    Ok(Outcome::new("susy spectrum", result))
}

fn susy_states(n: usize, order: usize) -> Result<Outcome> {
    let states = oscillator_states(n, order)?;
    let t = DerivationTable::new();
    let mf = matrix_formalism(&partner_potentials(&Expr::x(), &t)?, order)?;
    let mut out = Outcome::new("susy states", Value::Null);
    let mut list = Vec::with_capacity(states.len());
    for (k, s) in states.iter().enumerate() {
        let lambda = Expr::int(2 * k as i64);
        let r = mf.hamiltonian_residual(false, s, &lambda, &t)?;
        out = out.check(exact(&format!("hamiltonian_residual[{k}]"), r.iter().all(Expr::is_zero)));
        list.push(json!({ "n": k, "energy": show(&lambda), "state": s.iter().map(show).collect::<Vec<_>>() }));
    }
    out.result = json!({ "order": order, "states": list });
    Ok(out)
}

fn frenet_app(a: &FrenetArgs, route: Route) -> Result<Application> {
    let (kappa, t) = parse_in(&a.kappa, &[], &DerivationTable::new())?;
    let (tau, t) = parse_in(&a.tau, &[], &t)?;
    frenet_family(&FrenetData { kappa, tau, route, table: t })
}

fn rigid_app(a: &RigidArgs, route: Route) -> Result<Application> {
    let (omega1, t) = parse_in(&a.omega1, &[], &DerivationTable::new())?;
    let (omega2, t) = parse_in(&a.omega2, &[], &t)?;
    rigid_family(&RigidData { omega1, omega2, route, table: t })
}

fn explicit_seeds<'a>(app: &Application, thetas: impl Iterator<Item = &'a str>) -> Result<SeedChoice> {
    let params = [app.family.param()];
    let seeds = thetas
        .map(|t| {
            let (e, tab) = parse_in(t, &params, app.family.table())?;
            if tab.rules().count() != app.family.table().rules().count() {
                return Err(Error::Input(format!("seed {t:?} uses symbols unknown to the family")));
            }
            Ok(e)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(if seeds.is_empty() { SeedChoice::Symbolic } else { SeedChoice::Explicit(seeds) })
}

fn model_name(m: Model) -> &'static str {
    match m {
        Model::Frenet => "frenet",
        Model::Rigid => "rigid",
    }
}

fn app_command<T: clap::Args>(c: &AppCmd<T>, build: impl Fn(&T, Route) -> Result<Application>) -> Result<Outcome> {
    match c {
        AppCmd::Build { data, route } => {
            let app = build(data, *route)?;
            let which = if *route == Route::Q { Perturbation::N3 } else { Perturbation::N3Hat };
            let pert = perturbed_system(&app, which)?;
            let tab = &app.fundamental.table;
            let holds = vanishes(&pert.system.residual_in(app.z(), tab)?, tab)?;
            let name = if app.model == Model::Frenet { "frenet build" } else { "rigid build" };
            let result = json!({
                "model": model_name(app.model),
                "route": app.route,
                "constraints": app.constraints,
                "family": value(&FamilyJson::from_family(&app.family)),
                "system": value(&OrthogonalJson::from_system(&app.system)),
                "perturbed": value(&SystemJson::from_system(&pert.system)),
                "perturbation": matrix_to_json(&pert.perturbation),
                "fundamental": matrix_to_json(app.z()),
            });
            Ok(Outcome::new(name, result).check(exact("fundamental_residual", holds)))
        }
        AppCmd::Chain { data, route, k, theta0 } => {
            let app = build(data, *route)?;
            let seeds = explicit_seeds(&app, theta0.iter().map(String::as_str))?;
            let chain = application_chain(&app, &seeds, *k)?;
            let name = if app.model == Model::Frenet { "frenet chain" } else { "rigid chain" };
            let mut out = Outcome::new(name, Value::Null);
            let mut steps = Vec::with_capacity(chain.len());
            let mut prev: Option<&ChainStep> = None;
            for (i, s) in chain.iter().enumerate() {
                let mut step = json!({
                    "step": i,
                    "family": value(&FamilyJson::from_family(&s.family)),
                    "system": value(&SystemJson::from_system(&s.system)),
                });
                if let (Some(p), Some(t)) = (prev, &s.transform) {
                    step["transform"] = value(&GaugeJson::from_gauge(t));
                    let table = p.family.table().merged(s.family.table());
                    let moved = p.system.clone().with_table(table.clone()).gauge_forward(&t.gauge)?;
                    out = out
                        .check(exact(&format!("diagram_commutes[{i}]"), same_system(&moved, &s.system, &table)?))
                        .check(exact(&format!("factorization[{i}]"), t.factorization_holds()));
                }
                steps.push(step);
                prev = Some(s);
            }
            out.result = json!({ "model": model_name(app.model), "route": app.route, "k": k, "steps": steps });
            Ok(out)
        }
    }
}

fn verify(cfg: &RunConfig, a: &VerifyArgs) -> Result<Outcome> {
    let s = Settings { trials: a.trials, samples: a.samples, ..settings(cfg) };
    let reports: Vec<CheckReport> = match a.only.as_deref() {
        None => golden_suite(&s),
        Some("rk4") => vec![numverify::check_rk4_closed_form(&s), numverify::check_rk4_order(&s)],
        Some("oscillator") => vec![numverify::check_oscillator_state(&s)],
        Some("rigid_norm") => vec![numverify::check_rigid_norm(&s)],
        Some("first_integrals") => numverify::check_first_integrals(&s),
        Some("constructions") => numverify::check_constructions(&s),
        Some("riccati") => vec![numverify::check_riccati_parametrization(&s)],
        Some("susy") => vec![numverify::check_susy_states(&s)],
        Some("applications") => numverify::check_applications(&s),
        Some(o) => return Err(Error::Input(format!("unknown check group {o:?}"))),
    };
    let reports: Vec<_> = reports.into_iter().map(|r| r.with_seed(cfg.seed)).collect();
    let result = json!({ "suite": a.only.as_deref().unwrap_or("all"), "count": reports.len() });
    Ok(Outcome::new("verify", result).checks(reports))
}
