//! Independent numerical oracle: classical RK4 on complex states, residual
//! sweeps with finite-difference derivatives, and drift of first integrals.
//!
//! Nothing here uses the symbolic derivative. Symbols that a candidate
//! depends on (`y1`, `theta`, `w`, ...) are integrated from their ODE rules
//! and bound by name along the trajectory.

mod golden;

pub use golden::*;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linsys::LinearSystem;
use crate::matrix::Matrix;
use crate::symexpr::{jet_name, Bindings, Compiled, DerivationTable, Expr, Rule};

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_INTERVAL: (f64, f64) = (0.0, 1.0);

pub type C = Complex64;

/// Uniform grid with one complex state vector per point.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub xs: Vec<f64>,
    pub states: Vec<Vec<C>>,
    /// Binding name of each state component.
    pub names: Vec<String>,
    pub label: String,
}

impl Trajectory {
    /// A grid with no state, for candidates that only depend on `x`.
    pub fn grid(interval: (f64, f64), h: f64) -> Result<Trajectory> {
        let xs = grid(interval, h)?;
        let states = vec![Vec::new(); xs.len()];
        Ok(Trajectory { xs, states, names: Vec::new(), label: "grid".into() })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.xs[1] - self.xs[0]
    }

    pub fn endpoint(&self) -> &[C] {
        self.states.last().expect("non-empty trajectory")
    }

    pub fn component(&self, name: &str) -> Option<Vec<C>> {
        let k = self.names.iter().position(|n| n == name)?;
        Some(self.states.iter().map(|s| s[k]).collect())
    }

    pub fn with_names(mut self, names: &[&str]) -> Trajectory {
        self.names = names.iter().map(|s| s.to_string()).collect();
        self
    }
}

fn grid(interval: (f64, f64), h: f64) -> Result<Vec<f64>> {
    let (a, b) = interval;
    if !(h > 0.0) || !(b > a) {
        return Err(Error::Input(format!("bad grid: interval [{a}, {b}], step {h}")));
    }
    let n = ((b - a) / h).round() as usize;
    if n < 6 {
        return Err(Error::Input("grid needs at least 7 points".into()));
    }
    Ok((0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect())
}

/// Classical fourth-order Runge-Kutta for `y' = f(x, y)`.
pub fn rk4<F>(f: F, y0: &[C], interval: (f64, f64), h: f64) -> Result<Trajectory>
where
    F: Fn(f64, &[C]) -> Result<Vec<C>>,
{
    let xs = grid(interval, h)?;
    let mut states = Vec::with_capacity(xs.len());
    let mut y = y0.to_vec();
    states.push(y.clone());
    let axpy = |y: &[C], k: &[C], s: f64| y.iter().zip(k).map(|(a, b)| a + b * s).collect::<Vec<_>>();
    for w in xs.windows(2) {
        let (x, h) = (w[0], w[1] - w[0]);
        let k1 = f(x, &y)?;
        let k2 = f(x + h / 2.0, &axpy(&y, &k1, h / 2.0))?;
        let k3 = f(x + h / 2.0, &axpy(&y, &k2, h / 2.0))?;
        let k4 = f(x + h, &axpy(&y, &k3, h))?;
        for i in 0..y.len() {
            y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
        if y.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::EvalSingularity { x: w[1] });
        }
        states.push(y.clone());
    }
    let names = (0..y0.len()).map(|i| format!("X{i}")).collect();
    Ok(Trajectory { xs, states, names, label: String::new() })
}

enum Src {
    X,
    State(usize),
    Fixed(C),
}

/// An expression compiled against state names and fixed bindings.
pub struct Evaluator {
    c: Compiled,
    src: Vec<Src>,
}

impl Evaluator {
    pub fn new(e: &Expr, names: &[String], fixed: &Bindings) -> Result<Evaluator> {
        let c = e.compile()?;
        let src = c
            .vars()
            .iter()
            .map(|v| {
                if v == "x" {
                    Ok(Src::X)
                } else if let Some(k) = names.iter().position(|n| n == v) {
                    Ok(Src::State(k))
                } else {
                    fixed.get(v).map(Src::Fixed).ok_or_else(|| Error::UnboundSymbol(v.clone()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Evaluator { c, src })
    }

    pub fn eval(&self, x: f64, state: &[C]) -> Result<C> {
        let vals: Vec<C> = self
            .src
            .iter()
            .map(|s| match s {
                Src::X => C::new(x, 0.0),
                Src::State(k) => state[*k],
                Src::Fixed(v) => *v,
            })
            .collect();
        let v = self.c.eval(&vals).map_err(|e| match e {
            Error::EvalSingularity { .. } | Error::DivisionByZero => Error::EvalSingularity { x },
            e => e,
        })?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::EvalSingularity { x })
        }
    }
}

fn compile_matrix(m: &Matrix, names: &[String], fixed: &Bindings) -> Result<Vec<Evaluator>> {
    m.entries().iter().map(|e| Evaluator::new(e, names, fixed)).collect()
}

fn eval_matrix(ev: &[Evaluator], x: f64, state: &[C]) -> Result<Vec<C>> {
    ev.iter().map(|e| e.eval(x, state)).collect()
}

/// Integrate `X' = -A X` from `x0`; every entry of `A` must be bound by `x`
/// and `params`.
pub fn integrate(system: &LinearSystem, params: &Bindings, x0: &[C], interval: (f64, f64), h: f64) -> Result<Trajectory> {
    let n = system.size();
    if x0.len() != n {
        return Err(Error::DimensionMismatch(format!("initial vector of length {} for size {n}", x0.len())));
    }
    let a = compile_matrix(system.matrix(), &[], params)?;
    let f = |x: f64, y: &[C]| {
        let m = eval_matrix(&a, x, &[])?;
        Ok((0..n).map(|i| -(0..n).map(|j| m[i * n + j] * y[j]).sum::<C>()).collect())
    };
    let mut t = rk4(f, x0, interval, h)?;
    t.label = format!("linear system of size {n}");
    Ok(t)
}

/// Integrate the ODE rules of the named table symbols. Each entry gives a
/// symbol and its initial jets `(s, s', ..., s^(k-1))` for a rule of order `k`.
pub fn integrate_symbols(
    table: &DerivationTable,
    init: &[(&str, Vec<C>)],
    params: &Bindings,
    interval: (f64, f64),
    h: f64,
) -> Result<Trajectory> {
    let mut names = Vec::new();
    let mut y0 = Vec::new();
    let mut rhs = Vec::new();
    for (name, jets) in init {
        let (order, r) = match table.get(name) {
            Some(Rule::Ode { order, rhs }) => (*order, rhs),
            _ => return Err(Error::Input(format!("symbol {name} has no ODE rule to integrate"))),
        };
        if jets.len() != order as usize {
            return Err(Error::Input(format!("{name} needs {order} initial values")));
        }
        for k in 0..order {
            names.push(jet_name(name, k));
        }
        y0.extend_from_slice(jets);
        rhs.push((order as usize, Expr::normal(r.clone())));
    }
    let ev = rhs
        .iter()
        .map(|(o, e)| Ok((*o, Evaluator::new(e, &names, params)?)))
        .collect::<Result<Vec<_>>>()?;
    let f = |x: f64, y: &[C]| {
        let mut out = Vec::with_capacity(y.len());
        let mut base = 0;
        for (order, e) in &ev {
            out.extend_from_slice(&y[base + 1..base + order]);
            out.push(e.eval(x, y)?);
            base += order;
        }
        Ok(out)
    };
    let mut t = rk4(f, &y0, interval, h)?;
    t.names = names;
    t.label = init.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(",");
    Ok(t)
}

fn sample_indices(len: usize, samples: usize) -> Vec<usize> {
    let (lo, hi) = (3, len - 4);
    if samples == 0 || hi <= lo {
        return (lo..=hi).collect();
    }
    let s = samples.min(hi - lo + 1);
    if s == 1 {
        return vec![(lo + hi) / 2];
    }
    (0..s).map(|k| lo + k * (hi - lo) / (s - 1)).collect()
}

/// Max modulus of `D(candidate) + A candidate` over `samples` interior grid
/// points (`0` = all), where `D` is the 7-point central difference on the
/// trajectory grid and the trajectory supplies the symbol values.
pub fn residual_sweep(candidate: &Matrix, system: &LinearSystem, traj: &Trajectory, params: &Bindings, samples: usize) -> Result<f64> {
    let n = system.size();
    if candidate.rows() != n {
        return Err(Error::DimensionMismatch(format!("candidate has {} rows, system size {n}", candidate.rows())));
    }
    if traj.len() < 7 {
        return Err(Error::Input("trajectory too short".into()));
    }
    let k = candidate.cols();
    let cand = compile_matrix(candidate, &traj.names, params)?;
    let a = compile_matrix(system.matrix(), &traj.names, params)?;
    let h = traj.step();
    let at = |i: usize| eval_matrix(&cand, traj.xs[i], &traj.states[i]);
    let mut worst = 0.0f64;
    for i in sample_indices(traj.len(), samples) {
        let v: Vec<Vec<C>> = (i - 3..=i + 3).map(at).collect::<Result<_>>()?;
        let c0 = &v[3];
        let am = eval_matrix(&a, traj.xs[i], &traj.states[i])?;
        for r in 0..n {
            for c in 0..k {
                let e = |j: usize| v[j][r * k + c];
                let d = (e(6) - e(0) - (e(5) - e(1)) * 9.0 + (e(4) - e(2)) * 45.0) / (60.0 * h);
                let ac: C = (0..n).map(|j| am[r * n + j] * c0[j * k + c]).sum();
                worst = worst.max((d + ac).norm());
            }
        }
    }
    Ok(worst)
}

/// Max modulus of a scalar expression along a trajectory.
pub fn max_abs(e: &Expr, traj: &Trajectory, params: &Bindings) -> Result<f64> {
    let ev = Evaluator::new(e, &traj.names, params)?;
    let mut worst = 0.0f64;
    for (x, s) in traj.xs.iter().zip(&traj.states) {
        worst = worst.max(ev.eval(*x, s)?.norm());
    }
    Ok(worst)
}

/// `max |e(t) - e(t_0)|` along the trajectory.
pub fn drift(e: &Expr, traj: &Trajectory, params: &Bindings) -> Result<f64> {
    let ev = Evaluator::new(e, &traj.names, params)?;
    let e0 = ev.eval(traj.xs[0], &traj.states[0])?;
    let mut worst = 0.0f64;
    for (x, s) in traj.xs.iter().zip(&traj.states) {
        worst = worst.max((ev.eval(*x, s)? - e0).norm());
    }
    Ok(worst)
}

/// Machine-readable outcome of one numerical check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, max_residual: f64, tolerance: f64) -> CheckReport {
        CheckReport {
            check: check.into(),
            pass: max_residual.is_finite() && max_residual <= tolerance,
            max_residual,
            tolerance,
            seed: None,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> CheckReport {
        self.note = Some(note.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> CheckReport {
        self.seed = Some(seed);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linsys::{companion, SecondOrderFamily};

    fn harmonic() -> LinearSystem {
        let f = SecondOrderFamily::normal_form(Expr::one(), Expr::one(), "m", DerivationTable::new()).unwrap();
        companion(&f)
    }

    #[test]
    fn cosine_endpoint() {
        let b = Bindings::new().with("m", 0.0);
        let t = integrate(&harmonic(), &b, &[C::new(1.0, 0.0), C::new(0.0, 0.0)], (0.0, 1.0), 1e-3).unwrap();
        let e = t.endpoint();
        assert!((e[0] - C::new(1f64.cos(), 0.0)).norm() < 1e-10);
        assert!((e[1] + C::new(1f64.sin(), 0.0)).norm() < 1e-10);
    }

    #[test]
    fn unbound_and_zero_candidate() {
        let t = Trajectory::grid((0.0, 1.0), 1e-2).unwrap();
        let s = harmonic();
        let b = Bindings::new().with("m", 0.0);
        assert_eq!(residual_sweep(&Matrix::zeros(2, 1), &s, &t, &b, 0).unwrap(), 0.0);
        let cand = Matrix::column(vec![Expr::sym("nope"), Expr::zero()]).unwrap();
        assert!(matches!(residual_sweep(&cand, &s, &t, &b, 5), Err(Error::UnboundSymbol(_))));
        assert!(matches!(residual_sweep(&Matrix::zeros(2, 1), &s, &t, &Bindings::new(), 5), Err(Error::UnboundSymbol(_))));
    }

    #[test]
    fn closed_form_residual() {
        let t = Trajectory::grid((0.0, 1.0), 1e-3).unwrap();
        let e = (Expr::i() * Expr::x()).exp();
        let cand = Matrix::column(vec![e.clone(), &Expr::i() * &e]).unwrap();
        let b = Bindings::new().with("m", 0.0);
        assert!(residual_sweep(&cand, &harmonic(), &t, &b, 0).unwrap() < 1e-9);
        let bad = Matrix::column(vec![e.clone(), -(&Expr::i() * &e) * 2]).unwrap();
        assert!(residual_sweep(&bad, &harmonic(), &t, &b, 5).unwrap() > 1e-2);
    }

    #[test]
    fn symbol_flow_matches_closed_form() {
        let t = DerivationTable::new().with_ode("y", 2, &-Expr::sym("y")).unwrap();
        let tr = integrate_symbols(&t, &[("y", vec![C::new(0.0, 0.0), C::new(1.0, 0.0)])], &Bindings::new(), (0.0, 1.0), 1e-3)
            .unwrap();
        assert_eq!(tr.names, vec!["y".to_string(), "y'".to_string()]);
        assert!((tr.endpoint()[0].re - 1f64.sin()).abs() < 1e-10);
        assert!(drift(&Expr::one(), &tr, &Bindings::new()).unwrap() == 0.0);
        let energy = Expr::sym("y").pow(2) + Expr::jet("y", 1).pow(2);
        assert!(drift(&energy, &tr, &Bindings::new()).unwrap() < 1e-10);
    }

    #[test]
    fn pole_is_reported() {
        let s = LinearSystem::new(Matrix::from_rows(vec![vec![Expr::x().inv()]]).unwrap(), DerivationTable::new()).unwrap();
        let r = integrate(&s, &Bindings::new(), &[C::new(1.0, 0.0)], (-0.5, 0.5), 0.125);
        assert!(matches!(r, Err(Error::EvalSingularity { .. })));
    }

    #[test]
    fn report_serializes() {
        let r = CheckReport::new("c", 1e-12, 1e-8).with_seed(7);
        let j = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<CheckReport>(&j).unwrap(), r);
        assert!(r.pass && !CheckReport::new("d", f64::NAN, 1.0).pass);
    }
}
