//! Floating-point evaluation of rational functions.
//!
//! A [`RatFn`] is compiled once into flat slot tables with `f64` coefficients,
//! then evaluated cheaply at many points (the integrator calls this in its
//! inner loop).

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::poly::{Atom, Poly};
use super::ratfn::RatFn;
use crate::error::{Error, Result};

/// Values for `x`, parameters and symbols, keyed by display name
/// (`"x"`, `"m"`, `"y1'"`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Bindings(pub BTreeMap<String, Complex64>);

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, v: impl Into<Complex64>) -> Self {
        self.0.insert(name.to_string(), v.into());
        self
    }

    pub fn set(&mut self, name: &str, v: impl Into<Complex64>) {
        self.0.insert(name.to_string(), v.into());
    }

    pub fn get(&self, name: &str) -> Option<Complex64> {
        self.0.get(name).copied()
    }
}

#[derive(Clone, Debug)]
struct CPoly(Vec<(Complex64, Vec<(usize, i32)>)>);

#[derive(Clone, Debug)]
struct CRat {
    num: CPoly,
    den: Vec<(CPoly, u32)>,
}

#[derive(Clone, Debug)]
enum Slot {
    Var(usize),
    Sqrt(CPoly),
    Exp(CRat),
}

/// A compiled rational function.
#[derive(Clone, Debug)]
pub struct Compiled {
    vars: Vec<String>,
    slots: Vec<Slot>,
    slot_of: Vec<Atom>,
    body: CRat,
}

impl Compiled {
    pub fn new(f: &RatFn) -> Compiled {
        let mut c = Compiled {
            vars: Vec::new(),
            slots: Vec::new(),
            slot_of: Vec::new(),
            body: CRat { num: CPoly(Vec::new()), den: Vec::new() },
        };
        c.body = c.rat(f);
        c
    }

    /// Names that must be bound, `"x"` included when it occurs.
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    fn slot(&mut self, a: &Atom) -> usize {
        if let Some(i) = self.slot_of.iter().position(|b| b == a) {
            return i;
        }
        let s = match a {
            Atom::Sqrt(r) => Slot::Sqrt(self.poly(r)),
            Atom::Exp(u) => Slot::Exp(self.rat(u)),
            _ => {
                let name = a.binding_name().expect("named atom");
                let idx = match self.vars.iter().position(|v| *v == name) {
                    Some(i) => i,
                    None => {
                        self.vars.push(name);
                        self.vars.len() - 1
                    }
                };
                Slot::Var(idx)
            }
        };
        self.slots.push(s);
        self.slot_of.push(a.clone());
        self.slots.len() - 1
    }

    fn poly(&mut self, p: &Poly) -> CPoly {
        let mut terms = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let f = m.factors().iter().map(|(a, e)| (self.slot(a), *e)).collect();
            terms.push((c.to_complex(), f));
        }
        CPoly(terms)
    }

    fn rat(&mut self, f: &RatFn) -> CRat {
        let num = self.poly(f.numerator());
        let den = f
            .denominator()
            .iter()
            .map(|(p, e)| (self.poly(p), *e))
            .collect();
        CRat { num, den }
    }

    /// Evaluate with `vals[i]` bound to `vars()[i]`.
    pub fn eval(&self, vals: &[Complex64]) -> Result<Complex64> {
        let x = self
            .vars
            .iter()
            .position(|v| v == "x")
            .map(|i| vals[i].re)
            .unwrap_or(f64::NAN);
        let mut sv = Vec::with_capacity(self.slots.len());
        for s in &self.slots {
            let v = match s {
                Slot::Var(i) => vals[*i],
                Slot::Sqrt(p) => eval_poly(p, &sv, x)?.sqrt(),
                Slot::Exp(r) => eval_rat(r, &sv, x)?.exp(),
            };
            sv.push(v);
        }
        eval_rat(&self.body, &sv, x)
    }

    pub fn eval_bindings(&self, b: &Bindings) -> Result<Complex64> {
        let vals = self
            .vars
            .iter()
            .map(|n| b.get(n).ok_or_else(|| Error::UnboundSymbol(n.clone())))
            .collect::<Result<Vec<_>>>()?;
        self.eval(&vals)
    }
}

fn eval_poly(p: &CPoly, sv: &[Complex64], x: f64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (c, f) in &p.0 {
        let mut t = *c;
        for (i, e) in f {
            let v = sv[*i];
            if *e < 0 && v == Complex64::new(0.0, 0.0) {
                return Err(Error::EvalSingularity { x });
            }
            t *= v.powi(*e);
        }
        acc += t;
    }
    Ok(acc)
}

fn eval_rat(r: &CRat, sv: &[Complex64], x: f64) -> Result<Complex64> {
    let n = eval_poly(&r.num, sv, x)?;
    let mut d = Complex64::new(1.0, 0.0);
    for (p, e) in &r.den {
        d *= eval_poly(p, sv, x)?.powi(*e as i32);
    }
    if d == Complex64::new(0.0, 0.0) {
        return Err(Error::EvalSingularity { x });
    }
    Ok(n / d)
}
