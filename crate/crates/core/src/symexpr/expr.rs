use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::eval::{Bindings, Compiled};
use super::gauss::GaussRat;
use super::poly::{Atom, Mono, Poly};
use super::ratfn::RatFn;
use super::table::DerivationTable;
use crate::error::Result;

/// A symbolic expression.
///
/// Trees come from parsing or explicit construction; `Normal` holds a
/// canonical rational function. Arithmetic between normalized operands is
/// evaluated eagerly, so code that builds expressions through the operators
/// and constructors below works on canonical forms throughout. Only a
/// division by an expression that is zero stays a tree, to fail on
/// [`Expr::normalize`].
///
/// Equality (`==`) is mathematical: two expressions are equal when their
/// difference normalizes to zero.
#[derive(Clone)]
pub enum Expr {
    Const(GaussRat),
    X,
    Param(Arc<str>),
    /// `Sym(name, k)`: k-th jet of a registered symbol.
    Sym(Arc<str>, u32),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, i64),
    Sqrt(Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Normal(Arc<RatFn>),
}

impl Expr {
    pub fn normal(f: RatFn) -> Expr {
        Expr::Normal(Arc::new(f))
    }

    pub fn zero() -> Expr {
        Expr::normal(RatFn::zero())
    }

    pub fn one() -> Expr {
        Expr::normal(RatFn::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::normal(RatFn::int(n))
    }

    /// `n/d`; panics if `d == 0`.
    pub fn rat(n: i64, d: i64) -> Expr {
        Expr::normal(RatFn::constant(GaussRat::ratio(n, d)))
    }

    pub fn i() -> Expr {
        Expr::normal(RatFn::constant(GaussRat::i()))
    }

    pub fn constant(c: GaussRat) -> Expr {
        Expr::normal(RatFn::constant(c))
    }

    pub fn x() -> Expr {
        Expr::normal(RatFn::x())
    }

    pub fn param(name: &str) -> Expr {
        Expr::normal(RatFn::param(name))
    }

    pub fn sym(name: &str) -> Expr {
        Expr::normal(RatFn::sym(name, 0))
    }

    pub fn jet(name: &str, k: u32) -> Expr {
        Expr::normal(RatFn::sym(name, k))
    }

    pub fn as_ratfn(&self) -> Option<&RatFn> {
        match self {
            Expr::Normal(f) => Some(f),
            _ => None,
        }
    }

    /// Canonical rational function of this expression.
    pub fn to_ratfn(&self) -> Result<RatFn> {
        Ok(match self {
            Expr::Normal(f) => (**f).clone(),
            Expr::Const(c) => RatFn::constant(c.clone()),
            Expr::X => RatFn::x(),
            Expr::Param(n) => RatFn::atom(Atom::Param(n.clone())),
            Expr::Sym(n, k) => RatFn::atom(Atom::Sym(n.clone(), *k)),
            Expr::Add(v) => {
                let mut acc = RatFn::zero();
                for e in v {
                    acc = acc.add(&e.to_ratfn()?);
                }
                acc
            }
            Expr::Mul(v) => {
                let mut acc = RatFn::one();
                for e in v {
                    acc = acc.mul(&e.to_ratfn()?);
                }
                acc
            }
            Expr::Pow(b, n) => b.to_ratfn()?.powi(*n)?,
            Expr::Sqrt(b) => b.to_ratfn()?.sqrt(),
            Expr::Div(a, b) => a.to_ratfn()?.mul(&b.inverse_ratfn()?),
            Expr::Exp(b) => b.to_ratfn()?.exp(),
        })
    }

    /// Inverts powers and products factor by factor, so a printed
    /// denominator `(^ p 2)` comes back as the factor `p` twice rather than
    /// as the expanded polynomial `p^2`.
    fn inverse_ratfn(&self) -> Result<RatFn> {
        match self {
            Expr::Pow(b, n) if *n > 0 => b.inverse_ratfn()?.powi(*n),
            Expr::Mul(v) => {
                let mut acc = RatFn::one();
                for e in v {
                    acc = acc.mul(&e.inverse_ratfn()?);
                }
                Ok(acc)
            }
            _ => self.to_ratfn()?.inv(),
        }
    }

    pub fn normalize(&self) -> Result<Expr> {
        match self {
            Expr::Normal(_) => Ok(self.clone()),
            _ => Ok(Expr::normal(self.to_ratfn()?)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.to_ratfn().map(|f| f.is_zero()).unwrap_or(false)
    }

    pub fn is_one(&self) -> bool {
        self.to_ratfn().map(|f| f.is_one()).unwrap_or(false)
    }

    pub fn as_constant(&self) -> Option<GaussRat> {
        self.to_ratfn().ok()?.as_constant()
    }

    /// Exact mathematical equality.
    pub fn equiv(&self, other: &Expr) -> bool {
        match (self.to_ratfn(), other.to_ratfn()) {
            (Ok(a), Ok(b)) => a.equals(&b),
            _ => false,
        }
    }

    pub fn pow(&self, n: i64) -> Expr {
        if let Expr::Normal(f) = self {
            if let Ok(p) = f.powi(n) {
                return Expr::normal(p);
            }
        }
        Expr::Pow(Box::new(self.clone()), n)
    }

    pub fn sqrt(&self) -> Expr {
        match self {
            Expr::Normal(f) => Expr::normal(f.sqrt()),
            _ => Expr::Sqrt(Box::new(self.clone())),
        }
    }

    pub fn exp(&self) -> Expr {
        match self {
            Expr::Normal(f) => Expr::normal(f.exp()),
            _ => Expr::Exp(Box::new(self.clone())),
        }
    }

    pub fn inv(&self) -> Expr {
        Expr::one() / self.clone()
    }

    pub fn diff(&self, table: &DerivationTable) -> Result<Expr> {
        Ok(Expr::normal(table.derive(&self.to_ratfn()?)?))
    }

    /// Simultaneous substitution of symbols/parameters by name; jets of a
    /// substituted symbol receive derivatives of its image (empty table).
    pub fn subs(&self, map: &[(&str, Expr)]) -> Result<Expr> {
        self.subs_with(map, &DerivationTable::new())
    }

    pub fn subs_with(&self, map: &[(&str, Expr)], table: &DerivationTable) -> Result<Expr> {
        let mut m = std::collections::BTreeMap::new();
        for (k, v) in map {
            m.insert(k.to_string(), v.to_ratfn()?);
        }
        Ok(Expr::normal(super::subst::substitute_with(&self.to_ratfn()?, &m, table)?))
    }

    pub fn eval(&self, b: &Bindings) -> Result<Complex64> {
        Compiled::new(&self.to_ratfn()?).eval_bindings(b)
    }

    pub fn compile(&self) -> Result<Compiled> {
        Ok(Compiled::new(&self.to_ratfn()?))
    }

    /// Names of free parameters and symbols (with primes for jets).
    pub fn free_names(&self) -> Result<Vec<String>> {
        let f = self.to_ratfn()?;
        let mut out: Vec<String> = Vec::new();
        f.visit_atoms(&mut |a| match a {
            Atom::Param(_) | Atom::Sym(..) => {
                let n = a.binding_name().unwrap();
                if !out.contains(&n) {
                    out.push(n);
                }
            }
            _ => {}
        });
        out.sort();
        Ok(out)
    }

    /// True if the expression does not involve `x` or any symbol (it may
    /// still involve parameters).
    pub fn is_x_free(&self) -> Result<bool> {
        let f = self.to_ratfn()?;
        let mut free = true;
        f.visit_atoms(&mut |a| {
            if matches!(a, Atom::X | Atom::Sym(..)) {
                free = false;
            }
        });
        Ok(free)
    }

    /// Coefficients of `param^k` for `k = 0..=max` when the expression is
    /// polynomial in `param`; `None` otherwise.
    pub fn coefficients_in(&self, param: &str) -> Result<Option<Vec<Expr>>> {
        let f = self.to_ratfn()?;
        let atom = Atom::Param(param.into());
        let mut bad = false;
        for (g, _) in f.denominator() {
            if g.atoms().contains(&atom) {
                bad = true;
            }
        }
        let mut inside = false;
        for a in f.atoms() {
            if a.is_special() {
                RatFn::atom(a.clone()).visit_atoms(&mut |b| {
                    if *b == atom {
                        inside = true;
                    }
                });
            }
        }
        if bad || inside {
            return Ok(None);
        }
        let den = RatFn { num: Poly::one(), den: f.den.clone() };
        let mut parts: Vec<Poly> = Vec::new();
        for (m, c) in f.numerator().terms() {
            let e = m.exponent(&atom);
            if e < 0 {
                return Ok(None);
            }
            let e = e as usize;
            while parts.len() <= e {
                parts.push(Poly::zero());
            }
            let rest = m.quotient(&Mono::atom(atom.clone(), e as i32));
            parts[e].add_term(rest, c.clone());
        }
        if parts.is_empty() {
            parts.push(Poly::zero());
        }
        Ok(Some(
            parts
                .into_iter()
                .map(|p| Expr::normal(RatFn::from_poly(p).mul(&den)))
                .collect(),
        ))
    }

    /// Canonical S-expression text; normalized expressions print their
    /// canonical form, trees print structurally.
    pub fn to_sexpr(&self) -> String {
        super::print::sexpr(self)
    }

    pub fn parse(text: &str, params: &[&str]) -> Result<Expr> {
        super::parse::parse(text, params)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_ratfn() {
            Ok(r) => write!(f, "{}", super::print::infix(&r)),
            Err(_) => write!(f, "{}", self.to_sexpr()),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        self.equiv(other)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<GaussRat> for Expr {
    fn from(c: GaussRat) -> Expr {
        Expr::constant(c)
    }
}

impl From<RatFn> for Expr {
    fn from(f: RatFn) -> Expr {
        Expr::normal(f)
    }
}

fn add2(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Normal(x), Expr::Normal(y)) => Expr::normal(x.add(y)),
        _ => Expr::Add(vec![a, b]),
    }
}

fn mul2(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Normal(x), Expr::Normal(y)) => Expr::normal(x.mul(y)),
        _ => Expr::Mul(vec![a, b]),
    }
}

fn div2(a: Expr, b: Expr) -> Expr {
    if let (Expr::Normal(x), Expr::Normal(y)) = (&a, &b) {
        if let Ok(q) = x.div(y) {
            return Expr::normal(q);
        }
    }
    Expr::Div(Box::new(a), Box::new(b))
}

fn neg1(a: Expr) -> Expr {
    match &a {
        Expr::Normal(x) => Expr::normal(x.neg()),
        _ => Expr::Mul(vec![Expr::int(-1), a]),
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                $f(self, o)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr {
                $f(self, o.clone())
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                $f(self.clone(), o)
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr {
                $f(self.clone(), o.clone())
            }
        }
        impl $tr<i64> for Expr {
            type Output = Expr;
            fn $m(self, o: i64) -> Expr {
                $f(self, Expr::int(o))
            }
        }
        impl $tr<i64> for &Expr {
            type Output = Expr;
            fn $m(self, o: i64) -> Expr {
                $f(self.clone(), Expr::int(o))
            }
        }
        impl $tr<Expr> for i64 {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                $f(Expr::int(self), o)
            }
        }
        impl $tr<&Expr> for i64 {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr {
                $f(Expr::int(self), o.clone())
            }
        }
    };
}

binop!(Add, add, add2);
binop!(Mul, mul, mul2);
binop!(Div, div, div2);
binop!(Sub, sub, |a, b| add2(a, neg1(b)));

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        neg1(self)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        neg1(self.clone())
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::one(), |a, b| a * b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn binomial_identity() {
        let x = Expr::x();
        let e = (&x + 1).pow(2) - x.pow(2) - 2 * &x - 1;
        assert!(e.is_zero());
    }

    #[test]
    fn i_times_i() {
        assert_eq!(Expr::i() * Expr::i(), Expr::int(-1));
    }

    #[test]
    fn division_by_zero_surfaces_on_normalize() {
        let e = Expr::x() / (Expr::x() - Expr::x());
        assert!(matches!(e.normalize(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn coefficient_extraction() {
        let m = Expr::param("m");
        let e = Expr::x() * &m * &m - 3 * &m + Expr::sym("q");
        let c = e.coefficients_in("m").unwrap().unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c[0], Expr::sym("q"));
        assert_eq!(c[1], Expr::int(-3));
        assert_eq!(c[2], Expr::x());
    }
}
