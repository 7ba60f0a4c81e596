//! Derivation tables: how each registered symbol differentiates.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::gauss::GaussRat;
use super::poly::{Atom, Mono, Poly};
use super::ratfn::RatFn;
use super::Expr;
use crate::error::{Error, Result};

/// Differentiation rule for a registered symbol `y`.
#[derive(Clone, Debug, PartialEq)]
pub enum Rule {
    /// Jets `y, y', y'', ...` are independent symbols.
    Free,
    /// `y' = 0`.
    Constant,
    /// `y^(order) = rhs`; lower jets are independent symbols.
    Ode { order: u32, rhs: RatFn },
}

/// Immutable-after-construction map from symbol names to rules.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DerivationTable {
    rules: BTreeMap<Arc<str>, Rule>,
}

impl DerivationTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rules(&self) -> impl Iterator<Item = (&str, &Rule)> {
        self.rules.iter().map(|(k, v)| (k.as_ref(), v))
    }

    pub fn get(&self, name: &str) -> Option<&Rule> {
        self.rules.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.rules.contains_key(name)
    }

    pub fn with_free(mut self, name: &str) -> Self {
        self.rules.insert(name.into(), Rule::Free);
        self
    }

    pub fn with_constant(mut self, name: &str) -> Self {
        self.rules.insert(name.into(), Rule::Constant);
        self
    }

    /// Register `name^(order) = rhs`. Every symbol in `rhs` must already be
    /// known, except lower jets of `name` itself.
    pub fn with_ode(mut self, name: &str, order: u32, rhs: &Expr) -> Result<Self> {
        let rhs = rhs.to_ratfn()?;
        let mut missing = None;
        rhs.visit_atoms(&mut |a| {
            if let Atom::Sym(n, k) = a {
                let own = n.as_ref() == name && *k < order;
                if !own && !self.rules.contains_key(n) && missing.is_none() {
                    missing = Some(n.to_string());
                }
            }
        });
        if let Some(m) = missing {
            return Err(Error::UnknownSymbol(m));
        }
        self.rules.insert(name.into(), Rule::Ode { order, rhs });
        Ok(self)
    }

    /// Union of two tables; entries of `other` win on conflicts.
    pub fn merged(&self, other: &DerivationTable) -> DerivationTable {
        let mut rules = self.rules.clone();
        for (k, v) in &other.rules {
            rules.insert(k.clone(), v.clone());
        }
        DerivationTable { rules }
    }

    /// Replace jets at or above an ODE's order by the rule's right-hand side.
    pub fn reduce(&self, f: &RatFn) -> Result<RatFn> {
        let needs = f.atoms().iter().any(|a| match a {
            Atom::Sym(n, k) => matches!(self.rules.get(n), Some(Rule::Ode { order, .. }) if k >= order),
            Atom::Sqrt(_) | Atom::Exp(_) => true,
            _ => false,
        });
        if !needs {
            return Ok(f.clone());
        }
        let mut d = Differ::new(self);
        super::subst::map_atoms(f, &mut |a| match a {
            Atom::Sym(n, k) => match self.rules.get(n) {
                Some(Rule::Ode { order, .. }) if k >= order => d.jet(n, *k).map(Some),
                _ => Ok(None),
            },
            _ => Ok(None),
        })
    }

    pub fn derive(&self, f: &RatFn) -> Result<RatFn> {
        let f = self.reduce(f)?;
        Differ::new(self).ratfn(&f)
    }
}

/// One differentiation pass with memoized atom derivatives.
pub(crate) struct Differ<'a> {
    table: &'a DerivationTable,
    memo: HashMap<Atom, RatFn>,
}

impl<'a> Differ<'a> {
    pub(crate) fn new(table: &'a DerivationTable) -> Self {
        Differ { table, memo: HashMap::new() }
    }

    /// The k-th jet of `name`, rewritten through the table.
    fn jet(&mut self, name: &Arc<str>, k: u32) -> Result<RatFn> {
        match self.table.rules.get(name) {
            Some(Rule::Ode { order, rhs }) if k >= *order => {
                if k == *order {
                    Ok(rhs.clone())
                } else {
                    let lower = self.jet(name, k - 1)?;
                    self.ratfn(&lower)
                }
            }
            Some(Rule::Constant) if k > 0 => Ok(RatFn::zero()),
            Some(_) => Ok(RatFn::sym(name, k)),
            None => Err(Error::UnknownSymbol(name.to_string())),
        }
    }

    fn atom(&mut self, a: &Atom) -> Result<RatFn> {
        if let Some(d) = self.memo.get(a) {
            return Ok(d.clone());
        }
        let d = match a {
            Atom::X => RatFn::one(),
            Atom::Param(_) => RatFn::zero(),
            Atom::Sym(n, k) => self.jet(n, k + 1)?,
            Atom::Sqrt(r) => {
                let rr = RatFn::from_poly((**r).clone());
                let dr = self.poly(r)?;
                RatFn::atom(a.clone())
                    .mul(&dr)
                    .div(&rr.scale(&GaussRat::int(2)))?
            }
            Atom::Exp(u) => RatFn::atom(a.clone()).mul(&self.ratfn(u)?),
        };
        self.memo.insert(a.clone(), d.clone());
        Ok(d)
    }

    fn poly(&mut self, p: &Poly) -> Result<RatFn> {
        let mut out = RatFn::zero();
        for a in p.atoms() {
            let da = self.atom(&a)?;
            if da.is_zero() {
                continue;
            }
            // formal partial derivative with respect to `a`
            let mut partial = Poly::zero();
            for (m, c) in p.terms() {
                let e = m.exponent(&a);
                if e != 0 {
                    let lowered = m.quotient(&Mono::atom(a.clone(), 1));
                    partial.add_term(lowered, c * &GaussRat::int(e as i64));
                }
            }
            out = out.add(&RatFn::from_poly(partial).mul(&da));
        }
        Ok(out)
    }

    pub(crate) fn ratfn(&mut self, f: &RatFn) -> Result<RatFn> {
        let dn = self.poly(&f.num)?;
        if f.den.is_empty() {
            return Ok(dn);
        }
        let base = RatFn { num: Poly::one(), den: f.den.clone() };
        let numer = RatFn::from_poly(f.num.clone());
        let mut acc = dn;
        for (g, e) in &f.den {
            let dg = self.poly(g)?;
            let ginv = RatFn { num: Poly::one(), den: vec![(g.clone(), 1)] };
            let term = numer
                .mul(&dg)
                .mul(&ginv)
                .scale(&GaussRat::int(*e as i64));
            acc = acc.sub(&term);
        }
        Ok(acc.mul(&base))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_rule() {
        let t = DerivationTable::new();
        let x = RatFn::x();
        let d = t.derive(&x.mul(&x)).unwrap();
        assert!(d.equals(&x.scale(&GaussRat::int(2))));
    }

    #[test]
    fn quotient_rule() {
        // d/dx 1/(x^2+1) = -2x/(x^2+1)^2
        let t = DerivationTable::new();
        let x = RatFn::x();
        let d2 = x.mul(&x).add(&RatFn::one());
        let f = RatFn::one().div(&d2).unwrap();
        let want = x.scale(&GaussRat::int(-2)).div(&d2.mul(&d2)).unwrap();
        assert!(t.derive(&f).unwrap().equals(&want));
    }

    #[test]
    fn unknown_symbol_is_reported() {
        let t = DerivationTable::new();
        assert!(matches!(t.derive(&RatFn::sym("q", 0)), Err(Error::UnknownSymbol(_))));
    }

    #[test]
    fn ode_rule_rewrites_top_jet() {
        // y'' = -y
        let t = DerivationTable::new()
            .with_ode("y", 2, &-Expr::sym("y"))
            .unwrap();
        let yp = RatFn::sym("y", 1);
        assert!(t.derive(&yp).unwrap().equals(&RatFn::sym("y", 0).neg()));
        // a stray y'' in the input is reduced first
        let ypp = RatFn::sym("y", 2);
        assert!(t.reduce(&ypp).unwrap().equals(&RatFn::sym("y", 0).neg()));
    }

    #[test]
    fn rule_may_not_reference_unknown_symbols() {
        let r = DerivationTable::new().with_ode("w", 1, &Expr::sym("p"));
        assert!(matches!(r, Err(Error::UnknownSymbol(s)) if s == "p"));
    }

    #[test]
    fn radical_derivative() {
        let t = DerivationTable::new().with_free("r");
        let r = RatFn::sym("r", 0);
        let s = r.sqrt();
        let want = s
            .mul(&RatFn::sym("r", 1))
            .div(&r.scale(&GaussRat::int(2)))
            .unwrap();
        assert!(t.derive(&s).unwrap().equals(&want));
    }
}
