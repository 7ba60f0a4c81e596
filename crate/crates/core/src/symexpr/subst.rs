//! Atom-wise rewriting and simultaneous substitution.

use std::collections::{BTreeMap, HashMap};

use super::poly::{Atom, Poly};
use super::ratfn::RatFn;
use super::table::DerivationTable;
use crate::error::{Error, Result};

/// Rebuild `f` with every atom replaced by `g(atom)` when it returns
/// `Some`. Radicands and exponents are rewritten recursively.
pub(crate) fn map_atoms(
    f: &RatFn,
    g: &mut dyn FnMut(&Atom) -> Result<Option<RatFn>>,
) -> Result<RatFn> {
    let mut cache: HashMap<Atom, Option<RatFn>> = HashMap::new();
    let num = map_poly(&f.num, g, &mut cache)?
        .unwrap_or_else(|| RatFn::from_poly(f.num.clone()));
    if f.den.is_empty() {
        return Ok(num);
    }
    let mut den = RatFn::one();
    for (p, e) in &f.den {
        let img = map_poly(p, g, &mut cache)?.unwrap_or_else(|| RatFn::from_poly(p.clone()));
        den = den.mul(&img.powi(*e as i64)?);
    }
    num.div(&den)
}

/// `None` when no atom of `p` changes.
fn map_poly(
    p: &Poly,
    g: &mut dyn FnMut(&Atom) -> Result<Option<RatFn>>,
    cache: &mut HashMap<Atom, Option<RatFn>>,
) -> Result<Option<RatFn>> {
    let mut changed = false;
    for a in p.atoms() {
        if !cache.contains_key(&a) {
            let img = image(&a, g)?;
            cache.insert(a.clone(), img);
        }
        changed |= cache[&a].is_some();
    }
    if !changed {
        return Ok(None);
    }
    let mut out = RatFn::zero();
    for (m, c) in p.terms() {
        let mut t = RatFn::constant(c.clone());
        for (a, e) in m.factors() {
            let base = match &cache[a] {
                Some(r) => r.clone(),
                None => RatFn::atom(a.clone()),
            };
            t = t.mul(&base.powi(*e as i64)?);
        }
        out = out.add(&t);
    }
    Ok(Some(out))
}

fn image(a: &Atom, g: &mut dyn FnMut(&Atom) -> Result<Option<RatFn>>) -> Result<Option<RatFn>> {
    if let Some(r) = g(a)? {
        return Ok(Some(r));
    }
    match a {
        Atom::Sqrt(r) => {
            let inner = RatFn::from_poly((**r).clone());
            let mapped = map_atoms(&inner, g)?;
            if mapped == inner {
                Ok(None)
            } else {
                Ok(Some(mapped.sqrt()))
            }
        }
        Atom::Exp(u) => {
            let mapped = map_atoms(u, g)?;
            if &mapped == u.as_ref() {
                Ok(None)
            } else {
                Ok(Some(mapped.exp()))
            }
        }
        _ => Ok(None),
    }
}

/// Simultaneous substitution of parameters and symbols by name. A jet
/// `name^(k)` with `k > 0` is replaced by the k-th derivative of the image,
/// computed under `table`.
pub fn substitute_with(
    f: &RatFn,
    map: &BTreeMap<String, RatFn>,
    table: &DerivationTable,
) -> Result<RatFn> {
    if map.is_empty() {
        return Ok(f.clone());
    }
    map_atoms(f, &mut |a| match a {
        Atom::Param(n) => Ok(map.get(n.as_ref()).cloned()),
        Atom::Sym(n, k) => match map.get(n.as_ref()) {
            None => Ok(None),
            Some(img) => {
                let mut d = img.clone();
                for _ in 0..*k {
                    d = table.derive(&d).map_err(|e| match e {
                        Error::UnknownSymbol(s) => Error::UnknownSymbol(format!(
                            "{s} (needed for the jet {n}{})",
                            "'".repeat(*k as usize)
                        )),
                        other => other,
                    })?;
                }
                Ok(Some(d))
            }
        },
        _ => Ok(None),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::gauss::GaussRat;

    #[test]
    fn substitute_symbol_and_its_jet() {
        // q + 2 th'  with th -> -x  gives q - 2
        let e = RatFn::sym("q", 0).add(&RatFn::sym("th", 1).scale(&GaussRat::int(2)));
        let map = BTreeMap::from([("th".to_string(), RatFn::x().neg())]);
        let out = substitute_with(&e, &map, &DerivationTable::new()).unwrap();
        assert!(out.equals(&RatFn::sym("q", 0).sub(&RatFn::int(2))));
    }

    #[test]
    fn substitution_into_denominators_and_radicals() {
        let m = RatFn::param("m");
        let f = RatFn::one().div(&m.add(&RatFn::x())).unwrap();
        let map = BTreeMap::from([("m".to_string(), RatFn::int(1))]);
        let out = substitute_with(&f, &map, &DerivationTable::new()).unwrap();
        assert!(out.equals(&RatFn::one().div(&RatFn::x().add(&RatFn::one())).unwrap()));

        let r = RatFn::sym("r", 0).sqrt();
        let map = BTreeMap::from([("r".to_string(), RatFn::int(9))]);
        let out = substitute_with(&r, &map, &DerivationTable::new()).unwrap();
        assert!(out.equals(&RatFn::int(3)));
    }

    #[test]
    fn substituting_a_pole_fails() {
        let f = RatFn::one().div(&RatFn::param("m")).unwrap();
        let map = BTreeMap::from([("m".to_string(), RatFn::zero())]);
        assert!(matches!(
            substitute_with(&f, &map, &DerivationTable::new()),
            Err(Error::DivisionByZero)
        ));
    }
}
