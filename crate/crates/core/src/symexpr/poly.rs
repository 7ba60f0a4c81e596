//! Laurent polynomials over Q(i) in a set of atoms.
//!
//! Atoms are the independent variable `x`, constant parameters, jet symbols
//! (`q`, `q'`, ...), square roots of polynomials and exponentials. A square root
//! atom `s = sqrt(R)` only ever appears with exponent 1 (`s^2` is rewritten to
//! `R`), and every monomial carries at most one exponential atom, so the
//! representation stays canonical under multiplication.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use super::gauss::GaussRat;
use super::ratfn::RatFn;

/// An indeterminate of the polynomial ring.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    X,
    Param(Arc<str>),
    /// `Sym(name, k)` is the k-th derivative of the registered symbol `name`.
    Sym(Arc<str>, u32),
    Sqrt(Arc<Poly>),
    Exp(Arc<RatFn>),
}

impl Atom {
    pub fn is_special(&self) -> bool {
        matches!(self, Atom::Sqrt(_) | Atom::Exp(_))
    }

    /// Display name used for symbols and parameters in bindings.
    pub fn binding_name(&self) -> Option<String> {
        match self {
            Atom::X => Some("x".into()),
            Atom::Param(n) => Some(n.to_string()),
            Atom::Sym(n, k) => Some(jet_name(n, *k)),
            _ => None,
        }
    }
}

/// `y1` with k primes appended.
pub fn jet_name(name: &str, k: u32) -> String {
    let mut s = String::with_capacity(name.len() + k as usize);
    s.push_str(name);
    for _ in 0..k {
        s.push('\'');
    }
    s
}

/// A Laurent monomial: sorted atoms with non-zero integer exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Mono(pub(crate) Vec<(Atom, i32)>);

impl Mono {
    pub fn one() -> Mono {
        Mono(Vec::new())
    }

    pub fn atom(a: Atom, e: i32) -> Mono {
        if e == 0 {
            Mono::one()
        } else {
            Mono(vec![(a, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Atom, i32)] {
        &self.0
    }

    pub fn exponent(&self, a: &Atom) -> i32 {
        self.0
            .binary_search_by(|(b, _)| b.cmp(a))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub(crate) fn has_special(&self) -> bool {
        self.0.iter().any(|(a, _)| a.is_special())
    }

    /// Exponent-wise sum without any algebraic reduction.
    pub(crate) fn merge(&self, other: &Mono) -> Mono {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Mono(out)
    }

    /// Exponent-wise difference without reduction.
    pub(crate) fn quotient(&self, by: &Mono) -> Mono {
        self.merge(&by.negated())
    }

    pub(crate) fn negated(&self) -> Mono {
        Mono(self.0.iter().map(|(a, e)| (a.clone(), -e)).collect())
    }

    /// True when every exponent of `self` is at most the one in `other`.
    pub(crate) fn divides(&self, other: &Mono) -> bool {
        self.0.iter().all(|(a, e)| other.exponent(a) >= *e)
    }

    /// Pure lexicographic comparison, atoms ordered ascending by `Atom`'s `Ord`
    /// (the smallest atom is the most significant variable).
    pub(crate) fn lex_cmp(&self, other: &Mono) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some((_, e)), None) => return e.cmp(&0),
                (None, Some((_, e))) => return 0.cmp(e),
                (Some((x, ex)), Some((y, ey))) => match x.cmp(y) {
                    Ordering::Less => return ex.cmp(&0),
                    Ordering::Greater => return 0.cmp(ey),
                    Ordering::Equal => {
                        if ex != ey {
                            return ex.cmp(ey);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

/// Product of two monomials with `sqrt(R)^2 = R` and exponential merging.
pub(crate) fn mono_mul(a: &Mono, b: &Mono) -> Poly {
    let m = a.merge(b);
    if m.has_special() {
        canonical_mono(m)
    } else {
        Poly::monomial(m, GaussRat::one())
    }
}

fn canonical_mono(m: Mono) -> Poly {
    let mut plain = Vec::with_capacity(m.0.len());
    let mut extra: Option<Poly> = None;
    let mut exps: Vec<(Arc<RatFn>, i32)> = Vec::new();
    for (a, e) in m.0 {
        match a {
            Atom::Sqrt(r) => {
                debug_assert!(e > 0, "negative radical exponent");
                let half = e / 2;
                if half > 0 {
                    let p = r.pow(half as u32);
                    extra = Some(match extra {
                        Some(x) => x.mul(&p),
                        None => p,
                    });
                }
                if e % 2 == 1 {
                    plain.push((Atom::Sqrt(r), 1));
                }
            }
            Atom::Exp(u) => exps.push((u, e)),
            other => plain.push((other, e)),
        }
    }
    match exps.len() {
        0 => {}
        1 if exps[0].1 == 1 => plain.push((Atom::Exp(exps.pop().unwrap().0), 1)),
        _ => {
            let mut arg = RatFn::zero();
            for (u, e) in &exps {
                arg = arg.add(&u.scale(&GaussRat::int(*e as i64)));
            }
            if !arg.is_zero() {
                plain.push((Atom::Exp(Arc::new(arg)), 1));
            }
        }
    }
    let base = Poly::monomial(Mono(plain), GaussRat::one());
    match extra {
        Some(x) => base.mul(&x),
        None => base,
    }
}

/// Finite sum of monomials with Gaussian-rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    pub(crate) terms: BTreeMap<Mono, GaussRat>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(GaussRat::one())
    }

    pub fn constant(c: GaussRat) -> Poly {
        Poly::monomial(Mono::one(), c)
    }

    pub fn monomial(m: Mono, c: GaussRat) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn atom(a: Atom) -> Poly {
        Poly::monomial(Mono::atom(a, 1), GaussRat::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &GaussRat)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<GaussRat> {
        match self.terms.len() {
            0 => Some(GaussRat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn as_monomial(&self) -> Option<(&Mono, &GaussRat)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub(crate) fn add_term(&mut self, m: Mono, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (mut big, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, k: &GaussRat) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                let merged = ma.merge(mb);
                if merged.has_special() {
                    for (m, k) in canonical_mono(merged).terms {
                        out.add_term(m, &k * &c);
                    }
                } else {
                    out.add_term(merged, c);
                }
            }
        }
        out
    }

    /// Multiply by a monomial, applying the same reductions as `mul`.
    pub fn mul_mono(&self, m: &Mono) -> Poly {
        let mut out = Poly::zero();
        for (t, c) in &self.terms {
            for (r, k) in mono_mul(t, m).terms {
                out.add_term(r, &k * c);
            }
        }
        out
    }

    /// Multiply by a monomial by adding exponents only; the caller guarantees
    /// that no radical or exponential atoms collide.
    pub(crate) fn shift(&self, m: &Mono) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(t, c)| (t.merge(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// All atoms occurring at top level.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut set: Vec<Atom> = Vec::new();
        for m in self.terms.keys() {
            for (a, _) in &m.0 {
                if let Err(pos) = set.binary_search(a) {
                    set.insert(pos, a.clone());
                }
            }
        }
        set
    }

    pub(crate) fn has_special(&self) -> bool {
        self.terms.keys().any(|m| m.has_special())
    }

    pub(crate) fn has_sqrt(&self) -> bool {
        self.terms
            .keys()
            .any(|m| m.0.iter().any(|(a, _)| matches!(a, Atom::Sqrt(_))))
    }

    /// Largest monomial in every atom: the exponent-wise minimum over terms.
    pub fn content(&self) -> Mono {
        let mut it = self.terms.keys();
        let first = match it.next() {
            Some(m) => m,
            None => return Mono::one(),
        };
        let mut acc: BTreeMap<Atom, i32> = first.0.iter().cloned().collect();
        for m in it {
            for (a, e) in acc.iter_mut() {
                *e = (*e).min(m.exponent(a));
            }
            for (a, e) in &m.0 {
                if *e < 0 && !acc.contains_key(a) {
                    acc.insert(a.clone(), *e);
                }
            }
        }
        // an atom first met with a negative exponent was absent (exponent 0)
        // in earlier terms, so the running minimum is still right
        Mono(acc.into_iter().filter(|(_, e)| *e != 0).collect())
    }

    /// Leading term under pure lex order.
    pub(crate) fn leading(&self) -> Option<(&Mono, &GaussRat)> {
        self.terms.iter().max_by(|a, b| a.0.lex_cmp(b.0))
    }

    /// Exact quotient `self / f` if `f` divides `self` in the Laurent ring.
    /// `f` must be free of radicals and exponentials.
    pub(crate) fn div_exact(&self, f: &Poly) -> Option<Poly> {
        if f.is_zero() {
            return None;
        }
        if let Some(c) = f.as_constant() {
            return Some(self.scale(&c.inv()?));
        }
        if f.has_special() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        // move both into the polynomial ring
        let fc = f.content();
        let f = f.shift(&fc.negated());
        let mut lift: Vec<(Atom, i32)> = Vec::new();
        for (a, e) in self.content().0 {
            if e < 0 {
                lift.push((a, -e));
            }
        }
        let lift = Mono(lift);
        let mut r = self.shift(&lift);
        let (lf_m, lf_c) = f.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let lf_inv = lf_c.inv()?;
        let mut q = Poly::zero();
        while let Some((lm, lc)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) {
            if !lf_m.divides(&lm) {
                return None;
            }
            let tm = lm.quotient(&lf_m);
            let tc = &lc * &lf_inv;
            for (fm, fcoef) in &f.terms {
                r.add_term(fm.merge(&tm), -(&tc * fcoef));
            }
            q.add_term(tm, tc);
        }
        Some(q.shift(&lift.negated()).shift(&fc.negated()))
    }

    /// Split off the coefficient of the radical atom `s`: `self = a + b*s`.
    pub(crate) fn split_radical(&self, s: &Atom) -> (Poly, Poly) {
        let mut a = Poly::zero();
        let mut b = Poly::zero();
        for (m, c) in &self.terms {
            if m.exponent(s) == 1 {
                b.add_term(m.quotient(&Mono::atom(s.clone(), 1)), c.clone());
            } else {
                a.add_term(m.clone(), c.clone());
            }
        }
        (a, b)
    }
}
