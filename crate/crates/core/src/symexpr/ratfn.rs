//! Rational functions: a Laurent numerator over a list of polynomial factors.
//!
//! Denominator factors are kept monic (leading lex coefficient 1), free of
//! monomial content and free of radicals, so monomial denominators live in the
//! numerator as negative exponents and radicals are rationalized away. Common
//! factors are cancelled by exact division. Zero is recognized exactly: a
//! rational function is zero iff its numerator has no terms.

use std::sync::Arc;

use super::gauss::GaussRat;
use super::poly::{Atom, Mono, Poly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RatFn {
    pub(crate) num: Poly,
    pub(crate) den: Vec<(Poly, u32)>,
}

impl RatFn {
    pub fn zero() -> RatFn {
        RatFn::default()
    }

    pub fn one() -> RatFn {
        RatFn::from_poly(Poly::one())
    }

    pub fn constant(c: GaussRat) -> RatFn {
        RatFn::from_poly(Poly::constant(c))
    }

    pub fn int(n: i64) -> RatFn {
        RatFn::constant(GaussRat::int(n))
    }

    pub fn from_poly(p: Poly) -> RatFn {
        RatFn { num: p, den: Vec::new() }
    }

    pub fn atom(a: Atom) -> RatFn {
        RatFn::from_poly(Poly::atom(a))
    }

    pub fn x() -> RatFn {
        RatFn::atom(Atom::X)
    }

    pub fn param(name: &str) -> RatFn {
        RatFn::atom(Atom::Param(name.into()))
    }

    pub fn sym(name: &str, order: u32) -> RatFn {
        RatFn::atom(Atom::Sym(name.into(), order))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.is_one()
    }

    pub fn as_constant(&self) -> Option<GaussRat> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// Atoms of numerator and denominator, top level only.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out = self.num.atoms();
        for (f, _) in &self.den {
            for a in f.atoms() {
                if let Err(pos) = out.binary_search(&a) {
                    out.insert(pos, a);
                }
            }
        }
        out
    }

    /// Visit every atom, descending into radicands and exponents.
    pub fn visit_atoms(&self, f: &mut impl FnMut(&Atom)) {
        for a in self.atoms() {
            match &a {
                Atom::Sqrt(r) => RatFn::from_poly((**r).clone()).visit_atoms(f),
                Atom::Exp(u) => u.visit_atoms(f),
                _ => {}
            }
            f(&a);
        }
    }

    /// Product of the denominator factors as a polynomial.
    pub fn den_poly(&self) -> Poly {
        self.den
            .iter()
            .fold(Poly::one(), |acc, (f, e)| acc.mul(&f.pow(*e)))
    }

    fn reduced(mut num: Poly, den: Vec<(Poly, u32)>) -> RatFn {
        if num.is_zero() {
            return RatFn::zero();
        }
        let mut out = Vec::with_capacity(den.len());
        for (f, mut e) in den {
            while e > 0 {
                match num.div_exact(&f) {
                    Some(q) => {
                        num = q;
                        e -= 1;
                    }
                    None => break,
                }
            }
            if e > 0 {
                out.push((f, e));
            }
        }
        RatFn { num, den: out }
    }

    pub fn neg(&self) -> RatFn {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, k: &GaussRat) -> RatFn {
        if k.is_zero() {
            return RatFn::zero();
        }
        RatFn { num: self.num.scale(k), den: self.den.clone() }
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            if self.den.is_empty() {
                return RatFn::from_poly(num);
            }
            return RatFn::reduced(num, self.den.clone());
        }
        // least common multiple of the factor lists
        let mut lcm: Vec<(Poly, u32)> = self.den.clone();
        for (f, e) in &other.den {
            match lcm.iter_mut().find(|(g, _)| g == f) {
                Some((_, k)) => *k = (*k).max(*e),
                None => lcm.push((f.clone(), *e)),
            }
        }
        lcm.sort();
        let cofactor = |den: &[(Poly, u32)]| {
            lcm.iter().fold(Poly::one(), |acc, (f, e)| {
                let have = den.iter().find(|(g, _)| g == f).map(|(_, k)| *k).unwrap_or(0);
                acc.mul(&f.pow(e - have))
            })
        };
        let num = self
            .num
            .mul(&cofactor(&self.den))
            .add(&other.num.mul(&cofactor(&other.den)));
        RatFn::reduced(num, lcm)
    }

    pub fn sub(&self, other: &RatFn) -> RatFn {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        if self.is_zero() || other.is_zero() {
            return RatFn::zero();
        }
        let num = self.num.mul(&other.num);
        if self.den.is_empty() && other.den.is_empty() {
            return RatFn::from_poly(num);
        }
        let mut den = self.den.clone();
        for (f, e) in &other.den {
            match den.iter_mut().find(|(g, _)| g == f) {
                Some((_, k)) => *k += e,
                None => den.push((f.clone(), *e)),
            }
        }
        den.sort();
        RatFn::reduced(num, den)
    }

    pub fn inv(&self) -> Result<RatFn> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let top = RatFn::from_poly(self.den_poly());
        let (c, m, f) = split_content(&self.num);
        let mut out = top.scale(&c.inv().ok_or(Error::DivisionByZero)?);
        out = out.mul(&inv_mono(&m)?);
        if !f.is_one() {
            out = out.mul(&inv_content_free(f)?);
        }
        Ok(out)
    }

    pub fn div(&self, other: &RatFn) -> Result<RatFn> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn powi(&self, n: i64) -> Result<RatFn> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = RatFn::one();
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    /// Square root, introducing a radical atom when no exact root exists.
    /// Branch: `sqrt(N/D) = sqrt(N*D)/D`; square monomial factors are pulled out.
    pub fn sqrt(&self) -> RatFn {
        if self.den.is_empty() {
            return sqrt_poly(&self.num);
        }
        let d = self.den_poly();
        let root = sqrt_poly(&self.num.mul(&d));
        root.mul(&RatFn { num: Poly::one(), den: self.den.clone() })
    }

    pub fn exp(&self) -> RatFn {
        if self.is_zero() {
            return RatFn::one();
        }
        RatFn::atom(Atom::Exp(Arc::new(self.clone())))
    }

    pub fn equals(&self, other: &RatFn) -> bool {
        self == other || self.sub(other).is_zero()
    }
}

/// `p = c * m * f` with `c` the leading coefficient, `m` the monomial content
/// and `f` monic and content free.
pub(crate) fn split_content(p: &Poly) -> (GaussRat, Mono, Poly) {
    let m = p.content();
    let f = if m.is_one() { p.clone() } else { p.shift(&m.negated()) };
    let c = f.leading().map(|(_, c)| c.clone()).unwrap_or_else(GaussRat::one);
    let f = f.scale(&c.inv().expect("nonzero leading coefficient"));
    (c, m, f)
}

fn inv_mono(m: &Mono) -> Result<RatFn> {
    let mut plain = Vec::new();
    let mut out = RatFn::one();
    for (a, e) in m.factors() {
        match a {
            Atom::Sqrt(r) => {
                // 1/s = s/R
                let rr = RatFn::from_poly((**r).clone());
                let s = RatFn::atom(a.clone());
                for _ in 0..*e {
                    out = out.mul(&s.div(&rr)?);
                }
            }
            Atom::Exp(u) => {
                out = out.mul(&u.scale(&GaussRat::int(-(*e as i64))).exp());
            }
            _ => plain.push((a.clone(), -e)),
        }
    }
    Ok(out.mul(&RatFn::from_poly(Poly::monomial(Mono(plain), GaussRat::one()))))
}

fn inv_content_free(f: Poly) -> Result<RatFn> {
    if f.has_sqrt() {
        let s = f
            .atoms()
            .into_iter()
            .find(|a| matches!(a, Atom::Sqrt(_)))
            .expect("radical present");
        let (a, b) = f.split_radical(&s);
        let sp = Poly::atom(s);
        let conj = a.sub(&b.mul(&sp));
        let norm = f.mul(&conj);
        return Ok(RatFn::from_poly(conj).mul(&RatFn::from_poly(norm).inv()?));
    }
    Ok(RatFn { num: Poly::one(), den: vec![(f, 1)] })
}

fn sqrt_poly(p: &Poly) -> RatFn {
    if p.is_zero() {
        return RatFn::zero();
    }
    let (c, m, f) = split_content(p);
    let mut outside = Vec::new();
    let mut inside = Vec::new();
    let mut exp_half = RatFn::one();
    for (a, e) in m.factors() {
        match a {
            Atom::Exp(u) => {
                exp_half = exp_half.mul(&u.scale(&GaussRat::ratio(*e as i64, 2)).exp());
            }
            Atom::Sqrt(_) => inside.push((a.clone(), *e)),
            _ => {
                let half = e.div_euclid(2);
                if half != 0 {
                    outside.push((a.clone(), half));
                }
                if e.rem_euclid(2) == 1 {
                    inside.push((a.clone(), 1));
                }
            }
        }
    }
    let (c_out, c_in) = match c.sqrt_exact() {
        Some(r) => (r, GaussRat::one()),
        None => (GaussRat::one(), c),
    };
    let radicand = f
        .mul_mono(&Mono(inside))
        .scale(&c_in);
    let root = if radicand.is_one() {
        RatFn::one()
    } else {
        RatFn::atom(Atom::Sqrt(Arc::new(radicand)))
    };
    root.mul(&exp_half)
        .mul(&RatFn::from_poly(Poly::monomial(Mono(outside), c_out)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: &str) -> RatFn {
        RatFn::sym(n, 0)
    }

    #[test]
    fn cancellation_through_factor_list() {
        let (u, v) = (s("u"), s("v"));
        let a = u.mul(&u).sub(&v.mul(&v)).div(&u.sub(&v)).unwrap();
        assert!(a.equals(&u.add(&v)));
        assert!(a.den.is_empty());
    }

    #[test]
    fn sum_of_fractions() {
        // 1/(x+1) + x/(x+1) = 1
        let x = RatFn::x();
        let d = x.add(&RatFn::one());
        let sum = RatFn::one().div(&d).unwrap().add(&x.div(&d).unwrap());
        assert!(sum.is_one());
    }

    #[test]
    fn radical_rationalization() {
        let r = s("r");
        let rt = r.sqrt();
        let back = rt.mul(&rt);
        assert!(back.equals(&r));
        let inv = RatFn::one().add(&rt).inv().unwrap();
        let check = inv.mul(&RatFn::one().add(&rt));
        assert!(check.is_one());
        assert!(rt.inv().unwrap().mul(&rt).is_one());
    }

    #[test]
    fn exponentials_merge() {
        let x = RatFn::x();
        let e = x.exp().mul(&x.neg().exp());
        assert!(e.is_one());
        let sq = x.exp().mul(&x.exp());
        assert!(sq.equals(&x.scale(&GaussRat::int(2)).exp()));
    }

    #[test]
    fn exact_sqrt_of_constants() {
        assert!(RatFn::int(4).sqrt().equals(&RatFn::int(2)));
        let im = RatFn::int(-1).sqrt();
        assert_eq!(im.as_constant(), Some(GaussRat::i()));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(matches!(RatFn::one().div(&RatFn::zero()), Err(Error::DivisionByZero)));
    }
}
