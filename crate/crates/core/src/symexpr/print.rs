//! Text output: canonical S-expressions and human-readable infix.
//!
//! S-expression grammar (also accepted by the parser):
//!
//! ```text
//! expr  := num | "i" | "x" | "$" name | name "'"* | "(" head expr* ")"
//! head  := "+" | "*" | "-" | "/" | "^" | "exp" | "sqrt" | "c"
//! num   := ["-"] digits ["/" digits]
//! ```
//!
//! `(c re im)` is the complex constant `re + im*i`, `(^ e n)` takes an integer
//! exponent, `$m` is a constant parameter and `y1''` the second jet of the
//! symbol `y1`.

use num_traits::{One, Signed, Zero};

use super::gauss::{rat_str, GaussRat};
use super::poly::{jet_name, Atom, Mono, Poly};
use super::ratfn::RatFn;
use super::Expr;

pub(crate) fn sexpr(e: &Expr) -> String {
    match e {
        Expr::Normal(f) => sexpr_ratfn(f),
        Expr::Const(c) => c.to_sexpr(),
        Expr::X => "x".into(),
        Expr::Param(n) => format!("${n}"),
        Expr::Sym(n, k) => jet_name(n, *k),
        Expr::Add(v) => list("+", v.iter().map(sexpr)),
        Expr::Mul(v) => list("*", v.iter().map(sexpr)),
        Expr::Pow(b, n) => format!("(^ {} {})", sexpr(b), n),
        Expr::Sqrt(b) => format!("(sqrt {})", sexpr(b)),
        Expr::Div(a, b) => format!("(/ {} {})", sexpr(a), sexpr(b)),
        Expr::Exp(b) => format!("(exp {})", sexpr(b)),
    }
}

fn list(head: &str, items: impl Iterator<Item = String>) -> String {
    let mut s = format!("({head}");
    for it in items {
        s.push(' ');
        s.push_str(&it);
    }
    s.push(')');
    s
}

fn sexpr_atom(a: &Atom) -> String {
    match a {
        Atom::X => "x".into(),
        Atom::Param(n) => format!("${n}"),
        Atom::Sym(n, k) => jet_name(n, *k),
        Atom::Sqrt(r) => format!("(sqrt {})", sexpr_poly(r)),
        Atom::Exp(u) => format!("(exp {})", sexpr_ratfn(u)),
    }
}

fn sexpr_term(m: &Mono, c: &GaussRat) -> String {
    let mut items = Vec::new();
    if !c.is_one() || m.is_one() {
        items.push(c.to_sexpr());
    }
    for (a, e) in m.factors() {
        if *e == 1 {
            items.push(sexpr_atom(a));
        } else {
            items.push(format!("(^ {} {})", sexpr_atom(a), e));
        }
    }
    if items.len() == 1 {
        items.pop().unwrap()
    } else {
        list("*", items.into_iter())
    }
}

fn sexpr_poly(p: &Poly) -> String {
    match p.len() {
        0 => "0".into(),
        1 => {
            let (m, c) = p.terms().next().unwrap();
            sexpr_term(m, c)
        }
        _ => list("+", p.terms().map(|(m, c)| sexpr_term(m, c))),
    }
}

pub(crate) fn sexpr_ratfn(f: &RatFn) -> String {
    let num = sexpr_poly(f.numerator());
    if f.denominator().is_empty() {
        return num;
    }
    let dens: Vec<String> = f
        .denominator()
        .iter()
        .map(|(g, e)| {
            if *e == 1 {
                sexpr_poly(g)
            } else {
                format!("(^ {} {})", sexpr_poly(g), e)
            }
        })
        .collect();
    let den = if dens.len() == 1 {
        dens.into_iter().next().unwrap()
    } else {
        list("*", dens.into_iter())
    };
    format!("(/ {num} {den})")
}

fn infix_atom(a: &Atom) -> String {
    match a {
        Atom::X => "x".into(),
        Atom::Param(n) => n.to_string(),
        Atom::Sym(n, k) => jet_name(n, *k),
        Atom::Sqrt(r) => format!("sqrt({})", infix_poly(r)),
        Atom::Exp(u) => format!("exp({})", infix(u)),
    }
}

fn factor_str(a: &Atom, e: i32) -> String {
    if e == 1 {
        infix_atom(a)
    } else {
        format!("{}^{}", infix_atom(a), e)
    }
}

/// Term text without its sign; returns (negative?, text).
fn infix_term(m: &Mono, c: &GaussRat) -> (bool, String) {
    let (neg, mag) = if c.im.is_zero() {
        (c.re.is_negative(), GaussRat::new(c.re.abs(), c.im.clone()))
    } else if c.re.is_zero() && c.im.is_negative() {
        (true, -c.clone())
    } else {
        (false, c.clone())
    };
    let num: Vec<String> = m
        .factors()
        .iter()
        .filter(|(_, e)| *e > 0)
        .map(|(a, e)| factor_str(a, *e))
        .collect();
    let den: Vec<String> = m
        .factors()
        .iter()
        .filter(|(_, e)| *e < 0)
        .map(|(a, e)| factor_str(a, -e))
        .collect();
    let coef = if mag.im.is_zero() {
        rat_str(&mag.re)
    } else if mag.re.is_zero() {
        if mag.im.is_one() {
            "i".to_string()
        } else {
            format!("{}*i", rat_str(&mag.im))
        }
    } else {
        format!("{mag}")
    };
    let mut parts = Vec::new();
    if !mag.is_one() || num.is_empty() {
        parts.push(coef);
    }
    parts.extend(num);
    let mut s = parts.join("*");
    if !den.is_empty() {
        if den.len() == 1 {
            s = format!("{s}/{}", den[0]);
        } else {
            s = format!("{s}/({})", den.join("*"));
        }
    }
    (neg, s)
}

fn infix_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (m, c)) in p.terms().enumerate() {
        let (neg, t) = infix_term(m, c);
        match (k, neg) {
            (0, true) => s.push_str(&format!("-{t}")),
            (0, false) => s.push_str(&t),
            (_, true) => s.push_str(&format!(" - {t}")),
            (_, false) => s.push_str(&format!(" + {t}")),
        }
    }
    s
}

pub(crate) fn infix(f: &RatFn) -> String {
    let num = infix_poly(f.numerator());
    if f.denominator().is_empty() {
        return num;
    }
    let num = if f.numerator().len() > 1 { format!("({num})") } else { num };
    let dens: Vec<String> = f
        .denominator()
        .iter()
        .map(|(g, e)| {
            let b = format!("({})", infix_poly(g));
            if *e == 1 {
                b
            } else {
                format!("{b}^{e}")
            }
        })
        .collect();
    if dens.len() == 1 {
        format!("{num}/{}", dens[0])
    } else {
        format!("{num}/({})", dens.join("*"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_text() {
        let x = Expr::x();
        let e = (&x + 1) / (x.pow(2) + 1);
        assert_eq!(e.to_sexpr(), "(/ (+ 1 x) (+ 1 (^ x 2)))");
        assert_eq!(Expr::param("m").to_sexpr(), "$m");
        assert_eq!(Expr::jet("y1", 2).to_sexpr(), "y1''");
    }

    #[test]
    fn infix_text() {
        let x = Expr::x();
        assert_eq!(format!("{}", -x.pow(2) + 1), "1 - x^2");
        assert_eq!(format!("{}", Expr::i() * Expr::sym("q")), "i*q");
        assert_eq!(format!("{}", Expr::sym("w").inv()), "1/w");
    }
}
