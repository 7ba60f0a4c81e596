//! Parsers for the canonical S-expression form and for infix input.
//!
//! [`parse`] tries the S-expression grammar first and falls back to infix.
//! Infix accepts `+ - * / ^`, parentheses, `exp(..)`, `sqrt(..)`, integers and
//! decimals (read exactly), `i`, `x`, primed jets such as `y1'`, and
//! parameters either as `$m` or as bare names listed in `params`. Exponents
//! must be integers or halves (`x^(3/2)` is `sqrt(x)^3`).

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::gauss::GaussRat;
use super::Expr;
use crate::error::{Error, Result};

pub fn parse(text: &str, params: &[&str]) -> Result<Expr> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    // a bare name is valid in both grammars; the parameter list decides
    if params.contains(&t) {
        return Ok(Expr::Param(Arc::from(t)));
    }
    parse_sexpr(t).or_else(|se| {
        parse_infix(t, params).map_err(|ie| match (se, ie) {
            (Error::Parse(a), Error::Parse(b)) if t.starts_with('(') => {
                Error::Parse(format!("as S-expression: {a}; as infix: {b}"))
            }
            (_, ie) => ie,
        })
    })
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    if body.is_empty() {
        return None;
    }
    let r = if let Some((n, d)) = body.split_once('/') {
        let n: BigInt = n.parse().ok()?;
        let d: BigInt = d.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        BigRational::new(n, d)
    } else if let Some((ip, fp)) = body.split_once('.') {
        if !ip.chars().all(|c| c.is_ascii_digit()) || !fp.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{ip}{fp}");
        let n: BigInt = digits.parse().ok()?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        BigRational::new(n, d)
    } else {
        if !body.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        BigRational::from_integer(body.parse().ok()?)
    };
    Some(if neg { -r } else { r })
}

fn is_ident(s: &str) -> bool {
    let mut ch = s.chars();
    match ch.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    ch.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Identifier with trailing primes: `(name, order)`.
fn split_jet(s: &str) -> Option<(&str, u32)> {
    let base = s.trim_end_matches('\'');
    let k = (s.len() - base.len()) as u32;
    is_ident(base).then_some((base, k))
}

fn leaf(tok: &str, params: &[&str]) -> Result<Expr> {
    if let Some(r) = parse_rational(tok) {
        return Ok(Expr::Const(GaussRat::from(r)));
    }
    match tok {
        "i" => return Ok(Expr::Const(GaussRat::i())),
        "x" => return Ok(Expr::X),
        _ => {}
    }
    if let Some(p) = tok.strip_prefix('$') {
        if is_ident(p) {
            return Ok(Expr::Param(Arc::from(p)));
        }
    }
    match split_jet(tok) {
        Some((name, 0)) if params.contains(&name) => Ok(Expr::Param(Arc::from(name))),
        Some((name, k)) if name != "x" && name != "i" => Ok(Expr::Sym(Arc::from(name), k)),
        _ => Err(Error::Parse(format!("bad token `{tok}`"))),
    }
}

// ---------------------------------------------------------------- S-expr

fn sexpr_tokens(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(c.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_sexpr(s: &str) -> Result<Expr> {
    let toks = sexpr_tokens(s);
    let mut pos = 0;
    let e = sexpr_node(&toks, &mut pos)?;
    if pos != toks.len() {
        return Err(Error::Parse("trailing input".into()));
    }
    Ok(e)
}

fn sexpr_node(t: &[String], pos: &mut usize) -> Result<Expr> {
    let tok = t.get(*pos).ok_or_else(|| Error::Parse("unexpected end".into()))?;
    *pos += 1;
    if tok == ")" {
        return Err(Error::Parse("unexpected `)`".into()));
    }
    if tok != "(" {
        return leaf(tok, &[]);
    }
    let head = t.get(*pos).ok_or_else(|| Error::Parse("unexpected end".into()))?.clone();
    *pos += 1;
    let mut args = Vec::new();
    let mut raw = Vec::new();
    loop {
        match t.get(*pos).map(|s| s.as_str()) {
            None => return Err(Error::Parse("unbalanced `(`".into())),
            Some(")") => {
                *pos += 1;
                break;
            }
            Some(s) => {
                raw.push(s.to_string());
                args.push(sexpr_node(t, pos)?);
            }
        }
    }
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(Error::Parse(format!("`{head}` takes {n} argument(s)")))
        }
    };
    match head.as_str() {
        "+" => Ok(Expr::Add(args)),
        "*" => Ok(Expr::Mul(args)),
        "-" => match args.len() {
            1 => Ok(Expr::Mul(vec![Expr::Const(GaussRat::int(-1)), args.pop().unwrap()])),
            2 => {
                let b = args.pop().unwrap();
                let a = args.pop().unwrap();
                Ok(Expr::Add(vec![a, Expr::Mul(vec![Expr::Const(GaussRat::int(-1)), b])]))
            }
            _ => Err(Error::Parse("`-` takes 1 or 2 arguments".into())),
        },
        "/" => {
            arity(2)?;
            let b = args.pop().unwrap();
            let a = args.pop().unwrap();
            Ok(Expr::Div(Box::new(a), Box::new(b)))
        }
        "^" => {
            arity(2)?;
            let n: i64 = raw[1]
                .parse()
                .map_err(|_| Error::Parse("exponent must be an integer".into()))?;
            Ok(Expr::Pow(Box::new(args.swap_remove(0)), n))
        }
        "exp" => {
            arity(1)?;
            Ok(Expr::Exp(Box::new(args.pop().unwrap())))
        }
        "sqrt" => {
            arity(1)?;
            Ok(Expr::Sqrt(Box::new(args.pop().unwrap())))
        }
        "c" => {
            arity(2)?;
            let re = parse_rational(&raw[0]).ok_or_else(|| Error::Parse("bad real part".into()))?;
            let im = parse_rational(&raw[1]).ok_or_else(|| Error::Parse("bad imaginary part".into()))?;
            Ok(Expr::Const(GaussRat::new(re, im)))
        }
        other => Err(Error::Parse(format!("unknown head `{other}`"))),
    }
}

// ---------------------------------------------------------------- infix

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn infix_tokens(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && i + 1 < cs.len() && cs[i + 1].is_ascii_digit()) {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            out.push(Tok::Num(cs[st..i].iter().collect()));
        } else if c.is_ascii_alphabetic() || c == '_' || c == '$' {
            let st = i;
            i += 1;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            while i < cs.len() && cs[i] == '\'' {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Infix<'a> {
    toks: Vec<Tok>,
    pos: usize,
    params: &'a [&'a str],
}

impl Infix<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut terms = vec![self.product()?];
        loop {
            if self.eat('+') {
                terms.push(self.product()?);
            } else if self.eat('-') {
                let t = self.product()?;
                terms.push(Expr::Mul(vec![Expr::Const(GaussRat::int(-1)), t]));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Add(terms) })
    }

    fn product(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let r = self.unary()?;
                acc = Expr::Mul(vec![acc, r]);
            } else if self.eat('/') {
                let r = self.unary()?;
                acc = Expr::Div(Box::new(acc), Box::new(r));
            } else if matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Op('(')))
                && matches!(acc, Expr::Const(_))
            {
                // implicit product after a numeric literal: `2x`, `3(x+1)`
                let r = self.power()?;
                acc = Expr::Mul(vec![acc, r]);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            let e = self.unary()?;
            return Ok(Expr::Mul(vec![Expr::Const(GaussRat::int(-1)), e]));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let ex = self.unary()?.to_ratfn()?;
        let c = ex
            .as_constant()
            .filter(|c| c.is_real())
            .ok_or_else(|| Error::Parse("exponent must be a rational constant".into()))?;
        let r = c.re;
        let two = BigInt::from(2);
        if r.denom().is_one() {
            let n: i64 = r.numer().try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
            Ok(Expr::Pow(Box::new(base), n))
        } else if r.denom() == &two {
            let n: i64 = r.numer().try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
            Ok(Expr::Pow(Box::new(Expr::Sqrt(Box::new(base))), n))
        } else {
            Err(Error::Parse("only integer and half-integer exponents are allowed".into()))
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let tok = self.peek().cloned().ok_or_else(|| Error::Parse("unexpected end".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(n) => Ok(Expr::Const(GaussRat::from(
                parse_rational(&n).ok_or_else(|| Error::Parse(format!("bad number `{n}`")))?,
            ))),
            Tok::Op('(') => {
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                Ok(e)
            }
            Tok::Ident(name) if (name == "exp" || name == "sqrt") && self.peek() == Some(&Tok::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                Ok(if name == "exp" { Expr::Exp(Box::new(e)) } else { Expr::Sqrt(Box::new(e)) })
            }
            Tok::Ident(name) => leaf(&name, self.params),
            Tok::Op(c) => Err(Error::Parse(format!("unexpected `{c}`"))),
        }
    }
}

fn parse_infix(s: &str, params: &[&str]) -> Result<Expr> {
    let mut p = Infix { toks: infix_tokens(s)?, pos: 0, params };
    let e = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("unexpected input at token {}", p.pos + 1)));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sexpr_roundtrip() {
        let e = parse("(+ (* -1 (^ x 2)) 1 (* i $m y1''))", &[]).unwrap();
        let back = parse(&e.normalize().unwrap().to_sexpr(), &[]).unwrap();
        assert_eq!(e, back);
    }

    #[test]
    fn infix_forms() {
        let a = parse("-x^2+1", &[]).unwrap();
        let b = parse("(+ 1 (* -1 (^ x 2)))", &[]).unwrap();
        assert_eq!(a, b);
        let c = parse("2-i*w1", &[]).unwrap();
        assert_eq!(c, Expr::int(2) - Expr::i() * Expr::sym("w1"));
        let d = parse("m*r + 0.5", &["m"]).unwrap();
        assert_eq!(d, Expr::param("m") * Expr::sym("r") + Expr::rat(1, 2));
        let e = parse("x^(3/2)", &[]).unwrap();
        assert_eq!(e, Expr::x().sqrt().pow(3));
        assert_eq!(parse("2x", &[]).unwrap(), Expr::int(2) * Expr::x());
    }

    #[test]
    fn malformed_input() {
        assert!(parse("(+ 1", &[]).is_err());
        assert!(parse("x^(1/3)", &[]).is_err());
        assert!(parse("x +* 2", &[]).is_err());
        assert!(parse("", &[]).is_err());
    }
}
