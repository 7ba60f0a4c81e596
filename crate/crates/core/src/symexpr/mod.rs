//! Exact symbolic kernel.
//!
//! Expressions normalize to rational functions over Q(i) in `x`, constant
//! parameters, jet symbols, square-root atoms and exponential atoms. The
//! derivation is supplied by a [`DerivationTable`].

mod eval;
mod expr;
mod gauss;
mod parse;
mod poly;
mod print;
mod ratfn;
mod subst;
mod table;

pub use eval::{Bindings, Compiled};
pub use expr::Expr;
pub use gauss::GaussRat;
pub use poly::{jet_name, Atom, Mono, Poly};
pub use ratfn::RatFn;
pub use table::{DerivationTable, Rule};

use num_complex::Complex64;

use crate::error::Result;

/// `d/dx e` under `table`, normalized.
pub fn differentiate(e: &Expr, table: &DerivationTable) -> Result<Expr> {
    e.diff(table)
}

/// Canonical form of `e`.
pub fn normalize(e: &Expr) -> Result<Expr> {
    e.normalize()
}

pub fn evaluate(e: &Expr, bindings: &Bindings) -> Result<Complex64> {
    e.eval(bindings)
}

/// Simultaneous substitution, then normalization.
pub fn substitute(e: &Expr, map: &[(&str, Expr)]) -> Result<Expr> {
    e.subs(map)
}
