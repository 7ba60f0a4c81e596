//! JSON forms of systems, families, tables and gauges.
//!
//! Expressions are stored as canonical S-expressions, so emitted documents
//! re-ingest to equal objects. Input documents may also use infix text.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linsys::{LinearSystem, SecondOrderFamily, CONVENTION};
use crate::matrix::Matrix;
use crate::symexpr::{DerivationTable, Expr, Rule};
use crate::tensordt::{FactoredGauge, OrthogonalSystem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RuleJson {
    Free,
    Constant,
    Ode { order: u32, rhs: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolJson {
    pub name: String,
    #[serde(flatten)]
    pub rule: RuleJson,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TableJson(pub Vec<SymbolJson>);

impl TableJson {
    pub fn from_table(t: &DerivationTable) -> TableJson {
        TableJson(
            t.rules()
                .map(|(n, r)| SymbolJson {
                    name: n.to_string(),
                    rule: match r {
                        Rule::Free => RuleJson::Free,
                        Rule::Constant => RuleJson::Constant,
                        Rule::Ode { order, rhs } => RuleJson::Ode { order: *order, rhs: Expr::normal(rhs.clone()).to_sexpr() },
                    },
                })
                .collect(),
        )
    }

    /// Symbols are registered first, then ODE rules, so rules may refer to
    /// each other in any order.
    pub fn to_table(&self, params: &[&str]) -> Result<DerivationTable> {
        let mut t = DerivationTable::new();
        for s in &self.0 {
            t = match s.rule {
                RuleJson::Constant => t.with_constant(&s.name),
                _ => t.with_free(&s.name),
            };
        }
        for s in &self.0 {
            if let RuleJson::Ode { order, rhs } = &s.rule {
                t = t.with_ode(&s.name, *order, &Expr::parse(rhs, params)?)?;
            }
        }
        Ok(t)
    }
}

pub fn matrix_to_json(m: &Matrix) -> Vec<Vec<String>> {
    m.to_sexpr_rows()
}

pub fn matrix_from_json(rows: &[Vec<String>], params: &[&str]) -> Result<Matrix> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|e| Expr::parse(e, params)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemJson {
    pub n: usize,
    pub convention: String,
    pub matrix: Vec<Vec<String>>,
    #[serde(default)]
    pub table: TableJson,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SystemJson {
    pub fn from_system(s: &LinearSystem) -> SystemJson {
        SystemJson {
            n: s.size(),
            convention: CONVENTION.into(),
            matrix: matrix_to_json(s.matrix()),
            table: TableJson::from_table(s.table()),
            notes: s.notes().to_vec(),
        }
    }

    /// Accepts `"Xp=-AX"` as is and `"Xp=AX"` by negation.
    pub fn to_system(&self, params: &[&str]) -> Result<LinearSystem> {
        let m = matrix_from_json(&self.matrix, params)?;
        if m.rows() != self.n {
            return Err(Error::DimensionMismatch(format!("n = {} but matrix has {} rows", self.n, m.rows())));
        }
        let t = self.table.to_table(params)?;
        let s = match self.convention.replace(' ', "").as_str() {
            "Xp=-AX" => LinearSystem::new(m, t)?,
            "Xp=AX" => LinearSystem::from_positive(m, t)?,
            c => return Err(Error::Input(format!("unknown convention {c:?}"))),
        };
        Ok(self.notes.iter().fold(s, |s, n| s.with_note(n.clone())))
    }
}

/// `Z' = skew(f, g, h) Z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalJson {
    pub f: String,
    pub g: String,
    pub h: String,
    #[serde(default)]
    pub table: TableJson,
}

impl OrthogonalJson {
    pub fn from_system(s: &OrthogonalSystem) -> OrthogonalJson {
        OrthogonalJson {
            f: s.f().to_sexpr(),
            g: s.g().to_sexpr(),
            h: s.h().to_sexpr(),
            table: TableJson::from_table(s.table()),
        }
    }

    pub fn to_system(&self, params: &[&str]) -> Result<OrthogonalSystem> {
        let p = |e: &str| Expr::parse(e, params);
        OrthogonalSystem::new(p(&self.f)?, p(&self.g)?, p(&self.h)?, self.table.to_table(params)?)
    }
}

/// `y'' + p y' + (q - m r) y = 0` with `p = w'/w`. Missing `w` means `w = 1`
/// unless `p` is given; missing `r` means `r = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    pub q: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    #[serde(default = "default_param")]
    pub param: String,
    #[serde(default)]
    pub table: TableJson,
}

fn default_param() -> String {
    "m".into()
}

impl FamilyJson {
    pub fn from_family(f: &SecondOrderFamily) -> FamilyJson {
        FamilyJson {
            w: Some(f.w().to_sexpr()),
            p: Some(f.p().to_sexpr()),
            q: f.q().to_sexpr(),
            r: Some(f.r().to_sexpr()),
            param: f.param().to_string(),
            table: TableJson::from_table(f.table()),
        }
    }

    pub fn to_family(&self) -> Result<SecondOrderFamily> {
        let params = [self.param.as_str()];
        let parse = |e: &str| Expr::parse(e, &params);
        let t = self.table.to_table(&params)?;
        let q = parse(&self.q)?;
        let r = self.r.as_deref().map(parse).transpose()?.unwrap_or_else(Expr::one);
        match (&self.w, &self.p) {
            (Some(w), Some(p)) => SecondOrderFamily::with_p(parse(p)?, q, r, parse(w)?, &self.param, t),
            (Some(w), None) => SecondOrderFamily::new(parse(w)?, q, r, &self.param, t),
            (None, None) => SecondOrderFamily::normal_form(q, r, &self.param, t),
            (None, Some(_)) => Err(Error::InvalidFamily("p given without w; w is needed for the lifted systems".into())),
        }
    }
}

/// A gauge matrix with its two factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeJson {
    pub matrix: Vec<Vec<String>>,
    pub left: Vec<Vec<String>>,
    pub right: Vec<Vec<String>>,
}

impl GaugeJson {
    pub fn from_gauge(g: &FactoredGauge) -> GaugeJson {
        GaugeJson { matrix: matrix_to_json(g.matrix()), left: matrix_to_json(&g.left), right: matrix_to_json(&g.right) }
    }
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Input(e.to_string()))
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed JSON: {e}")))
}
