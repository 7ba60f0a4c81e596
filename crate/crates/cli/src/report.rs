use std::io::Write;
use std::process::ExitCode;

use darbouxkit::{CheckReport, Error};
use serde_json::{json, Value};

use crate::RunConfig;

/// What a successful run produced.
pub struct Outcome {
    pub command: &'static str,
    pub result: Value,
    pub checks: Vec<CheckReport>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn new(command: &'static str, result: Value) -> Outcome {
        Outcome { command, result, checks: Vec::new(), notes: Vec::new() }
    }

    pub fn check(mut self, c: CheckReport) -> Outcome {
        self.checks.push(c);
        self
    }

    pub fn checks(mut self, c: impl IntoIterator<Item = CheckReport>) -> Outcome {
        self.checks.extend(c);
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Outcome {
        self.notes.push(n.into());
        self
    }
}

/// Errors caused by what the user supplied rather than by a failed identity.
fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Input(_)
            | Error::Parse(_)
            | Error::InvalidFamily(_)
            | Error::DimensionMismatch(_)
            | Error::UnknownSymbol(_)
            | Error::UnboundSymbol(_)
            | Error::RouteConstraintViolated(_)
            | Error::RouteMismatch
            | Error::UnsupportedOrder(_)
            | Error::NotUnitNorm
    )
}

fn emit(cfg: &RunConfig, doc: &Value) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(doc).expect("json values serialize") + "\n";
    match &cfg.out {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

pub fn finish(cfg: &RunConfig, outcome: Result<Outcome, Error>) -> ExitCode {
    let (doc, code) = match outcome {
        Ok(o) => {
            let pass = o.checks.iter().all(|c| c.pass);
            for c in o.checks.iter().filter(|c| !c.pass) {
                log::warn!("check {} failed: residual {:e} > {:e}", c.check, c.max_residual, c.tolerance);
            }
            let doc = json!({
                "command": o.command,
                "seed": cfg.seed,
                "settings": { "tol": cfg.tol, "step": cfg.step, "interval": [cfg.interval.0, cfg.interval.1] },
                "result": o.result,
                "checks": o.checks,
                "notes": o.notes,
                "pass": pass,
            });
            (doc, if pass { 0 } else { 1 })
        }
        Err(e) => {
            let code = if is_input_error(&e) { 2 } else { 1 };
            eprintln!("darbouxkit: {e}");
            let kind = if code == 2 { "malformed_input" } else { "failure" };
            (json!({ "error": { "kind": kind, "message": e.to_string() }, "seed": cfg.seed, "pass": false }), code)
        }
    };
    if let Err(e) = emit(cfg, &doc) {
        eprintln!("darbouxkit: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
