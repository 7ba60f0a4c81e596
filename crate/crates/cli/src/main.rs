//! `darbouxkit` command line.
//!
//! Every run writes one JSON document (to stdout or `--out`). Exit status is
//! 0 when all requested checks pass, 1 on a failed check or a failed
//! construction, 2 on malformed input.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use darbouxkit::Route;

#[derive(Parser, Debug)]
#[command(name = "darbouxkit", version, about = "Darboux transformations for second-order families and their lifts")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Write the JSON artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Tolerance for numerical checks.
    #[arg(long, global = true, default_value_t = darbouxkit::numverify::DEFAULT_TOL, value_parser = positive)]
    pub tol: f64,
    /// RK4 step.
    #[arg(long, global = true, default_value_t = darbouxkit::numverify::DEFAULT_STEP, value_parser = positive)]
    pub step: f64,
    /// Integration interval as `a,b`.
    #[arg(long, global = true, default_value = "0,1", value_parser = interval)]
    pub interval: (f64, f64),
    /// Seed for sampled parameters.
    #[arg(long, global = true, default_value_t = 20240611)]
    pub seed: u64,
    /// Also run the numerical check of each construction.
    #[arg(long, global = true)]
    pub check: bool,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn interval(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected a,b")?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad start {a:?}"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad end {b:?}"))?;
    if b > a {
        Ok((a, b))
    } else {
        Err("interval end must exceed its start".into())
    }
}

fn route(s: &str) -> Result<Route, String> {
    s.parse().map_err(|e: darbouxkit::Error| e.to_string())
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Darboux transformation of a second-order family.
    #[command(subcommand)]
    Darboux(DarbouxCmd),
    /// Second symmetric power of a family's companion system.
    Sympow(SympowArgs),
    /// Orthogonal systems obtained from a family.
    #[command(subcommand)]
    So3(So3Cmd),
    /// Partner potentials, spectra and oscillator states.
    #[command(subcommand)]
    Susy(SusyCmd),
    /// Frenet-Serret frames.
    #[command(subcommand)]
    Frenet(AppCmd<FrenetArgs>),
    /// Poisson equation of a rigid body.
    #[command(subcommand)]
    Rigid(AppCmd<RigidArgs>),
    /// Golden numerical suite.
    Verify(VerifyArgs),
}

/// Family input: a path to a JSON file or the JSON text itself.
#[derive(Args, Debug, Clone)]
pub struct FamilyArg {
    #[arg(long)]
    pub family: String,
}

#[derive(Subcommand, Debug)]
pub enum DarbouxCmd {
    /// One step with seed `theta0` (a fresh Riccati symbol when omitted).
    Apply {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long, allow_hyphen_values = true)]
        theta0: Option<String>,
        /// Level `m0` of the seed; inferred from its Riccati defect when omitted.
        #[arg(long, allow_hyphen_values = true)]
        energy: Option<String>,
    },
    /// `k` steps; the last `--theta0` is reused when fewer than `k` are given.
    Chain {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long = "theta0", allow_hyphen_values = true, required = true)]
        theta0: Vec<String>,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
}

#[derive(Args, Debug)]
pub struct SympowArgs {
    #[command(flatten)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=6))]
    pub power: u32,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Use the rigid-body system instead of `--family`.
    #[arg(long, conflicts_with_all = ["frenet", "family"])]
    pub rigid: bool,
    /// Use the Frenet-Serret system instead of `--family`.
    #[arg(long, conflicts_with = "family")]
    pub frenet: bool,
    #[command(flatten)]
    pub rigid_data: RigidArgs,
    #[command(flatten)]
    pub frenet_data: FrenetArgs,
}

#[derive(Subcommand, Debug)]
pub enum So3Cmd {
    /// Orthogonal system of a family through a route.
    Lift {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long, value_parser = route)]
        route: Route,
    },
    /// Lifted Darboux gauge `T1` (route Q) or `T2` (route S).
    Darboux {
        #[arg(long)]
        family: Option<String>,
        #[arg(long, value_parser = route)]
        route: Route,
        #[arg(long, allow_hyphen_values = true)]
        theta0: Option<String>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Riccati equation and linear form of an orthogonal system.
    Riccati {
        /// Orthogonal system JSON `{"f", "g", "h", "table"}` (path or text).
        #[arg(long, conflicts_with = "family")]
        system: Option<String>,
        #[arg(long, requires = "route")]
        family: Option<String>,
        #[arg(long, value_parser = route)]
        route: Option<Route>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct PotentialArgs {
    /// Superpotential.
    #[arg(long, default_value = "a*x", allow_hyphen_values = true)]
    pub w: String,
    /// Parameter of the superpotential.
    #[arg(long, default_value = "a")]
    pub param: String,
    /// Reparametrization `a -> f(a)`.
    #[arg(long = "map", default_value = "a", allow_hyphen_values = true)]
    pub map: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub a0: String,
}

#[derive(Subcommand, Debug)]
pub enum SusyCmd {
    /// `V_-+ = W^2 -+ W'` and the factorization residuals.
    Partners {
        #[arg(long, allow_hyphen_values = true)]
        w: String,
    },
    /// Shape-invariance remainder and the first `n` energies.
    Spectrum {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[command(flatten)]
        potential: PotentialArgs,
    },
    /// Oscillator states `Psi_0..Psi_n`.
    States {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct FrenetArgs {
    #[arg(long, default_value = "kappa", allow_hyphen_values = true)]
    pub kappa: String,
    #[arg(long, default_value = "tau", allow_hyphen_values = true)]
    pub tau: String,
}

#[derive(Args, Debug, Clone)]
pub struct RigidArgs {
    #[arg(long, default_value = "w1", allow_hyphen_values = true)]
    pub omega1: String,
    #[arg(long, default_value = "w2", allow_hyphen_values = true)]
    pub omega2: String,
}

#[derive(Subcommand, Debug)]
pub enum AppCmd<T: Args> {
    /// Identify the model with a family through a route.
    Build {
        #[command(flatten)]
        data: T,
        #[arg(long, value_parser = route)]
        route: Route,
    },
    /// `k` lifted Darboux steps (symbolic seeds unless `--theta0` is given).
    Chain {
        #[command(flatten)]
        data: T,
        #[arg(long, value_parser = route)]
        route: Route,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long = "theta0", allow_hyphen_values = true)]
        theta0: Vec<String>,
    },
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run the whole suite (the default).
    #[arg(long)]
    pub all: bool,
    /// Run only checks whose name contains this text.
    #[arg(long)]
    pub only: Option<String>,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    /// Interior points per residual sweep (0 = all).
    #[arg(long, default_value_t = 25)]
    pub samples: usize,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DARBOUXKIT_LOG", "warn")).init();
    let cli = Cli::parse();
    log::debug!("{cli:?}");
    let outcome = commands::run(&cli.run, &cli.command);
    report::finish(&cli.run, outcome)
}
