use thiserror::Error;

/// Errors raised by the library. Every variant is recoverable data; nothing
/// here panics on bad input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("symbol `{0}` has no derivation rule")]
    UnknownSymbol(String),
    #[error("division by an expression that normalizes to zero")]
    DivisionByZero,
    #[error("symbol `{0}` is not bound")]
    UnboundSymbol(String),
    #[error("evaluation hit a pole near x = {x}")]
    EvalSingularity { x: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("matrix is not traceless")]
    NotTraceless,
    #[error("omega1 = (g + i f)/2 normalizes to zero")]
    OmegaOneZero,
    #[error("seed fails the Riccati condition at step {step}: residual {residual}")]
    SeedNotSolution { step: usize, residual: String },
    #[error("gauge matrix is singular")]
    SingularGauge,
    #[error("unsupported order {0}")]
    UnsupportedOrder(usize),
    #[error("potential is not shape invariant: residual {0}")]
    NotShapeInvariant(String),
    #[error("route constraint violated: {0}")]
    RouteConstraintViolated(String),
    #[error("perturbation does not belong to this route")]
    RouteMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("alpha^2 + beta^2 + gamma^2 is not 1")]
    NotUnitNorm,
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("identity check failed: {0}")]
    IdentityFailed(String),
    #[error("malformed input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
