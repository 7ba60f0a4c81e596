//! Exact construction and numerical verification of Darboux transformations
//! for second-order linear ODE families, their second symmetric powers and
//! the orthogonal (so(3)) systems they induce.
//!
//! Systems follow the convention `X' = -A X` throughout.

pub mod apps;
pub mod darboux;
pub mod error;
pub mod io;
pub mod linsys;
pub mod matrix;
pub mod numverify;
pub mod susyqm;
pub mod symexpr;
pub mod sympow;
pub mod tensordt;

pub use apps::{Application, FrenetData, RigidData, Route};
pub use darboux::{DarbouxGauge, DarbouxSeed};
pub use error::{Error, Result};
pub use linsys::{GaugeMatrix, LinearSystem, SecondOrderFamily};
pub use matrix::Matrix;
pub use numverify::{CheckReport, Trajectory};
pub use susyqm::{MatrixFormalism, SusyPair};
pub use symexpr::{Bindings, DerivationTable, Expr, GaussRat};
pub use tensordt::{FactoredGauge, OrthogonalSystem};
