//! Numerical geometric calculus.
//!
//! The crate is organised bottom-up:
//!
//! * [`ga`]: dense Euclidean geometric algebra (products, reversion, grades).
//! * [`gauge`]: gauge-fine tagged partitions, directed Riemann sums, 1-D
//!   gauge integration of derivatives and tensor Gauss-Legendre rules.
//! * [`chain`]: singular n-cubes in `R^m`, their differentials, tangent frames
//!   and the boundary and volume integrals of multivector fields.
//! * [`tangential`]: the shrinking-cell and coordinate estimators of the
//!   tangential derivative, plus a monogenicity probe.
//! * [`fieldlang`]: a small expression language for fields and maps.
//! * [`harness`]: verification campaigns, reports and the `geocalc` CLI.

pub mod chain;
pub mod field;
pub mod fieldlang;
pub mod ga;
pub mod gauge;
pub mod harness;
pub mod tangential;

pub use chain::{Chain, SingularCube};
pub use field::{Field, TryField};
pub use fieldlang::FieldExpr;
pub use ga::{Grade, Multivector};

use thiserror::Error;

/// Errors raised by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] ga::GaError),
    #[error(transparent)]
    Eval(#[from] fieldlang::EvalError),
    #[error(transparent)]
    Parse(#[from] fieldlang::ParseError),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("gauge is not positive at {at:?} (value {value})")]
    NonPositiveGauge { at: Vec<f64>, value: f64 },
    #[error("partition refinement hit depth {depth} before every cell was admissible")]
    DepthExhausted { depth: usize },
    #[error("partition refinement exceeded the budget of {0} cells")]
    CellBudgetExceeded(usize),
    #[error("quadrature order must be at least 1 (got {0})")]
    InvalidOrder(usize),
    #[error("degenerate parameterization: J = {j:e} at {at:?}")]
    DegenerateJacobian { j: f64, at: Vec<f64> },
    #[error("point {at:?} leaves the parameter domain: {reason}")]
    DomainExit { at: Vec<f64>, reason: String },
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
