use thiserror::Error;

/// Errors raised by the symbolic engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("undeclared generator `{0}`")]
    UndeclaredGenerator(String),
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("ghost mismatch: {0}")]
    GhostMismatch(String),
    #[error("expected {expected} components, found {found}")]
    ComponentCount { expected: usize, found: usize },
    #[error("section component for `{0}` is not a polynomial in the base coordinates")]
    NonBaseSection(String),
    #[error("vertical homotopy undefined on weight-zero term `{0}`")]
    ZeroWeight(String),
    #[error("wrong bidegree: expected {expected}, found {found}")]
    Bidegree { expected: String, found: String },
    #[error("system has no solved form")]
    NoSolvedForm,
    #[error("invalid solved form: {0}")]
    InvalidSolvedForm(String),
    #[error("reduction did not terminate within {0} passes")]
    ReductionBound(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("symmetry check needs a Lagrangian or a system with a solved form")]
    NoSymmetryTarget,
    #[error("internal differential is not square-zero on `{0}`")]
    NotSquareZero(String),
    #[error("malformed key: {0}")]
    MalformedKey(String),
    #[error("morphism does not intertwine the internal differentials on `{0}`")]
    NotIntertwining(String),
    #[error("no antifields declared in the context")]
    NoAntifields,
    #[error("input is not homogeneous: {0}")]
    Inhomogeneous(String),
    #[error("gauge operator #{0} fails the Noether identity")]
    GaugeCheck(usize),
    #[error("master equation fails")]
    MasterEquation,
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
