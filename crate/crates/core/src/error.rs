use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("letter index {index} out of range for an alphabet of {len} letters")]
    InvalidLetter { index: usize, len: usize },
    #[error("invalid letter: {0}")]
    InvalidLetterSpec(String),
    #[error("truncation degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("series over different alphabets")]
    AlphabetMismatch,
    #[error("matrix ({a} {b}; {c} {d}) has determinant {det}, not 1")]
    NotInGroup { a: i64, b: i64, c: i64, d: i64, det: i128 },
    #[error("constant term {0} is not 1; inverse restricted to the unit subgroup")]
    NonUnitConstant(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("point {0} is not in the upper half-plane")]
    NotUpperHalfPlane(String),
    #[error("parameter t = {0} is not in the open lower half-plane")]
    NotLowerHalfPlane(String),
    #[error("expansion of length {len} cannot reach tolerance {tol:e} at Im τ = {im}")]
    InsufficientExpansion { len: usize, tol: f64, im: f64 },
    #[error("tolerance not reached within {0} steps")]
    ToleranceNotReached(usize),
    #[error("step size underflow at s = {at} (floor {floor:e})")]
    StepSizeUnderflow { at: f64, floor: f64 },
    #[error("tail bound cannot be met: {0}")]
    TailUnreachable(String),
    #[error("form does not match monomial {monomial}: {reason}")]
    FormMismatch { monomial: String, reason: String },
    #[error("monomial {0} has no cusp forms (not in B(A))")]
    NotInCatalog(String),
    #[error("fit residual {residual:e} exceeds tolerance {tol:e} at monomial {monomial}")]
    FitResidual { monomial: String, residual: f64, tol: f64 },
    #[error("ill-conditioned fit at monomial {monomial}: {reason}")]
    IllConditioned { monomial: String, reason: String },
    #[error("abelian cocycle check failed at degree {degree}: residual {residual:e} > {bound:e}")]
    CocycleCheck { degree: usize, residual: f64, bound: f64 },
    #[error("value not tabulated: {0}")]
    NotTabulated(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
