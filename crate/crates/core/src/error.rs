use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degenerate span: {0}")]
    DegenerateSpan(String),
    #[error("degenerate function: {0}")]
    DegenerateFunction(String),
    #[error("singular curve: {0}")]
    SingularCurve(String),
    #[error("curve is not in Weierstrass normal form: roots sum to {0}, translate x first")]
    NotWeierstrassNormal(String),
    #[error("point is not on the curve: {0}")]
    NotOnCurve(String),
    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),
    #[error("argument is within {tol:e} of a lattice point (pole of the Weierstrass function)")]
    Pole { tol: f64 },
    #[error("certificate check ({check}) failed: {detail}")]
    CertificateFailure { check: String, detail: String },
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("invalid projection center: {0}")]
    InvalidCenter(String),
    #[error("degenerate pencil: {0}")]
    DegeneratePencil(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
