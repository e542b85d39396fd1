use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("slot {slot} out of range for tensor of degree {degree}")]
    SlotOutOfRange { slot: usize, degree: usize },
    #[error("contraction slots must satisfy a < b (got {a}, {b})")]
    SlotOrder { a: usize, b: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("component array has {found} entries, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("non-finite component at offset {offset}")]
    NonFinite { offset: usize },
    #[error("invalid dimension {0}: must be even and at least 2")]
    InvalidDimension(usize),

    #[error("NotSymmetric: metric entry ({i},{j}) = {a} but ({j},{i}) = {b}")]
    NotSymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("NotPositiveDefinite: metric has no Cholesky factorization")]
    NotPositiveDefinite,
    #[error("PSquareNotIdentity: (P^2)[{i}][{j}] deviates from identity by {residual:e}")]
    PSquareNotIdentity { i: usize, j: usize, residual: f64 },
    #[error("PNotCompatible: (P^T g P - g)[{i}][{j}] = {residual:e}")]
    PNotCompatible { i: usize, j: usize, residual: f64 },
    #[error("TraceNonZero: tr P = {trace}")]
    TraceNonZero { trace: f64 },
    #[error("BracketNotAntisymmetric: C^{k}_{{{i}{j}}} = {a} but C^{k}_{{{j}{i}}} = {b}")]
    BracketNotAntisymmetric {
        i: usize,
        j: usize,
        k: usize,
        a: f64,
        b: f64,
    },
    #[error("JacobiViolated: cyclic sum on ({i},{j},{k}) has component {l} = {residual:e}")]
    JacobiViolated {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
        residual: f64,
    },
    #[error("AssociatedMetricSingular: g(x, Py) is not invertible")]
    AssociatedMetricSingular,
    #[error("SingularMetric: metric is not invertible")]
    SingularMetric,

    #[error("NotTorsionLike: antisymmetry defect {defect:e} in the first two slots")]
    NotTorsionLike { defect: f64 },
    #[error("NotW3: cyclic sum of F is {cyclic:e} (tolerance {tol:e})")]
    NotW3 { cyclic: f64, tol: f64 },
}

impl Error {
    /// Short name of the violated invariant, as used in diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::SlotOutOfRange { .. } => "SlotOutOfRange",
            Error::SlotOrder { .. } => "SlotOrder",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DegreeMismatch { .. } => "DegreeMismatch",
            Error::WrongLength { .. } => "WrongLength",
            Error::NonFinite { .. } => "NonFinite",
            Error::InvalidDimension(_) => "InvalidDimension",
            Error::NotSymmetric { .. } => "NotSymmetric",
            Error::NotPositiveDefinite => "NotPositiveDefinite",
            Error::PSquareNotIdentity { .. } => "PSquareNotIdentity",
            Error::PNotCompatible { .. } => "PNotCompatible",
            Error::TraceNonZero { .. } => "TraceNonZero",
            Error::BracketNotAntisymmetric { .. } => "BracketNotAntisymmetric",
            Error::JacobiViolated { .. } => "JacobiViolated",
            Error::AssociatedMetricSingular => "AssociatedMetricSingular",
            Error::SingularMetric => "SingularMetric",
            Error::NotTorsionLike { .. } => "NotTorsionLike",
            Error::NotW3 { .. } => "NotW3",
        }
    }
}
