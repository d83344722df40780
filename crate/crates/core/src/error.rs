use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate configuration")]
    Degenerate,
    #[error("degenerate subset {0:?}")]
    DegenerateSubset(Vec<u32>),
    #[error("unknown hyperplane label {0}")]
    UnknownLabel(u32),
    #[error("duplicate hyperplane label {0}")]
    DuplicateLabel(u32),
    #[error("hyperplanes {0} and {1} coincide")]
    DuplicateHyperplane(u32, u32),
    #[error("hyperplane normal is the zero vector")]
    ZeroNormal,
    #[error("affine map is singular")]
    SingularMap,
    #[error("hyperplane is vertical (zero coefficient on the last coordinate)")]
    VerticalHyperplane,
    #[error("point does not lie on the corner surface branch")]
    PointOffSurface,
    #[error("volume spectrum is empty")]
    EmptySpectrum,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("no general-position arrangement found after {0} attempts")]
    GeneralPositionFailure(usize),
    #[error("parameters do not match the arrangement: {0}")]
    ParamMismatch(String),
    #[error("shift covariance failed: {0}")]
    CovarianceFailure(String),
    #[error("arrangement contains parallel planes {0} and {1}")]
    ParallelPlanes(u32, u32),
    #[error("cannot decode parameter vector: {0}")]
    DecodeFailure(String),
    #[error("parse error: {0}")]
    Parse(String),
}
