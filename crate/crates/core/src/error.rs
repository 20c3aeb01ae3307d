use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field parameter m = {0}: must be a positive square-free integer")]
    InvalidFieldParameter(i64),

    #[error("m = 3 has a different cusp stabilizer; its verdict is fixed rather than computed")]
    UnsupportedBaseCusp,

    #[error("zero vector has no primitive normalization")]
    ZeroVector,

    #[error("vector has non-positive norm {0}")]
    NonPositiveNorm(i128),

    #[error("roots {0} and {1} meet at a non-crystallographic angle (4 cos^2 = {2})")]
    NonCrystallographicAngle(String, String, String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(i64, i64),

    #[error("invalid discriminant {0}")]
    InvalidDiscriminant(i64),

    #[error("class filter case must be in 1..=4, got {0}")]
    InvalidFilterCase(u8),

    #[error("no vertex is admissible for the quasi-reflective cusp bound")]
    NoAdmissibleVertex,

    #[error("matrix does not preserve the lattice form")]
    NotAnIsometry,

    #[error("isometry is not parabolic")]
    NotParabolic,

    #[error("precondition violated: {0}")]
    Precondition(&'static str),

    #[error("unknown table id {0:?}")]
    UnknownTable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
