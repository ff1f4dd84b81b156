use thiserror::Error;

/// Errors produced by the geometric constructions and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("conic matrix is singular (relative determinant {0:e})")]
    SingularConic(f64),
    #[error("conic matrix is the zero matrix")]
    ZeroMatrix,
    #[error("witness point lies on the conic")]
    WitnessOnConic,
    #[error("pencil combination is the zero matrix")]
    ZeroBlend,
    #[error("conic is not a parabola")]
    NotAParabola,
    #[error("parabola parameter must be positive, got {0}")]
    NonpositiveParameter(f64),
    #[error("triangle is degenerate (area/diameter^2 = {0:e})")]
    DegenerateTriangle(f64),
    #[error("pencil member at lambda = {0} is a singular parabola")]
    SingularPencilMember(f64),
    #[error("cubic root computation failed: {0}")]
    NumericalRootFailure(String),
    #[error("region is empty or has no interior")]
    EmptyRegion,
    #[error("region admits no inscribed parabola")]
    NoInscribedParabola,
    #[error("region contains parabolas of arbitrary size")]
    UnboundedParameter,
    #[error("horocycles have no common interior")]
    NoCommonInterior,
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("verification failed: {check}: {detail}")]
    VerificationFailure { check: String, detail: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
