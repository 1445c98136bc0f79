use thiserror::Error;

/// Failures raised by the analysis and construction routines.
///
/// Every variant has a stable string code (see [`Error::code`]) which the
/// command line front end writes into its reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("family is empty")]
    EmptyFamily,
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("orbit family is not a Riesz sequence (smallest fiber eigenvalue {min_eigenvalue:e})")]
    NotRiesz { min_eigenvalue: f64 },
    #[error("fiber rank varies across the dual sampling ({min_rank}..={max_rank})")]
    RankJump { min_rank: usize, max_rank: usize },
    #[error("family is not wandering (orbit Gram residual {residual:e})")]
    NotWandering { residual: f64 },
    #[error("orbit span of the first family is not contained in that of the second")]
    NotContained,
    #[error("continuous basis selection failed at grid point {point} (alignment residual {residual:e})")]
    SelectionObstruction { point: usize, residual: f64 },
    #[error("subspace is not invariant under the group action")]
    NotInvariant,
    #[error("subspaces do not form a direct sum: {0}")]
    NotDirectSum(String),
    #[error("pairing between the family and the dual subspace is singular at dual point {point}")]
    SingularPairing { point: usize },
    #[error("hypothesis failure: {0}")]
    HypothesisFailure(String),
    #[error("no well-conditioned intertwiner found after {attempts} seeds")]
    GenericityFailure { attempts: usize },
    #[error("vector support width {width} needs a grid of at least {}, got {grid}", 2 * width)]
    SupportExceedsGrid { width: usize, grid: usize },
    #[error("dense realization too large ({size} > {limit})")]
    SizeLimit { size: usize, limit: usize },
    #[error("operation requires an exact (finite abelian) system")]
    NotExact,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyFamily => "EmptyFamily",
            Error::SizeMismatch(_) => "SizeMismatch",
            Error::NotRiesz { .. } => "NotRiesz",
            Error::RankJump { .. } => "RankJump",
            Error::NotWandering { .. } => "NotWandering",
            Error::NotContained => "NotContained",
            Error::SelectionObstruction { .. } => "SelectionObstruction",
            Error::NotInvariant => "NotInvariant",
            Error::NotDirectSum(_) => "NotDirectSum",
            Error::SingularPairing { .. } => "SingularPairing",
            Error::HypothesisFailure(_) => "HypothesisFailure",
            Error::GenericityFailure { .. } => "GenericityFailure",
            Error::SupportExceedsGrid { .. } => "SupportExceedsGrid",
            Error::SizeLimit { .. } => "SizeLimit",
            Error::NotExact => "NotExact",
            Error::Precondition(_) => "Precondition",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
