use thiserror::Error;

/// Errors produced by the numerical pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("x = {x} lies outside the sampled domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("integration failed near x = {x}: {reason}")]
    IntegrationFailure { x: f64, reason: String },

    #[error("Jost normalization is degenerate at k = 0")]
    DegenerateJost,

    #[error("grids or momenta of the two fields do not match")]
    MismatchedGrids,

    #[error("Wronskian {modulus:e} below threshold at k = {k}")]
    DegenerateWronskian { k: String, modulus: f64 },

    #[error("Weyl solution vanishes at a = {a}; the m-function has a pole here")]
    PoleAtSample { a: f64 },

    #[error("evaluation at k = {k} hits a pole; use residue_at")]
    PoleEvaluation { k: String },

    #[error("residue extrapolation did not converge: {0}")]
    HigherOrderSingularity(String),

    #[error("momentum {omega} is not a full-reflection point (|R| = {modulus})")]
    NotResonant { omega: f64, modulus: f64 },

    #[error("left tail is not square integrable: {0}")]
    TailDivergence(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("eigenfunctions are not orthonormal: {0}")]
    NotOrthonormal(String),

    #[error("tau argument vanishes at x = {x}, t = {t}")]
    Singular { x: f64, t: f64 },

    #[error("discretization failure: {0}")]
    Discretization(String),

    #[error("truncation not converged: {0}")]
    Truncation(String),

    #[error("step rejected: {0}")]
    StepRejected(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// True for failures caused by the caller's input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::OutOfDomain { .. }
                | Error::DegenerateJost
                | Error::MismatchedGrids
                | Error::NotResonant { .. }
                | Error::PoleEvaluation { .. }
                | Error::Io(_)
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::IntegrationFailure { .. } => "integration_failure",
            Error::DegenerateJost => "degenerate_jost",
            Error::MismatchedGrids => "mismatched_grids",
            Error::DegenerateWronskian { .. } => "degenerate_wronskian",
            Error::PoleAtSample { .. } => "pole_at_sample",
            Error::PoleEvaluation { .. } => "pole_evaluation",
            Error::HigherOrderSingularity(_) => "higher_order_singularity",
            Error::NotResonant { .. } => "not_resonant",
            Error::TailDivergence(_) => "tail_divergence",
            Error::InternalConsistency(_) => "internal_consistency",
            Error::NotOrthonormal(_) => "not_orthonormal",
            Error::Singular { .. } => "singular",
            Error::Discretization(_) => "discretization",
            Error::Truncation(_) => "truncation",
            Error::StepRejected(_) => "step_rejected",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
