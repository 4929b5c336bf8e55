use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong between reading a model file and issuing a verdict.
///
/// Variants fall into four families, which the command-line front end maps to exit codes
/// via [`Error::class`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown generator `{name}`")]
    UnknownGenerator { line: usize, name: String },
    #[error(
        "line {line}: d({generator}) must have degree {expected}, found a term of degree {found}"
    )]
    DegreeMismatch {
        line: usize,
        generator: String,
        expected: u32,
        found: u32,
    },
    #[error("line {line}: odd generator `{name}` appears with exponent > 1")]
    OddExponent { line: usize, name: String },

    #[error("model failed validation: {0}")]
    ValidationFailed(String),
    #[error("not a Poincare duality model (first failure in degree {degree}): {reason}")]
    NotPoincareDuality { degree: u32, reason: String },

    #[error("composite of consecutive differentials is nonzero ({context})")]
    CompositionNotZero { context: String },
    #[error("derivation has no image declared for generator `{0}`")]
    MissingImage(String),
    #[error("differential does not square to zero: {0}")]
    DifferentialSquareNonzero(String),
    #[error("projection kills the fundamental class")]
    TopClassCollapse,
    #[error("duality pairing is singular in degree {degree}")]
    SingularDuality { degree: u32 },
    #[error("Hodge pieces do not sum to the loop Betti number in degree {degree}: {hodge_sum} vs {total}")]
    HodgeSumMismatch {
        degree: u32,
        hodge_sum: usize,
        total: usize,
    },
    #[error("slice bookkeeping error: {0}")]
    Internal(String),

    #[error("quasi-isomorphism fails at {locus}: {detail}")]
    QuasiIsoFailure { locus: String, detail: String },
    #[error("chain map identity fails: {0}")]
    ChainMapFailure(String),
    #[error("structure identity violated: {0}")]
    IdentityViolation(String),
    #[error("duality sign identity fails in degree {degree}")]
    SignIdentityFailure { degree: i64 },
    #[error("aut ranks disagree with the dual complex at n = {degree}: {direct} vs {dual}")]
    DualMismatch {
        degree: u32,
        direct: usize,
        dual: usize,
    },
    #[error("theorem check fails at n = {degree}: loop H^(1) = {loop_rank}, A(x)sV = {quotient_rank}, derivations = {derivation_rank}")]
    TheoremMismatch {
        degree: u32,
        loop_rank: usize,
        quotient_rank: usize,
        derivation_rank: usize,
    },
}

/// Coarse classification of an [`Error`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The input could not be read as a model.
    Input,
    /// The input is a model, but not one the constructions accept.
    Validation,
    /// A mathematical identity that should hold does not.
    Mismatch,
    /// An internal consistency check fired.
    Internal,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse { .. }
            | Error::UnknownGenerator { .. }
            | Error::DegreeMismatch { .. }
            | Error::OddExponent { .. } => ErrorClass::Input,
            Error::ValidationFailed(_) | Error::NotPoincareDuality { .. } => ErrorClass::Validation,
            Error::QuasiIsoFailure { .. }
            | Error::ChainMapFailure(_)
            | Error::IdentityViolation(_)
            | Error::SignIdentityFailure { .. }
            | Error::DualMismatch { .. }
            | Error::TheoremMismatch { .. }
            | Error::DifferentialSquareNonzero(_)
            | Error::SingularDuality { .. } => ErrorClass::Mismatch,
            Error::CompositionNotZero { .. }
            | Error::MissingImage(_)
            | Error::TopClassCollapse
            | Error::HodgeSumMismatch { .. }
            | Error::Internal(_) => ErrorClass::Internal,
        }
    }
}
