use thiserror::Error;

use crate::numeric::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("valuation of zero integer requested")]
    ZeroIntegerValuation,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not a bijection of [0,inf): f(0) = {0}")]
    NotBijection(Rational),

    #[error("not a totally ramified transition function")]
    NotTransitionFunction,

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("lower envelope is not strictly increasing (final slope {0})")]
    EnvelopeNotIncreasing(Rational),

    #[error("degenerate polygon: fewer than two finite entries")]
    DegeneratePolygon,

    #[error("shifted polynomial required: constant term has finite valuation")]
    ShiftedPolynomialRequired,

    #[error("invalid valuation profile: {0}")]
    InvalidProfile(String),

    #[error("degree not a p-power > 1: q = {q}, p = {p}")]
    DegreeNotPPower { q: u64, p: u64 },

    #[error("constant term valuation must equal 1/e_(E_n/K) = {expected}, found {found}")]
    ConstantTerm { expected: Rational, found: String },

    #[error("profile violates uniformizer-root purity bound at index {index}: needs >= {bound}, found {found}")]
    Purity {
        index: usize,
        bound: Rational,
        found: String,
    },

    #[error("inseparable step: the linear coefficient of the shifted polynomial vanishes")]
    Inseparable,

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("cannot certify: {0}")]
    CannotCertify(String),

    #[error("not Frobenius-like mod pi: coefficient {index} needs valuation >= {bound}")]
    NotFrobeniusLike { index: usize, bound: Rational },

    #[error("iterate polynomial must vanish at 0")]
    IterateNonzeroAtZero,

    #[error("catalog: {0}")]
    Catalog(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Error {
        Error::Step {
            step,
            source: Box::new(self),
        }
    }

    /// True for errors raised by tower/step validation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Step { .. }
            | Error::DegreeNotPPower { .. }
            | Error::ConstantTerm { .. }
            | Error::Purity { .. }
            | Error::Inseparable
            | Error::InvalidProfile(_)
            | Error::NotFrobeniusLike { .. }
            | Error::IterateNonzeroAtZero
            | Error::Catalog(_)
            | Error::Precondition(_)
        )
    }
}
