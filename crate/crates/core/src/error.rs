use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid root-of-unity order {0}: need l >= 2")]
    InvalidOrder(i64),

    #[error("division by zero")]
    DivisionByZero,

    #[error("prime {0} divides a denominator; resample the prime")]
    BadPrime(u64),

    #[error("Laurent polynomial is not divisible by (q - eps): remainder {0}")]
    NotDivisible(String),

    #[error("divisor does not divide dividend")]
    DoesNotDivide,

    #[error("relation {m} > {j}: tail monomial {tail:?} is not supported strictly between the two generators")]
    NonLsShape { m: usize, j: usize, tail: Vec<u32> },

    #[error("relation {m} > {j} is not homogeneous: {detail}")]
    Grading { m: usize, j: usize, detail: String },

    #[error("relation {m} > {j} has zero reordering scalar")]
    Degenerate { m: usize, j: usize },

    #[error("presentation has no relation for the pair {m} > {j}")]
    MissingRelation { m: usize, j: usize },

    #[error("malformed presentation: {0}")]
    BadPresentation(String),

    #[error("element is not central: it fails to commute with generator {generator}{}", power_note(*power_of))]
    NotCentral { power_of: Option<usize>, generator: usize },

    #[error("bracket {{z_{a}, z_{b}}} does not lie in the central subalgebra")]
    NotClosed { a: usize, b: usize, element: String },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("outside the hypotheses of the closed formula: {0}")]
    OutOfHypothesis(String),

    #[error("rectangular formula needs m <= n; transpose the matrix algebra (got m={m}, n={n})")]
    TransposeHint { m: usize, n: usize },

    #[error("predicate undefined on the zero polynomial")]
    ZeroInput,

    #[error("could not find a usable sample after {0} attempts")]
    SamplingExhausted(usize),

    #[error("invalid input: {0}")]
    Invalid(String),
}

fn power_note(p: Option<usize>) -> String {
    match p {
        Some(j) => format!(" (l-th power of generator {j})"),
        None => String::new(),
    }
}

impl Error {
    /// Stable machine-readable identifier, used in CLI error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidOrder(_) => "invalid-order",
            Error::DivisionByZero => "division-by-zero",
            Error::BadPrime(_) => "bad-prime",
            Error::NotDivisible(_) => "not-divisible",
            Error::DoesNotDivide => "does-not-divide",
            Error::NonLsShape { .. } => "non-ls-shape",
            Error::Grading { .. } => "grading",
            Error::Degenerate { .. } => "degenerate",
            Error::MissingRelation { .. } => "missing-relation",
            Error::BadPresentation(_) => "bad-presentation",
            Error::NotCentral { .. } => "not-central",
            Error::NotClosed { .. } => "not-closed",
            Error::SizeMismatch(_) => "size-mismatch",
            Error::OutOfHypothesis(_) => "out-of-hypothesis",
            Error::TransposeHint { .. } => "transpose",
            Error::ZeroInput => "zero-input",
            Error::SamplingExhausted(_) => "sampling-exhausted",
            Error::Invalid(_) => "invalid-input",
        }
    }
}
