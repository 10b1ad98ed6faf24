use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cannot parse rational from {0:?}")]
    ParseScalar(String),

    #[error("{op} requires a non-negative argument, got {value}")]
    NegativeArgument { op: &'static str, value: i64 },

    #[error("binomial({n}, {k}) requires 0 <= k <= n")]
    BinomialRange { n: i64, k: i64 },

    #[error("double factorial needs an odd argument >= -1, got {0}")]
    DoubleFactorialDomain(i64),

    #[error("Eisenstein series needs an even weight >= 2, got {0}")]
    EisensteinWeight(i64),

    #[error("q^0 coefficient is a regularization placeholder and cannot be read by {0}")]
    UnknownConstant(&'static str),

    #[error("fit is underdetermined: {rows} usable rows for {unknowns} unknowns with margin {margin}")]
    Underdetermined { rows: usize, unknowns: usize, margin: usize },

    #[error("weight must be an even non-negative integer, got {0}")]
    OddWeight(i64),

    #[error("dimension constraint violated: sum of d_i is {sum} but g - 2 + n = {expected}")]
    Dimension { sum: i64, expected: i64 },

    #[error("invalid expansion window: {0}")]
    Window(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("string equation needs n >= 2 and a zero entry beside a positive one: {0}")]
    NoStringReduction(String),
}
