use thiserror::Error;

/// Errors raised across the library. Identity failures are not errors; they are
/// reported as failing check items.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("denominator lowest coefficient {0} is not an invertible constant")]
    NonInvertibleLeading(String),
    #[error("denominator vanishes at the evaluation point")]
    Pole,
    #[error("series expansion needs a polynomial numerator and denominator, got exponent {0:?}")]
    NegativeExponent(Vec<i32>),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("residue cardinality {0} must be an odd prime power at least 3")]
    BadResidueCardinality(u64),
    #[error("{u} is divisible by {p}")]
    NotAUnit { u: i64, p: u64 },
    #[error("valuation {0} of d is outside {{0, 1}}")]
    ValuationOutOfRange(i64),
    #[error("zero is not a valid discriminant")]
    ZeroDiscriminant,
    #[error("unsupported L-factor kind {0:?}")]
    UnsupportedLFactor(String),
    #[error("no spectral-radius bound: |lambda| = {lambda} exceeds q+1 = {bound}")]
    SpectralBound { lambda: String, bound: u64 },
    #[error("s = {0} must be an integer at least 2")]
    BadExponent(i64),
    #[error("coset budget of {budget} visits exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("precision p^{needed} does not fit in 128-bit arithmetic")]
    PrecisionOverflow { needed: u32 },
    #[error("level N={n} is too small to determine stratum (l1={l1}, l2={l2})")]
    LevelTooSmall { n: u32, l1: u32, l2: u32 },
    #[error("census at q={q} exceeds the enumeration budget")]
    CensusBudget { q: u64 },
    #[error("s = {s} outside the convergence range s > {min}")]
    OutOfRange { s: f64, min: f64 },
    #[error("line {line}: {msg}")]
    MalformedRow { line: usize, msg: String },
    #[error("prime {0} listed twice")]
    DuplicatePrime(u64),
    #[error("no Hecke eigenvalue for prime {0}")]
    MissingEigenvalue(u64),
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
