//! Error type shared across the crate.

use std::fmt;

/// Errors produced by certified numerics and the operations built on them.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// The refinement budget was hit before the requested enclosure width
    /// was reached.
    PrecisionExhausted { bits: u32 },
    /// A sign or comparison could not be decided at the maximum allowed
    /// precision. For inputs that are supposed to be irrational and
    /// rationally independent this usually indicates a violated
    /// precondition.
    UndecidableAtPrecision { bits: u32, context: String },
    /// A certified exact tie (zero value, half-integer midpoint, equal
    /// branch values). Ties certify rational dependence somewhere in the
    /// inputs and are surfaced instead of being resolved arbitrarily.
    ExactTie { context: String },
    /// Invalid argument or out-of-domain request.
    Domain(String),
    /// An orbit step failed at the given depth (0-based).
    Orbit { depth: usize, source: Box<Error> },
    /// Proof-mode word selection found no pivot index passing the certified
    /// Diophantine test; evidence that the tuple is not in the assumed
    /// class at reachable scales.
    SelectorFailed { depth: usize, q: String },
    /// Commutator residual of an input family exceeds the tolerance.
    CommutationViolated { residual: f64, tol: f64 },
    /// A linearization divisor fell below the hard floor; the rotation
    /// number is effectively rational at working precision.
    SmallDivisorUnderflow { order: usize, magnitude: f64 },
    /// Compositional inversion of a series whose linear coefficient is zero.
    DegenerateLinearTerm,
    /// Input text could not be parsed.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::PrecisionExhausted { bits } => {
                write!(f, "precision budget exhausted at {bits} bits")
            }
            Error::UndecidableAtPrecision { bits, context } => {
                write!(f, "undecidable at {bits} bits: {context}")
            }
            Error::ExactTie { context } => write!(f, "certified exact tie: {context}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Orbit { depth, source } => {
                write!(f, "orbit failed at depth {depth}: {source}")
            }
            Error::SelectorFailed { depth, q } => {
                write!(f, "word selector failed at depth {depth} (q = {q}): no index passes the certified test")
            }
            Error::CommutationViolated { residual, tol } => {
                write!(f, "commutation violated: residual {residual:.3e} exceeds tolerance {tol:.3e}")
            }
            Error::SmallDivisorUnderflow { order, magnitude } => {
                write!(f, "small divisor underflow at order {order}: |lambda^n - lambda| = {magnitude:.3e}")
            }
            Error::DegenerateLinearTerm => write!(f, "series has zero linear coefficient"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Attaches an orbit depth to an error bubbling out of a step.
    pub fn at_depth(self, depth: usize) -> Error {
        Error::Orbit {
            depth,
            source: Box::new(self),
        }
    }
}
