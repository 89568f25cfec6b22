//! Error type shared by every module of the crate.
//!
//! Input validation is strict: constructors and parsers reject data that
//! violates a documented invariant, and the error message names the failing
//! constraint so that a caller (or a test) can match on it.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// `residue` was called with a non-positive modulus.
    #[error("invalid modulus {0}: residue requires r >= 1")]
    InvalidModulus(i64),

    /// An orbifold point violated one of its defining constraints.
    /// `constraint` names the violated condition verbatim.
    #[error("invalid orbifold point ({r},{b}): violates {constraint}")]
    InvalidOrbifoldPoint {
        r: u64,
        b: u64,
        constraint: &'static str,
    },

    /// An order multiset contained an entry below 2.
    #[error("invalid order {0}: multiset entries must satisfy r >= 2")]
    InvalidOrder(u64),

    /// A local index was negative.
    #[error("invalid local index {0}: indices must satisfy i >= 0")]
    InvalidLocalIndex(i64),

    /// A local-index assignment did not fit its basket.
    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    /// A divisor multiple `s` fell outside the open interval (0, q).
    #[error("multiple s = {s} out of range: requires 0 < s < q = {q}")]
    MultipleOutOfRange { s: u64, q: u64 },

    /// A Riemann-Roch evaluation was requested without asserting the
    /// hypothesis that makes local indices scale linearly in `s`.
    #[error(
        "caller must assert the Gorenstein-along-crepant-centers hypothesis \
         before evaluating h^0 via linear local indices"
    )]
    HypothesisNotAsserted,

    /// A search or evaluation configuration was rejected.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A slope-inequality context was rejected.
    #[error("invalid slope context: {0}")]
    InvalidKmContext(String),

    /// A verifier requiring a prime index was called with a composite one.
    #[error("invalid input: q = {0} is not prime")]
    NotPrime(u64),

    /// An h^0 evaluation that must be a nonnegative integer was not.
    #[error("infeasible evaluation at s = {s}: h^0 = {value} is not a nonnegative integer")]
    InfeasibleH0 { s: u64, value: String },

    /// Text input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}
