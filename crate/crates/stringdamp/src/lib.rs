//! Exact simulation and analysis of time-optimal damping for a closed string
//! driven by a bounded load at a single point.
//!
//! The state of the string lives on the torus `[0, 2π)`. Everything the flow
//! touches — boundary fields, controls, sign selections — is carried by
//! [`pwlin::PiecewiseLinear`], so the feedback dynamics reduce to exact
//! breakpoint algebra with no spatial grid. On top of that sit:
//!
//! * [`duals`] — cosine-coefficient dual vectors and their boundary traces,
//! * [`reach`] — support functions of reachable sets, limit shapes, the dual
//!   norm `ρ`, extremal states and membership certificates,
//! * [`friction`] — the dry-friction semiflow: soft-threshold resolvent,
//!   interval recursion, transport reconstruction and decay reports,
//! * [`spectral`] — singular-arc machinery: secular equation roots,
//!   half-integer-mode controls, the Eisenstein-type kernel,
//! * [`energy`] — energy functionals and empirical contraction diagnostics,
//! * [`verify`] — the seeded verification checks behind `stringdamp verify`.
//!
//! Every value in the crate is plain immutable data and every operation is a
//! pure function, so anything here can be shared between or moved across
//! threads without coordination. The track recursion is sequential in its
//! own intervals, but independent scenarios parallelize trivially.

// `!(x > 0.0)` rejects NaN where `x <= 0.0` would accept it; the negated
// form is deliberate in every validation below.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod duals;
pub mod energy;
pub mod friction;
pub mod pwlin;
mod quad;
pub mod reach;
pub mod spectral;
pub mod verify;

/// Errors reported by the toolkit.
///
/// Contract violations that a caller can trigger with bad data come back as
/// values; internal inconsistencies panic.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Evaluation or integration outside a non-periodic domain.
    OutOfDomain { x: f64, domain_length: f64 },
    /// Two functions with different lengths or periodicity were combined.
    DomainMismatch,
    /// An operation requiring a periodic function got a non-periodic one.
    NotPeriodic,
    /// Integration bounds with `a > b`.
    InvertedBounds { a: f64, b: f64 },
    /// A horizon or time argument that must be positive (or nonnegative) was not.
    BadHorizon(f64),
    /// Time argument outside the solved range of a track.
    TimeOutOfRange { t: f64, horizon: f64 },
    /// A reduced-problem operation received a dual vector with nonzero zero modes.
    NonzeroZeroModes { phi0: f64, psi0: f64 },
    /// The dual profile is identically zero, so no extremal state exists.
    IdenticallyZeroProfile,
    /// A membership query was given no dual vectors.
    EmptySample,
    /// A control exceeding the unit bound was supplied.
    ControlBound { sup: f64 },
    /// A control not covering the requested time interval was supplied.
    ControlNotCovering { needed: f64, available: f64 },
    /// No dual-norm formula is available for the requested problem.
    UnsupportedProblem(&'static str),
    /// A count or truncation argument below the allowed minimum.
    BadCount(usize),
    /// A frequency collided with a pole of the spectral transform.
    PoleCollision(f64),
    /// A singular control carried a harmonic off the half-integer lattice.
    NonHalfIntegerMode(f64),
    /// An empty evaluation grid was supplied.
    EmptyGrid,
    /// Times for a diagnostic series were not sorted increasing and nonnegative.
    UnsortedTimes,
    /// A displacement could not be recovered as a piecewise-linear function.
    NotPiecewiseConstant,
    /// Text-format or configuration parse failure.
    Parse(String),
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Error::OutOfDomain { x, domain_length } => {
                write!(f, "x = {x} outside the non-periodic domain [0, {domain_length}]")
            }
            Error::DomainMismatch => write!(f, "functions live on different domains"),
            Error::NotPeriodic => write!(f, "operation requires a periodic function"),
            Error::InvertedBounds { a, b } => write!(f, "inverted bounds: a = {a} > b = {b}"),
            Error::BadHorizon(t) => write!(f, "horizon must be positive, got {t}"),
            Error::TimeOutOfRange { t, horizon } => {
                write!(f, "t = {t} outside the solved range [0, {horizon})")
            }
            Error::NonzeroZeroModes { phi0, psi0 } => write!(
                f,
                "reduced problem requires zero zero-modes, got phi0 = {phi0}, psi0 = {psi0}"
            ),
            Error::IdenticallyZeroProfile => {
                write!(f, "dual profile is identically zero")
            }
            Error::EmptySample => write!(f, "empty dual-vector sample"),
            Error::ControlBound { sup } => {
                write!(f, "control exceeds the unit bound: sup |u| = {sup}")
            }
            Error::ControlNotCovering { needed, available } => write!(
                f,
                "control defined on [0, {available}] but needed on [0, {needed}]"
            ),
            Error::UnsupportedProblem(p) => {
                write!(f, "no dual-norm formula for the {p} problem")
            }
            Error::BadCount(n) => write!(f, "count must be at least 1, got {n}"),
            Error::PoleCollision(mu) => {
                write!(f, "frequency mu = {mu} collides with an integer pole")
            }
            Error::NonHalfIntegerMode(mu) => {
                write!(f, "mu = {mu} is not of the form k + 1/2")
            }
            Error::EmptyGrid => write!(f, "empty evaluation grid"),
            Error::UnsortedTimes => write!(f, "times must be increasing and nonnegative"),
            Error::NotPiecewiseConstant => {
                write!(f, "field has a sloped odd part; displacement is not piecewise linear")
            }
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
