//! Error type shared across the crate.

use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes surfaced by the numerical routines.
///
/// The split matters to callers: `Usage` variants are caller mistakes
/// (bad domain, missing data), `Accuracy`/`Conditioning` mean the
/// computation ran but cannot vouch for its answer.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Argument outside the routine's documented domain.
    Domain(&'static str),
    /// A coefficient table does not extend far enough for the request.
    IncompleteTable {
        what: &'static str,
        needed: u64,
        have: u64,
    },
    /// A resonator profile failed validation.
    ProfileRejected(String),
    /// Evaluation at (or too near) a pole of a gamma factor.
    Pole(&'static str),
    /// The computation is too ill-conditioned to trust.
    Conditioning(&'static str),
    /// A quadrature or root solve could not meet its tolerance.
    Accuracy {
        what: &'static str,
        achieved: f64,
        requested: f64,
    },
    /// Grid refinement hit its depth limit without stabilising.
    Refinement(&'static str),
    /// An enumeration would exceed the configured work budget.
    Budget(String),
    /// Input text could not be parsed (line numbers are 1-based).
    Parse { line: usize, msg: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::IncompleteTable { what, needed, have } => {
                write!(f, "{what} table too short: need {needed}, have {have}")
            }
            Error::ProfileRejected(m) => write!(f, "profile rejected: {m}"),
            Error::Pole(m) => write!(f, "pole encountered: {m}"),
            Error::Conditioning(m) => write!(f, "ill-conditioned: {m}"),
            Error::Accuracy {
                what,
                achieved,
                requested,
            } => write!(
                f,
                "{what}: achieved accuracy {achieved:.3e} misses requested {requested:.3e}"
            ),
            Error::Refinement(m) => write!(f, "grid refinement failed: {m}"),
            Error::Budget(m) => write!(f, "work budget exceeded: {m}"),
            Error::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
        }
    }
}
