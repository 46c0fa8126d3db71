//! Resolved run configuration shared by all subcommands.

use std::path::PathBuf;

use resonance_core::arith::{EigenvalueTable, PrimeList};
use resonance_core::error::{Error, Result};
use resonance_core::resonator::{ProfileMode, ResonatorProfile};

use crate::maass::parse_maass_file;

/// Which form the run works with.
#[derive(Clone, Debug)]
pub enum FormSelector {
    /// The holomorphic cusp form of weight 12 (Ramanujan tau coefficients).
    Delta,
    /// An even Maass form described by an input file.
    MaassFile(PathBuf),
}

/// Default absolute tolerance (phase residuals; also the unit scale for the
/// verify suite's per-check thresholds).
pub const DEFAULT_TOL: f64 = 1e-9;

/// All knobs a run needs, resolved from the command line.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub form: FormSelector,
    pub t: f64,
    pub theta: f64,
    pub xi: f64,
    pub mode: ProfileMode,
    /// Custom-mode prime window.
    pub pmin: f64,
    pub pmax: f64,
    /// Custom-mode resonator length parameter L.
    pub l_value: f64,
    /// Absolute tolerance; the verify suite scales its per-check thresholds
    /// by `tol / DEFAULT_TOL` so tightening to 0 reports failures per check.
    pub tol: f64,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t >= 20.0 && self.t.is_finite()) {
            return Err(Error::Domain("T must be finite and >= 20"));
        }
        if !self.theta.is_finite() {
            return Err(Error::Domain("theta must be finite"));
        }
        if !(self.xi > 0.0 && self.xi < 1.0 / 3.0) {
            return Err(Error::Domain("xi must lie in (0, 1/3)"));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::Domain("tol must be >= 0"));
        }
        if matches!(self.mode, ProfileMode::Custom) && !(self.pmin < self.pmax) {
            return Err(Error::Domain("custom mode needs pmin < pmax"));
        }
        Ok(())
    }

    /// The resonator profile this config describes. Custom mode keeps the
    /// supports at toy scale: R* products capped at min(pmax, 5000) and the
    /// A-part at 10 (the exhaustive enumerations stay within budget).
    pub fn profile(&self) -> Result<ResonatorProfile> {
        match self.mode {
            ProfileMode::Standard => ResonatorProfile::standard(self.t, self.xi),
            ProfileMode::Custom => ResonatorProfile::custom(
                self.t,
                self.xi,
                (self.pmin, self.pmax),
                self.l_value,
                self.pmax.min(5000.0),
                10.0,
            ),
        }
    }

    /// Verify-suite threshold: the check's natural tolerance scaled by the
    /// user's tol relative to the default.
    pub fn scaled_tol(&self, natural: f64) -> f64 {
        natural * (self.tol / DEFAULT_TOL)
    }

    /// Build the eigenvalue table for this form, out to `want` if possible.
    /// For a Maass file the limit is clamped to the longest prefix of primes
    /// the file covers; the bool reports whether clamping happened.
    pub fn build_table(&self, want: u64) -> Result<(EigenvalueTable, bool)> {
        match &self.form {
            FormSelector::Delta => Ok((EigenvalueTable::build_delta(want)?, false)),
            FormSelector::MaassFile(path) => {
                let input = parse_maass_file(path)?;
                let mut limit = want.min(input.max_prime());
                if limit < 2 {
                    return Err(Error::Parse {
                        line: 0,
                        msg: String::from("Maass file supplies no prime eigenvalues"),
                    });
                }
                // clamp below the first missing prime
                let primes = PrimeList::sieve(limit)?;
                for &p in primes.as_slice() {
                    if !input.prime_lambdas.iter().any(|&(q, _)| q == p) {
                        limit = limit.min(p - 1);
                        break;
                    }
                }
                let table = EigenvalueTable::build_maass(input.r, &input.prime_lambdas, limit)?;
                Ok((table, limit < want))
            }
        }
    }

    /// Config block embedded in every emitted report.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "form": match &self.form {
                FormSelector::Delta => serde_json::json!("delta"),
                FormSelector::MaassFile(p) => serde_json::json!(p.display().to_string()),
            },
            "T": self.t,
            "theta": self.theta,
            "xi": self.xi,
            "mode": match self.mode {
                ProfileMode::Standard => "standard",
                ProfileMode::Custom => "custom",
            },
            "pmin": self.pmin,
            "pmax": self.pmax,
            "L": self.l_value,
            "tol": self.tol,
        })
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            form: FormSelector::Delta,
            t: 200.0,
            theta: 0.0,
            xi: 0.05,
            mode: ProfileMode::Custom,
            pmin: 100.0,
            pmax: 10_000.0,
            l_value: 5.0,
            tol: DEFAULT_TOL,
            out: None,
        }
    }
}
