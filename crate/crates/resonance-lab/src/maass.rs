//! Maass-form input files.
//!
//! Plain text, `#` starts a comment. One line `r <spectral parameter>`
//! followed by `<prime> <lambda(prime)>` pairs; the Hecke relations fill in
//! all other coefficients.

use std::path::Path;

use resonance_core::error::{Error, Result};

/// Parsed contents of a Maass form file.
#[derive(Clone, Debug)]
pub struct MaassInput {
    pub r: f64,
    pub prime_lambdas: Vec<(u64, f64)>,
}

impl MaassInput {
    /// Largest prime with a supplied eigenvalue (0 if none).
    pub fn max_prime(&self) -> u64 {
        self.prime_lambdas.iter().map(|&(p, _)| p).max().unwrap_or(0)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Parse the text form; line numbers in errors are 1-based.
pub fn parse_maass_text(text: &str) -> Result<MaassInput> {
    let mut r: Option<f64> = None;
    let mut prime_lambdas: Vec<(u64, f64)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let head = fields.next().expect("non-empty line has a first field");
        if head == "r" {
            if r.is_some() {
                return Err(parse_err(line_no, "duplicate spectral parameter line"));
            }
            let value = fields
                .next()
                .ok_or_else(|| parse_err(line_no, "missing value after 'r'"))?;
            let parsed: f64 = value
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad spectral parameter '{value}'")))?;
            if !parsed.is_finite() {
                return Err(parse_err(line_no, "spectral parameter must be finite"));
            }
            r = Some(parsed);
        } else {
            let p: u64 = head
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad prime '{head}'")))?;
            if !is_prime(p) {
                return Err(parse_err(line_no, format!("{p} is not prime")));
            }
            let value = fields
                .next()
                .ok_or_else(|| parse_err(line_no, format!("missing eigenvalue for prime {p}")))?;
            let lam: f64 = value
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad eigenvalue '{value}'")))?;
            if !lam.is_finite() {
                return Err(parse_err(line_no, "eigenvalue must be finite"));
            }
            if prime_lambdas.iter().any(|&(q, _)| q == p) {
                return Err(parse_err(line_no, format!("duplicate entry for prime {p}")));
            }
            prime_lambdas.push((p, lam));
        }
        if fields.next().is_some() {
            return Err(parse_err(line_no, "trailing fields on line"));
        }
    }
    let r = r.ok_or_else(|| parse_err(0, "missing 'r <spectral parameter>' line"))?;
    prime_lambdas.sort_unstable_by_key(|&(p, _)| p);
    Ok(MaassInput { r, prime_lambdas })
}

/// Read and parse a Maass form file.
pub fn parse_maass_file(path: &Path) -> Result<MaassInput> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_maass_text(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_well_formed_input() {
        let text = "# toy form\nr 9.5336952613536\n2 1.2\n3 -0.45 # inline note\n5 0.2\n";
        let input = parse_maass_text(text).unwrap();
        assert!((input.r - 9.5336952613536).abs() < 1e-15);
        assert_eq!(input.prime_lambdas.len(), 3);
        assert_eq!(input.max_prime(), 5);
    }

    #[test]
    fn rejects_malformed_input() {
        for (text, want_line) in [
            ("2 1.0\n", 0),                       // no r line
            ("r 9.5\nr 10.0\n", 2),               // duplicate r
            ("r 9.5\n4 1.0\n", 2),                // composite index
            ("r 9.5\n2 1.0\n2 0.5\n", 3),         // duplicate prime
            ("r 9.5\n2 banana\n", 2),             // bad eigenvalue
            ("r 9.5\n2 1.0 3.0\n", 2),            // trailing fields
            ("r\n", 1),                           // missing value
        ] {
            match parse_maass_text(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want_line, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }
}
