//! Unified error type for all library operations.

use std::fmt;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in a library call.
///
/// `Domain` covers violated preconditions and invariants, `Stability` a
/// numerical blow-up, `Bracket` a failed root bracket, `Fit` a failed
/// least-squares fit, `Format` a malformed input file, `Io` a filesystem
/// failure. Each variant carries a human-readable message with the offending
/// values.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input violates a documented precondition or type invariant.
    Domain(String),
    /// A time step produced a non-finite temperature (scheme blow-up).
    Stability(String),
    /// A bisection bracket could not be established.
    Bracket(String),
    /// Least-squares fit failed: singular system, iteration cap, or an
    /// inadmissible solution (non-positive width or asymptote).
    Fit(String),
    /// An input file violates its documented format.
    Format(String),
    /// Filesystem error while reading or writing.
    Io(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn stability(msg: impl Into<String>) -> Self {
        Error::Stability(msg.into())
    }
    pub fn bracket(msg: impl Into<String>) -> Self {
        Error::Bracket(msg.into())
    }
    pub fn fit(msg: impl Into<String>) -> Self {
        Error::Fit(msg.into())
    }
    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
    pub fn io(msg: impl Into<String>) -> Self {
        Error::Io(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Stability(m) => write!(f, "stability error: {m}"),
            Error::Bracket(m) => write!(f, "bracket error: {m}"),
            Error::Fit(m) => write!(f, "fit error: {m}"),
            Error::Format(m) => write!(f, "format error: {m}"),
            Error::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_includes_kind_and_message() {
        let e = Error::domain("fluence -1 must be >= 0");
        assert_eq!(e.to_string(), "domain error: fluence -1 must be >= 0");
        let e = Error::bracket("no surviving current up to 16x analytic");
        assert!(e.to_string().starts_with("bracket error:"));
    }
}
