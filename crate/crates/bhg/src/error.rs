use std::fmt;

/// Crate-wide error type.
#[derive(Debug)]
pub enum Error {
    /// A parameter is outside the operation's domain.
    Domain(String),
    /// A floored transcendental value fell inside the guard band around an
    /// integer, so the floor cannot be trusted at the configured precision.
    Precision { index: u32, precision: u32 },
    /// A digit violates its base range during encoding.
    DigitRange { index: usize, digit: String, base: String },
    /// Predicted work or memory exceeds a configured budget.
    Budget {
        what: &'static str,
        limit: u64,
        required: u64,
    },
    /// An exact-enumeration cap was exceeded.
    CapExceeded {
        what: &'static str,
        cap: u64,
        required: u64,
    },
    /// Log-log fit is undefined because all counts coincide.
    DegenerateFit,
    /// A structural guarantee failed; this indicates a bug, not bad input.
    Internal(String),
    Io(std::io::Error),
    /// A sequence or report file could not be parsed.
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Precision { index, precision } => write!(
                f,
                "precision failure: e^((1+r)^{}) lies within 10^-{} of an integer; \
                 retry with higher precision",
                index,
                precision / 2
            ),
            Error::DigitRange { index, digit, base } => {
                write!(f, "digit {digit} at position {index} exceeds base {base}")
            }
            Error::Budget {
                what,
                limit,
                required,
            } => write!(f, "budget exceeded for {what}: need {required}, limit {limit}"),
            Error::CapExceeded {
                what,
                cap,
                required,
            } => write!(f, "cap exceeded for {what}: need {required}, cap {cap}"),
            Error::DegenerateFit => write!(f, "degenerate fit: all counts equal"),
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
            Error::Io(e) => write!(f, "io error: {e}"),
            Error::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}
