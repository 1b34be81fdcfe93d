use alloc::string::String;
use core::fmt;

/// Failure modes shared by every module.
///
/// The variants are grouped the way callers react to them: precondition
/// violations, exhausted resource caps, and failed certificates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed polynomial text or unknown variable.
    Parse { input: String, message: String },
    /// Two objects live over different ring contexts.
    RingMismatch,
    /// A documented precondition does not hold.
    Precondition(String),
    /// A configured budget was exhausted. Never a silent truncation.
    ResourceCap { what: &'static str, limit: u64, detail: String },
    /// The unit ideal where a proper ideal is required.
    UnitIdeal,
    /// A point does not lie on the variety it was checked against.
    NotOnVariety(String),
    /// A computed certificate failed to verify.
    Certificate(String),
    /// Integer overflow in lattice arithmetic.
    Overflow,
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn cert(msg: impl Into<String>) -> Self {
        Error::Certificate(msg.into())
    }

    pub fn cap(what: &'static str, limit: u64, detail: impl Into<String>) -> Self {
        Error::ResourceCap { what, limit, detail: detail.into() }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { input, message } => write!(f, "cannot parse `{input}`: {message}"),
            Error::RingMismatch => f.write_str("ring contexts differ"),
            Error::Precondition(m) => write!(f, "precondition violated: {m}"),
            Error::ResourceCap { what, limit, detail } => {
                write!(f, "resource cap `{what}` = {limit} exceeded")?;
                if !detail.is_empty() {
                    write!(f, ": {detail}")?;
                }
                Ok(())
            }
            Error::UnitIdeal => f.write_str("ideal is the unit ideal"),
            Error::NotOnVariety(m) => write!(f, "point not on variety: {m}"),
            Error::Certificate(m) => write!(f, "certificate failure: {m}"),
            Error::Overflow => f.write_str("integer overflow in lattice arithmetic"),
        }
    }
}

impl core::error::Error for Error {}
