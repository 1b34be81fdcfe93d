use valuform_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Schema { path: format!("line {} column {}", e.line(), e.column()), message: e.to_string() }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_CERTIFICATE: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::ResourceCap { .. }) | CliError::Core(Error::Overflow) => EXIT_CAP,
            CliError::Core(Error::Certificate(_)) => EXIT_CERTIFICATE,
            _ => EXIT_PRECONDITION,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            EXIT_CAP => "resource-cap",
            EXIT_CERTIFICATE => "certificate",
            _ => "precondition",
        }
    }
}
