use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

#[derive(Serialize)]
struct Report<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Schema(_) => "schema",
            CliError::Numeric(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    /// One-line JSON report for stderr.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&Report { error: self.kind(), message: self.to_string(), exit_code: self.exit_code() })
            .expect("report serializes")
    }
}

impl From<qsync::Error> for CliError {
    fn from(e: qsync::Error) -> Self {
        use qsync::Error::*;
        match e {
            Argument(_) | Config(_) | Validation(_) => CliError::Schema(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
