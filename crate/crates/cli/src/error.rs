use thiserror::Error;

/// Failures of a run, grouped by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    /// `error kind=<kind>: <message>` on a single line.
    pub fn render(&self) -> String {
        let message = self.to_string().replace(['\n', '\r'], " ");
        format!("error kind={}: {message}", self.kind())
    }
}

impl From<weakphase_core::Error> for CliError {
    fn from(e: weakphase_core::Error) -> Self {
        use weakphase_core::Error as E;
        match e {
            E::Io(_) | E::MalformedRow { .. } | E::NonUniformGrid { .. } => CliError::Io(e.to_string()),
            E::InvalidScenario(_) => CliError::Config(e.to_string()),
            E::Serde(_) => CliError::Io(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
