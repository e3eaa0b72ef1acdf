use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] bispec_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0} enclosure violation(s)")]
    EnclosureViolation(usize),
    #[error("inequality residual {0:e} exceeds 1e-12")]
    InequalityViolation(f64),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core(e) if !e.is_numerical() => 1,
            CliError::Core(_) | CliError::Io(_) | CliError::Csv(_) | CliError::InequalityViolation(_) => 2,
            CliError::EnclosureViolation(_) => 3,
        }
    }

    pub fn reason(&self) -> &'static str {
        match self {
            CliError::Config(_) => "invalid_config",
            CliError::Core(e) => e.code(),
            CliError::Io(_) => "io_error",
            CliError::Csv(_) => "csv_error",
            CliError::EnclosureViolation(_) => "enclosure_violation",
            CliError::InequalityViolation(_) => "inequality_violation",
        }
    }
}
