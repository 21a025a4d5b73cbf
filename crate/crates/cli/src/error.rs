use std::path::Path;

use kgreason_core::datasets::DatasetError;
use kgreason_core::evaluation::EvalError;
use kgreason_core::kg::KgError;
use kgreason_core::llm::LlmError;
use kgreason_core::planning::PlanningError;
use kgreason_core::reasoning::ReasoningError;
use kgreason_core::retrieval::RetrievalError;

/// Failure categories; each maps to its own process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input: {0}")]
    Input(String),
    #[error("config: {0}")]
    Config(String),
    #[error("data: {0}")]
    Data(String),
    #[error("llm: {0}")]
    Llm(String),
}

impl CliError {
    pub fn input(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Input(format!("{}: {err}", path.display()))
    }

    pub fn category(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Config(_) => "config",
            CliError::Data(_) => "data",
            CliError::Llm(_) => "llm",
        }
    }

    /// 2 is left to argument parsing errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 3,
            CliError::Config(_) => 4,
            CliError::Data(_) => 5,
            CliError::Llm(_) => 6,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<KgError> for CliError {
    fn from(e: KgError) -> Self {
        match e {
            KgError::Io(io) => io.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::Io(io) => io.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<PlanningError> for CliError {
    fn from(e: PlanningError) -> Self {
        match e {
            PlanningError::InvalidConfig(m) => CliError::Config(m),
            PlanningError::Io(io) => io.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<RetrievalError> for CliError {
    fn from(e: RetrievalError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<LlmError> for CliError {
    fn from(e: LlmError) -> Self {
        match e {
            LlmError::Config(m) => CliError::Config(m),
            other => CliError::Llm(other.to_string()),
        }
    }
}

impl From<ReasoningError> for CliError {
    fn from(e: ReasoningError) -> Self {
        match e {
            ReasoningError::Llm(l) => l.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
