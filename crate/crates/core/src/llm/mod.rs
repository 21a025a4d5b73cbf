//! Text-generation service contract, a blocking HTTP client and a scripted
//! mock.
//!
//! Wire format: `POST <endpoint>` with a JSON [`GenerationRequest`] body;
//! the response body is a JSON array of completion strings.

mod http;
mod mock;

pub use http::{HttpClient, HttpClientConfig, ENV_ENDPOINT, ENV_TIMEOUT_SECS, ENV_TOKEN};
pub use mock::ScriptedClient;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("invalid generation request: {0}")]
    InvalidRequest(String),
    #[error("generation failed after {attempts} attempt(s){}: {message}", status.map(|s| format!(" (status {s})")).unwrap_or_default())]
    Transport {
        status: Option<u16>,
        attempts: u32,
        message: String,
    },
    #[error("scripted client exhausted after {0} call(s)")]
    MockExhausted(usize),
    #[error("missing configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRequest {
    pub prompt: String,
    pub num_completions: usize,
    pub max_new_tokens: usize,
    pub temperature: f64,
    pub stop_sequences: Vec<String>,
}

impl GenerationRequest {
    /// Greedy single-completion request.
    pub fn new(prompt: impl Into<String>) -> Self {
        GenerationRequest {
            prompt: prompt.into(),
            num_completions: 1,
            max_new_tokens: 256,
            temperature: 0.0,
            stop_sequences: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if self.num_completions == 0 {
            return Err(LlmError::InvalidRequest("num_completions must be >= 1".into()));
        }
        if self.max_new_tokens == 0 {
            return Err(LlmError::InvalidRequest("max_new_tokens must be >= 1".into()));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(LlmError::InvalidRequest("temperature must be finite and >= 0".into()));
        }
        Ok(())
    }
}

pub trait GenerationClient: Send + Sync {
    /// Completions in server order, at most `request.num_completions`.
    fn generate(&self, request: &GenerationRequest) -> Result<Vec<String>, LlmError>;
}

impl<C: GenerationClient + ?Sized> GenerationClient for &C {
    fn generate(&self, request: &GenerationRequest) -> Result<Vec<String>, LlmError> {
        (**self).generate(request)
    }
}

impl<C: GenerationClient + ?Sized> GenerationClient for Box<C> {
    fn generate(&self, request: &GenerationRequest) -> Result<Vec<String>, LlmError> {
        (**self).generate(request)
    }
}

/// Validates `request`, calls `client` and trims any surplus completions.
pub fn generate<C: GenerationClient + ?Sized>(client: &C, request: &GenerationRequest) -> Result<Vec<String>, LlmError> {
    request.validate()?;
    let mut out = client.generate(request)?;
    out.truncate(request.num_completions);
    Ok(out)
}
