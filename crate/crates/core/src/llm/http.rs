use std::sync::{Condvar, Mutex};
use std::time::Duration;

use super::{GenerationClient, GenerationRequest, LlmError};

pub const ENV_ENDPOINT: &str = "KGREASON_LLM_ENDPOINT";
pub const ENV_TOKEN: &str = "KGREASON_LLM_TOKEN";
pub const ENV_TIMEOUT_SECS: &str = "KGREASON_LLM_TIMEOUT_SECS";

#[derive(Debug, Clone)]
pub struct HttpClientConfig {
    pub endpoint: String,
    pub token: Option<String>,
    pub timeout: Duration,
    /// Extra attempts after the first, on transport errors and 5xx only.
    pub retries: u32,
    pub backoff_base: Duration,
    pub max_in_flight: usize,
}

impl HttpClientConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        HttpClientConfig {
            endpoint: endpoint.into(),
            token: None,
            timeout: Duration::from_secs(60),
            retries: 2,
            backoff_base: Duration::from_millis(250),
            max_in_flight: 4,
        }
    }

    pub fn from_env() -> Result<Self, LlmError> {
        let endpoint = std::env::var(ENV_ENDPOINT)
            .map_err(|_| LlmError::Config(format!("{ENV_ENDPOINT} is not set")))?;
        let mut cfg = Self::new(endpoint);
        cfg.token = std::env::var(ENV_TOKEN).ok().filter(|t| !t.is_empty());
        if let Ok(secs) = std::env::var(ENV_TIMEOUT_SECS) {
            let secs: u64 = secs
                .parse()
                .map_err(|_| LlmError::Config(format!("{ENV_TIMEOUT_SECS} must be an integer")))?;
            cfg.timeout = Duration::from_secs(secs);
        }
        Ok(cfg)
    }
}

/// Counting gate bounding concurrent requests.
#[derive(Debug)]
struct Gate {
    in_flight: Mutex<usize>,
    freed: Condvar,
    cap: usize,
}

struct Permit<'a>(&'a Gate);

impl Gate {
    fn acquire(&self) -> Permit<'_> {
        let mut n = self.in_flight.lock().unwrap();
        while *n >= self.cap {
            n = self.freed.wait(n).unwrap();
        }
        *n += 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.in_flight.lock().unwrap() -= 1;
        self.0.freed.notify_one();
    }
}

/// Blocking JSON-over-HTTP generation client.
#[derive(Debug)]
pub struct HttpClient {
    config: HttpClientConfig,
    http: reqwest::blocking::Client,
    gate: Gate,
}

enum Attempt {
    Done(Vec<String>),
    Retry(Option<u16>, String),
    Fatal(Option<u16>, String),
}

impl HttpClient {
    pub fn new(config: HttpClientConfig) -> Result<Self, LlmError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| LlmError::Config(e.to_string()))?;
        let gate = Gate {
            in_flight: Mutex::new(0),
            freed: Condvar::new(),
            cap: config.max_in_flight.max(1),
        };
        Ok(HttpClient { config, http, gate })
    }

    pub fn from_env() -> Result<Self, LlmError> {
        Self::new(HttpClientConfig::from_env()?)
    }

    pub fn config(&self) -> &HttpClientConfig {
        &self.config
    }

    fn attempt(&self, request: &GenerationRequest) -> Attempt {
        let mut call = self.http.post(&self.config.endpoint).json(request);
        if let Some(token) = &self.config.token {
            call = call.bearer_auth(token);
        }
        let response = match call.send() {
            Ok(r) => r,
            Err(e) => return Attempt::Retry(None, e.to_string()),
        };
        let status = response.status();
        if status.is_server_error() {
            return Attempt::Retry(Some(status.as_u16()), format!("server error {status}"));
        }
        if !status.is_success() {
            let body = response.text().unwrap_or_default();
            return Attempt::Fatal(Some(status.as_u16()), body);
        }
        match response.json::<Vec<String>>() {
            Ok(completions) => Attempt::Done(completions),
            Err(e) => Attempt::Fatal(Some(status.as_u16()), format!("bad response body: {e}")),
        }
    }
}

impl GenerationClient for HttpClient {
    fn generate(&self, request: &GenerationRequest) -> Result<Vec<String>, LlmError> {
        let _permit = self.gate.acquire();
        let mut attempts = 0;
        loop {
            attempts += 1;
            match self.attempt(request) {
                Attempt::Done(mut completions) => {
                    completions.truncate(request.num_completions);
                    return Ok(completions);
                }
                Attempt::Fatal(status, message) => {
                    return Err(LlmError::Transport {
                        status,
                        attempts,
                        message,
                    })
                }
                Attempt::Retry(status, message) => {
                    if attempts > self.config.retries {
                        return Err(LlmError::Transport {
                            status,
                            attempts,
                            message,
                        });
                    }
                    log::warn!("generation attempt {attempts} failed: {message}; retrying");
                    std::thread::sleep(self.config.backoff_base * 2u32.pow(attempts - 1));
                }
            }
        }
    }
}
