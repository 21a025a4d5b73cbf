use std::collections::VecDeque;
use std::sync::Mutex;

use super::{GenerationClient, GenerationRequest, LlmError};

/// Serves canned responses in order and records every request it sees.
#[derive(Debug, Default)]
pub struct ScriptedClient {
    script: Mutex<VecDeque<Vec<String>>>,
    log: Mutex<Vec<GenerationRequest>>,
}

impl ScriptedClient {
    /// Each script entry answers one call.
    pub fn new(script: Vec<Vec<String>>) -> Self {
        ScriptedClient {
            script: Mutex::new(script.into()),
            log: Mutex::new(Vec::new()),
        }
    }

    /// Convenience for single-completion scripts.
    pub fn from_texts<I, S>(texts: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(texts.into_iter().map(|t| vec![t.into()]).collect())
    }

    pub fn requests(&self) -> Vec<GenerationRequest> {
        self.log.lock().unwrap().clone()
    }

    pub fn prompts(&self) -> Vec<String> {
        self.log.lock().unwrap().iter().map(|r| r.prompt.clone()).collect()
    }

    pub fn calls(&self) -> usize {
        self.log.lock().unwrap().len()
    }

    pub fn remaining(&self) -> usize {
        self.script.lock().unwrap().len()
    }
}

impl GenerationClient for ScriptedClient {
    fn generate(&self, request: &GenerationRequest) -> Result<Vec<String>, LlmError> {
        let mut log = self.log.lock().unwrap();
        log.push(request.clone());
        match self.script.lock().unwrap().pop_front() {
            Some(mut response) => {
                response.truncate(request.num_completions);
                Ok(response)
            }
            None => Err(LlmError::MockExhausted(log.len())),
        }
    }
}
