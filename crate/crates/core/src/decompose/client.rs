use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufReader, Write};
use std::path::Path;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::read_jsonl_lines;
use crate::scorer::{with_retry, RetryPolicy, Retryable};

#[derive(Debug, Error)]
pub enum CompletionError {
    #[error("completion transport failed after {attempts} attempt(s): {message}")]
    Transport { attempts: usize, message: String },
    #[error("completion protocol error: {0}")]
    Protocol(String),
    #[error("no recorded completion for prompt digest {0}")]
    ReplayMiss(String),
    #[error("completion fixture: {0}")]
    Fixture(String),
}

impl Retryable for CompletionError {
    fn is_retryable(&self) -> bool {
        matches!(self, CompletionError::Transport { .. })
    }

    fn with_attempts(self, attempts: usize) -> Self {
        match self {
            CompletionError::Transport { message, .. } => CompletionError::Transport { attempts, message },
            other => other,
        }
    }
}

pub trait CompletionClient: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<String, CompletionError>;
}

/// Hex SHA-256 of the prompt text.
pub fn prompt_digest(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

/// One line of a replay fixture.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionRecord {
    pub prompt_digest: String,
    pub completion: String,
}

/// Serves completions recorded earlier, looked up by prompt digest.
#[derive(Debug, Default)]
pub struct ReplayClient {
    records: HashMap<String, String>,
}

impl ReplayClient {
    pub fn new(records: impl IntoIterator<Item = CompletionRecord>) -> Self {
        Self {
            records: records.into_iter().map(|r| (r.prompt_digest, r.completion)).collect(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CompletionError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| CompletionError::Fixture(format!("{}: {e}", path.display())))?;
        let records: Vec<CompletionRecord> =
            read_jsonl_lines(BufReader::new(file), path).map_err(|e| CompletionError::Fixture(e.to_string()))?;
        Ok(Self::new(records))
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl CompletionClient for ReplayClient {
    fn complete(&self, prompt: &str) -> Result<String, CompletionError> {
        let digest = prompt_digest(prompt);
        self.records
            .get(&digest)
            .cloned()
            .ok_or(CompletionError::ReplayMiss(digest))
    }
}

/// Forwards to `inner` and appends every completion to a replay fixture.
pub struct RecordingClient<C> {
    inner: C,
    sink: Mutex<File>,
}

impl<C: CompletionClient> RecordingClient<C> {
    pub fn new(inner: C, path: impl AsRef<Path>) -> std::io::Result<Self> {
        let sink = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self {
            inner,
            sink: Mutex::new(sink),
        })
    }
}

impl<C: CompletionClient> CompletionClient for RecordingClient<C> {
    fn complete(&self, prompt: &str) -> Result<String, CompletionError> {
        let completion = self.inner.complete(prompt)?;
        let record = CompletionRecord {
            prompt_digest: prompt_digest(prompt),
            completion: completion.clone(),
        };
        let line = serde_json::to_string(&record).expect("record serializes");
        let mut sink = self.sink.lock().unwrap_or_else(|e| e.into_inner());
        if let Err(e) = writeln!(sink, "{line}") {
            log::warn!("could not record completion: {e}");
        }
        Ok(completion)
    }
}

#[derive(Debug, Clone)]
pub struct HttpCompletionConfig {
    /// Full URL of a completions endpoint.
    pub endpoint: String,
    pub model: String,
    pub api_key: Option<String>,
    pub max_tokens: u32,
    pub timeout: Duration,
    pub retry: RetryPolicy,
}

impl HttpCompletionConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            model: model.into(),
            api_key: None,
            max_tokens: 256,
            timeout: Duration::from_secs(60),
            retry: RetryPolicy::default(),
        }
    }
}

#[derive(Serialize)]
struct CompletionRequestBody<'a> {
    model: &'a str,
    prompt: &'a str,
    temperature: f64,
    max_tokens: u32,
}

#[derive(Deserialize)]
struct CompletionResponseBody {
    choices: Vec<CompletionChoice>,
}

#[derive(Deserialize)]
struct CompletionChoice {
    text: String,
}

/// Client for a text-completions endpoint taking `{model, prompt,
/// temperature, max_tokens}` and answering `{choices: [{text}]}`. Requests
/// always use temperature 0.
pub struct HttpCompletionClient {
    config: HttpCompletionConfig,
    agent: ureq::Agent,
}

impl HttpCompletionClient {
    pub fn new(config: HttpCompletionConfig) -> Self {
        let agent = ureq::AgentBuilder::new().timeout(config.timeout).build();
        Self { config, agent }
    }

    fn once(&self, prompt: &str) -> Result<String, CompletionError> {
        let mut request = self.agent.post(&self.config.endpoint);
        if let Some(key) = &self.config.api_key {
            request = request.set("Authorization", &format!("Bearer {key}"));
        }
        let body = CompletionRequestBody {
            model: &self.config.model,
            prompt,
            temperature: 0.0,
            max_tokens: self.config.max_tokens,
        };
        let response = request.send_json(&body).map_err(|e| match e {
            ureq::Error::Status(code, _) if code == 429 || code >= 500 => CompletionError::Transport {
                attempts: 1,
                message: format!("HTTP {code}"),
            },
            ureq::Error::Status(code, r) => {
                CompletionError::Protocol(format!("HTTP {code}: {}", r.into_string().unwrap_or_default()))
            }
            ureq::Error::Transport(t) => CompletionError::Transport {
                attempts: 1,
                message: t.to_string(),
            },
        })?;
        let parsed: CompletionResponseBody = response
            .into_json()
            .map_err(|e| CompletionError::Protocol(format!("malformed completion response: {e}")))?;
        parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.text)
            .ok_or_else(|| CompletionError::Protocol("response has no choices".into()))
    }
}

impl CompletionClient for HttpCompletionClient {
    fn complete(&self, prompt: &str) -> Result<String, CompletionError> {
        with_retry(&self.config.retry, || self.once(prompt))
    }
}
