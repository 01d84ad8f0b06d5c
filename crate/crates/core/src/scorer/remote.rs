use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{with_retry, Capability, RetryPolicy, ScoreDistribution, ScoreError, ScoreRequest, ScorerBackend};

/// One hypothesis/premise pair on the wire.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WirePair {
    pub hypothesis: String,
    pub premise: String,
}

/// Body of `POST /v1/score`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreRequestBody {
    pub pairs: Vec<WirePair>,
}

/// Response of `POST /v1/score`; scores are in request order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreResponseBody {
    pub scores: Vec<ScoreDistribution>,
}

/// Response of `GET /v1/health`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HealthStatus {
    pub status: String,
    pub model: String,
}

impl ScoreRequestBody {
    pub fn from_requests(requests: &[ScoreRequest]) -> Self {
        Self {
            pairs: requests
                .iter()
                .map(|r| WirePair {
                    hypothesis: r.hypothesis.clone(),
                    premise: r.premise.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    /// Base URL, e.g. `http://127.0.0.1:8080`.
    pub endpoint: String,
    pub model_id: String,
    /// Part of the cache key; bump when the served model changes.
    pub version: String,
    pub api_key: Option<String>,
    pub batch_limit: usize,
    pub capability: Capability,
    pub timeout: Duration,
    pub retry: RetryPolicy,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>, model_id: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            model_id: model_id.into(),
            version: "1".into(),
            api_key: None,
            batch_limit: 32,
            capability: Capability::ThreeWay,
            timeout: Duration::from_secs(60),
            retry: RetryPolicy::default(),
        }
    }
}

/// Client for a scoring service speaking the `/v1/score` protocol.
pub struct RemoteBackend {
    config: RemoteConfig,
    id: String,
    agent: ureq::Agent,
}

impl RemoteBackend {
    pub fn new(config: RemoteConfig) -> Self {
        let agent = ureq::AgentBuilder::new().timeout(config.timeout).build();
        Self {
            id: format!("remote:{}", config.model_id),
            config,
            agent,
        }
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.config.endpoint.trim_end_matches('/'))
    }

    fn authorize(&self, request: ureq::Request) -> ureq::Request {
        match &self.config.api_key {
            Some(key) => request.set("Authorization", &format!("Bearer {key}")),
            None => request,
        }
    }

    pub fn health(&self) -> Result<HealthStatus, ScoreError> {
        with_retry(&self.config.retry, || {
            let response = self
                .authorize(self.agent.get(&self.url("/v1/health")))
                .call()
                .map_err(map_ureq_error)?;
            response
                .into_json::<HealthStatus>()
                .map_err(|e| ScoreError::Protocol(format!("malformed health response: {e}")))
        })
    }

    fn post_once(&self, body: &ScoreRequestBody) -> Result<Vec<ScoreDistribution>, ScoreError> {
        let response = self
            .authorize(self.agent.post(&self.url("/v1/score")))
            .send_json(body)
            .map_err(map_ureq_error)?;
        let text = response
            .into_string()
            .map_err(|e| ScoreError::Transport {
                attempts: 1,
                message: e.to_string(),
            })?;
        let parsed: ScoreResponseBody =
            serde_json::from_str(&text).map_err(|e| ScoreError::Protocol(format!("malformed score response: {e}")))?;
        parsed
            .scores
            .into_iter()
            .map(|d| ScoreDistribution::normalized(d.supported, d.partially_supported, d.not_supported))
            .collect()
    }
}

fn map_ureq_error(e: ureq::Error) -> ScoreError {
    match e {
        ureq::Error::Status(code, response) if code == 429 || code >= 500 => ScoreError::Transport {
            attempts: 1,
            message: format!("HTTP {code} {}", response.status_text()),
        },
        ureq::Error::Status(code, response) => {
            let body = response.into_string().unwrap_or_default();
            ScoreError::Protocol(format!("HTTP {code}: {body}"))
        }
        ureq::Error::Transport(t) => ScoreError::Transport {
            attempts: 1,
            message: t.to_string(),
        },
    }
}

impl ScorerBackend for RemoteBackend {
    fn id(&self) -> &str {
        &self.id
    }

    fn version(&self) -> &str {
        &self.config.version
    }

    fn batch_limit(&self) -> usize {
        self.config.batch_limit
    }

    fn capability(&self) -> Capability {
        self.config.capability
    }

    fn score_requests(&self, requests: &[ScoreRequest]) -> Result<Vec<ScoreDistribution>, ScoreError> {
        let body = ScoreRequestBody::from_requests(requests);
        with_retry(&self.config.retry, || self.post_once(&body))
    }
}
