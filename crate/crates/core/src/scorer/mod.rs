//! Three-way entailment scoring behind a pluggable backend.
//!
//! Backends implement [`ScorerBackend`]. The crate ships a deterministic
//! [`LexicalBackend`], an HTTP client for the `/v1/score` protocol
//! ([`RemoteBackend`]), a cache-only [`ReplayBackend`], and [`CachedBackend`],
//! which puts a persistent [`ScoreCache`] in front of any other backend.
//! [`Scorer`] splits large request lists into batches and fans them out over
//! a bounded thread pool.

mod cache;
mod lexical;
mod remote;
mod retry;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cache::{cache_get_or_score, cache_key, CachedBackend, ReplayBackend, ScoreCache};
pub use lexical::{lexical_distribution, LexicalBackend};
pub use remote::{HealthStatus, RemoteBackend, RemoteConfig, ScoreRequestBody, ScoreResponseBody, WirePair};
pub use retry::{with_retry, RetryPolicy, Retryable};

/// Tolerance on the sum of a distribution.
pub const SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("batch of {len} requests exceeds the backend limit of {limit}")]
    BatchTooLarge { len: usize, limit: usize },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("transport failure after {attempts} attempt(s): {message}")]
    Transport { attempts: usize, message: String },
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("no recorded score for request {0}")]
    ReplayMiss(String),
}

impl ScoreError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, ScoreError::Transport { .. })
    }
}

/// Probabilities of the three labels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreDistribution {
    pub supported: f64,
    pub partially_supported: f64,
    pub not_supported: f64,
}

impl ScoreDistribution {
    /// Validates components in `[0, 1]` summing to 1 within [`SUM_TOLERANCE`].
    pub fn new(supported: f64, partially_supported: f64, not_supported: f64) -> Result<Self, ScoreError> {
        let d = Self {
            supported,
            partially_supported,
            not_supported,
        };
        d.validate()?;
        Ok(d)
    }

    /// Rescales non-negative weights to sum to 1.
    pub fn normalized(supported: f64, partially_supported: f64, not_supported: f64) -> Result<Self, ScoreError> {
        let parts = [supported, partially_supported, not_supported];
        if parts.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(ScoreError::Protocol(format!("invalid probabilities {parts:?}")));
        }
        let total: f64 = parts.iter().sum();
        if total <= 0.0 {
            return Err(ScoreError::Protocol("probabilities sum to zero".into()));
        }
        Ok(Self {
            supported: supported / total,
            partially_supported: partially_supported / total,
            not_supported: not_supported / total,
        })
    }

    /// Two-way distribution: entailed maps to supported, everything else to
    /// not supported.
    pub fn binary(p_entailed: f64) -> Result<Self, ScoreError> {
        Self::new(p_entailed, 0.0, 1.0 - p_entailed)
    }

    pub fn validate(&self) -> Result<(), ScoreError> {
        let parts = [self.supported, self.partially_supported, self.not_supported];
        if parts.iter().any(|p| !p.is_finite() || *p < -SUM_TOLERANCE || *p > 1.0 + SUM_TOLERANCE) {
            return Err(ScoreError::Protocol(format!("probabilities out of range: {parts:?}")));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(ScoreError::Protocol(format!("probabilities sum to {sum}")));
        }
        Ok(())
    }

    /// Folds the partial mass into not-supported, as a two-way model reports.
    pub fn to_binary(self) -> Self {
        Self {
            supported: self.supported,
            partially_supported: 0.0,
            not_supported: self.partially_supported + self.not_supported,
        }
    }
}

/// Probability of the supported label, used as the binary entailment score.
pub fn binary_score(dist: &ScoreDistribution) -> f64 {
    dist.supported
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub request_id: String,
    pub hypothesis: String,
    pub premise: String,
}

impl ScoreRequest {
    pub fn new(
        request_id: impl Into<String>,
        hypothesis: impl Into<String>,
        premise: impl Into<String>,
    ) -> Result<Self, ScoreError> {
        let r = Self {
            request_id: request_id.into(),
            hypothesis: hypothesis.into(),
            premise: premise.into(),
        };
        if r.hypothesis.trim().is_empty() || r.premise.trim().is_empty() {
            return Err(ScoreError::InvalidRequest(format!(
                "request {} has an empty hypothesis or premise",
                r.request_id
            )));
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Capability {
    ThreeWay,
    /// Entailed / not entailed only; `partially_supported` is always 0.
    Binary,
}

pub trait ScorerBackend: Send + Sync {
    fn id(&self) -> &str;
    fn version(&self) -> &str;
    fn batch_limit(&self) -> usize;
    fn capability(&self) -> Capability;
    /// One distribution per request, in request order. Callers go through
    /// [`score_batch`], which enforces the batch limit and output shape.
    fn score_requests(&self, requests: &[ScoreRequest]) -> Result<Vec<ScoreDistribution>, ScoreError>;
}

/// Scores one batch, checking the batch limit, the response length and every
/// distribution. Binary backends have their partial mass folded away.
pub fn score_batch(backend: &dyn ScorerBackend, requests: &[ScoreRequest]) -> Result<Vec<ScoreDistribution>, ScoreError> {
    if requests.len() > backend.batch_limit() {
        return Err(ScoreError::BatchTooLarge {
            len: requests.len(),
            limit: backend.batch_limit(),
        });
    }
    if requests.is_empty() {
        return Ok(Vec::new());
    }
    let scores = backend.score_requests(requests)?;
    if scores.len() != requests.len() {
        return Err(ScoreError::Protocol(format!(
            "{} scores for {} requests",
            scores.len(),
            requests.len()
        )));
    }
    scores
        .into_iter()
        .map(|d| {
            d.validate()?;
            Ok(match backend.capability() {
                Capability::Binary => d.to_binary(),
                Capability::ThreeWay => d,
            })
        })
        .collect()
}

/// A backend plus a bounded fan-out for request lists of any length.
#[derive(Clone)]
pub struct Scorer {
    backend: Arc<dyn ScorerBackend>,
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl Scorer {
    /// `parallelism` bounds the number of batches in flight; 1 scores
    /// sequentially on the calling thread.
    pub fn new(backend: Arc<dyn ScorerBackend>, parallelism: usize) -> Self {
        let pool = (parallelism > 1)
            .then(|| rayon::ThreadPoolBuilder::new().num_threads(parallelism).build().ok())
            .flatten()
            .map(Arc::new);
        Self { backend, pool }
    }

    pub fn sequential(backend: Arc<dyn ScorerBackend>) -> Self {
        Self::new(backend, 1)
    }

    pub fn backend(&self) -> &dyn ScorerBackend {
        self.backend.as_ref()
    }

    /// Scores all requests, preserving order.
    pub fn score(&self, requests: &[ScoreRequest]) -> Result<Vec<ScoreDistribution>, ScoreError> {
        let limit = self.backend.batch_limit().max(1);
        let batches: Vec<&[ScoreRequest]> = requests.chunks(limit).collect();
        let results: Vec<Result<Vec<ScoreDistribution>, ScoreError>> = match &self.pool {
            Some(pool) if batches.len() > 1 => pool.install(|| {
                batches
                    .par_iter()
                    .map(|b| score_batch(self.backend.as_ref(), b))
                    .collect()
            }),
            _ => batches.iter().map(|b| score_batch(self.backend.as_ref(), b)).collect(),
        };
        let mut out = Vec::with_capacity(requests.len());
        for r in results {
            out.extend(r?);
        }
        Ok(out)
    }

    pub fn score_pair(&self, hypothesis: &str, premise: &str) -> Result<ScoreDistribution, ScoreError> {
        let request = ScoreRequest::new("single", hypothesis, premise)?;
        Ok(self.score(std::slice::from_ref(&request))?.remove(0))
    }
}
