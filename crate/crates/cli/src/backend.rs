use std::sync::Arc;

use anyhow::{Context, Result};
use claimcheck::decompose::{CompletionClient, HttpCompletionClient, HttpCompletionConfig, RecordingClient, ReplayClient};
use claimcheck::scorer::{CachedBackend, LexicalBackend, RemoteBackend, RemoteConfig, ReplayBackend, ScoreCache, Scorer, ScorerBackend};

use crate::args::{BackendKind, Common};
use crate::UsageError;

pub const SCORER_KEY_ENV: &str = "SCORER_API_KEY";
pub const COMPLETIONS_KEY_ENV: &str = "COMPLETIONS_API_KEY";

fn env_key(name: &str) -> Option<String> {
    std::env::var(name).ok().filter(|k| !k.is_empty())
}

pub fn build_scorer(common: &Common, jobs: usize) -> Result<Scorer> {
    let kind = common.backend.unwrap_or(BackendKind::Lexical);
    let backend: Arc<dyn ScorerBackend> = match kind {
        BackendKind::Lexical => Arc::new(LexicalBackend::default()),
        BackendKind::Remote => {
            let endpoint = common
                .endpoint
                .clone()
                .ok_or_else(|| UsageError("--backend remote needs --endpoint".into()))?;
            let mut config = RemoteConfig::new(endpoint, common.model.clone().unwrap_or_else(|| "default".into()));
            config.api_key = env_key(SCORER_KEY_ENV);
            let remote = RemoteBackend::new(config);
            let health = remote.health()?;
            log::info!("scoring service ok: status={} model={}", health.status, health.model);
            Arc::new(remote)
        }
        BackendKind::Replay => {
            let path = common
                .cache
                .as_ref()
                .ok_or_else(|| UsageError("--backend replay needs --cache".into()))?;
            let cache = ScoreCache::open(path).with_context(|| format!("opening score cache {}", path.display()))?;
            log::info!("replaying {} cached scores", cache.len());
            let id = common.model.clone().unwrap_or_else(|| "lexical".into());
            return Ok(Scorer::new(Arc::new(ReplayBackend::new(Arc::new(cache), id, "1")), jobs));
        }
    };
    let backend = match &common.cache {
        Some(path) => {
            let cache = ScoreCache::open(path).with_context(|| format!("opening score cache {}", path.display()))?;
            Arc::new(CachedBackend::new(backend, Arc::new(cache))) as Arc<dyn ScorerBackend>
        }
        None => backend,
    };
    Ok(Scorer::new(backend, jobs))
}

pub fn build_completion_client(common: &Common, record: Option<&std::path::Path>) -> Result<Box<dyn CompletionClient>> {
    let client: Box<dyn CompletionClient> = match common.backend.unwrap_or(BackendKind::Replay) {
        BackendKind::Replay => {
            let path = common
                .replay
                .as_ref()
                .ok_or_else(|| UsageError("decompose --backend replay needs --replay".into()))?;
            Box::new(ReplayClient::load(path)?)
        }
        BackendKind::Remote => {
            let endpoint = common
                .endpoint
                .clone()
                .ok_or_else(|| UsageError("decompose --backend remote needs --endpoint".into()))?;
            let mut config = HttpCompletionConfig::new(endpoint, common.model.clone().unwrap_or_else(|| "default".into()));
            config.api_key = env_key(COMPLETIONS_KEY_ENV);
            let http = HttpCompletionClient::new(config);
            match record {
                Some(path) => Box::new(
                    RecordingClient::new(http, path).with_context(|| format!("opening {}", path.display()))?,
                ),
                None => Box::new(http),
            }
        }
        BackendKind::Lexical => {
            return Err(UsageError("decompose needs a completion backend: remote or replay".into()).into())
        }
    };
    Ok(client)
}
