use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{score_batch, Capability, ScoreDistribution, ScoreError, ScoreRequest, ScorerBackend};

fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

/// Cache key: SHA-256 over backend id, backend version and the SHA-256
/// digests of hypothesis and premise, newline separated.
pub fn cache_key(backend_id: &str, version: &str, hypothesis: &str, premise: &str) -> String {
    let material = format!(
        "{backend_id}\n{version}\n{}\n{}",
        sha256_hex(hypothesis.as_bytes()),
        sha256_hex(premise.as_bytes())
    );
    sha256_hex(material.as_bytes())
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    key: String,
    #[serde(flatten)]
    score: ScoreDistribution,
}

/// Append-only JSONL score cache.
///
/// Reads are concurrent; appends are serialized. Unparseable or invalid
/// lines are ignored on load, so their keys are recomputed and appended
/// again. The last line for a key wins.
pub struct ScoreCache {
    path: Option<PathBuf>,
    entries: RwLock<HashMap<String, ScoreDistribution>>,
    writer: Mutex<Option<File>>,
    corrupted: usize,
}

impl ScoreCache {
    pub fn in_memory() -> Self {
        Self {
            path: None,
            entries: RwLock::new(HashMap::new()),
            writer: Mutex::new(None),
            corrupted: 0,
        }
    }

    pub fn open(path: impl AsRef<Path>) -> std::io::Result<Self> {
        let path = path.as_ref();
        let mut entries = HashMap::new();
        let mut corrupted = 0;
        if path.exists() {
            for line in BufReader::new(File::open(path)?).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<CacheLine>(&line) {
                    Ok(entry) if entry.score.validate().is_ok() => {
                        entries.insert(entry.key, entry.score);
                    }
                    _ => corrupted += 1,
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        if corrupted > 0 {
            log::warn!("{}: ignored {corrupted} corrupted cache line(s)", path.display());
        }
        Ok(Self {
            path: Some(path.to_path_buf()),
            entries: RwLock::new(entries),
            writer: Mutex::new(Some(file)),
            corrupted,
        })
    }

    /// Like [`ScoreCache::open`], but falls back to an in-memory cache with a
    /// warning when the file cannot be used.
    pub fn open_or_memory(path: impl AsRef<Path>) -> Self {
        match Self::open(path.as_ref()) {
            Ok(cache) => cache,
            Err(e) => {
                log::warn!("score cache {} unavailable ({e}); scoring uncached", path.as_ref().display());
                Self::in_memory()
            }
        }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn corrupted_lines(&self) -> usize {
        self.corrupted
    }

    pub fn len(&self) -> usize {
        self.entries.read().map(|e| e.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &str) -> Option<ScoreDistribution> {
        self.entries.read().ok()?.get(key).copied()
    }

    /// Stores a score. A failed append disables persistence for the rest of
    /// the run and logs a warning; the in-memory entry is kept.
    pub fn insert(&self, key: String, score: ScoreDistribution) {
        if let Ok(mut writer) = self.writer.lock() {
            if let Some(file) = writer.as_mut() {
                let line = CacheLine { key: key.clone(), score };
                let write = serde_json::to_string(&line)
                    .map_err(std::io::Error::other)
                    .and_then(|s| writeln!(file, "{s}"));
                if let Err(e) = write {
                    log::warn!("score cache append failed ({e}); continuing without persistence");
                    *writer = None;
                }
            }
        }
        if let Ok(mut entries) = self.entries.write() {
            entries.insert(key, score);
        }
    }
}

/// Looks `request` up in the cache, scoring and storing it on a miss.
pub fn cache_get_or_score(
    cache: &ScoreCache,
    backend: &dyn ScorerBackend,
    request: &ScoreRequest,
) -> Result<ScoreDistribution, ScoreError> {
    let key = cache_key(backend.id(), backend.version(), &request.hypothesis, &request.premise);
    if let Some(hit) = cache.get(&key) {
        return Ok(hit);
    }
    let score = score_batch(backend, std::slice::from_ref(request))?.remove(0);
    cache.insert(key, score);
    Ok(score)
}

/// Puts a [`ScoreCache`] in front of another backend. Only misses reach the
/// inner backend.
pub struct CachedBackend {
    inner: Arc<dyn ScorerBackend>,
    cache: Arc<ScoreCache>,
}

impl CachedBackend {
    pub fn new(inner: Arc<dyn ScorerBackend>, cache: Arc<ScoreCache>) -> Self {
        Self { inner, cache }
    }

    pub fn cache(&self) -> &ScoreCache {
        &self.cache
    }
}

impl ScorerBackend for CachedBackend {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn version(&self) -> &str {
        self.inner.version()
    }

    fn batch_limit(&self) -> usize {
        self.inner.batch_limit()
    }

    fn capability(&self) -> Capability {
        self.inner.capability()
    }

    fn score_requests(&self, requests: &[ScoreRequest]) -> Result<Vec<ScoreDistribution>, ScoreError> {
        let keys: Vec<String> = requests
            .iter()
            .map(|r| cache_key(self.inner.id(), self.inner.version(), &r.hypothesis, &r.premise))
            .collect();
        let mut out: Vec<Option<ScoreDistribution>> = keys.iter().map(|k| self.cache.get(k)).collect();
        let missing: Vec<usize> = (0..requests.len()).filter(|&i| out[i].is_none()).collect();
        if !missing.is_empty() {
            let batch: Vec<ScoreRequest> = missing.iter().map(|&i| requests[i].clone()).collect();
            let scored = score_batch(self.inner.as_ref(), &batch)?;
            for (&i, score) in missing.iter().zip(scored) {
                self.cache.insert(keys[i].clone(), score);
                out[i] = Some(score);
            }
        }
        Ok(out.into_iter().map(|d| d.expect("every slot filled")).collect())
    }
}

/// Serves scores recorded in a cache for a given backend id and version;
/// never computes new ones.
pub struct ReplayBackend {
    cache: Arc<ScoreCache>,
    id: String,
    version: String,
}

impl ReplayBackend {
    pub fn new(cache: Arc<ScoreCache>, id: impl Into<String>, version: impl Into<String>) -> Self {
        Self {
            cache,
            id: id.into(),
            version: version.into(),
        }
    }
}

impl ScorerBackend for ReplayBackend {
    fn id(&self) -> &str {
        &self.id
    }

    fn version(&self) -> &str {
        &self.version
    }

    fn batch_limit(&self) -> usize {
        usize::MAX
    }

    fn capability(&self) -> Capability {
        Capability::ThreeWay
    }

    fn score_requests(&self, requests: &[ScoreRequest]) -> Result<Vec<ScoreDistribution>, ScoreError> {
        requests
            .iter()
            .map(|r| {
                self.cache
                    .get(&cache_key(&self.id, &self.version, &r.hypothesis, &r.premise))
                    .ok_or_else(|| ScoreError::ReplayMiss(r.request_id.clone()))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scorer::LexicalBackend;
    use std::sync::atomic::{AtomicUsize, Ordering};

    struct Counting {
        inner: LexicalBackend,
        version: String,
        calls: AtomicUsize,
    }

    impl Counting {
        fn new(version: &str) -> Self {
            Self {
                inner: LexicalBackend::default(),
                version: version.into(),
                calls: AtomicUsize::new(0),
            }
        }
    }

    impl ScorerBackend for Counting {
        fn id(&self) -> &str {
            "counting"
        }
        fn version(&self) -> &str {
            &self.version
        }
        fn batch_limit(&self) -> usize {
            8
        }
        fn capability(&self) -> Capability {
            Capability::ThreeWay
        }
        fn score_requests(&self, requests: &[ScoreRequest]) -> Result<Vec<ScoreDistribution>, ScoreError> {
            self.calls.fetch_add(requests.len(), Ordering::SeqCst);
            self.inner.score_requests(requests)
        }
    }

    fn request() -> ScoreRequest {
        ScoreRequest::new("r", "a b c", "a b d").unwrap()
    }

    #[test]
    fn hit_skips_backend() {
        let cache = ScoreCache::in_memory();
        let backend = Counting::new("1");
        let first = cache_get_or_score(&cache, &backend, &request()).unwrap();
        let second = cache_get_or_score(&cache, &backend, &request()).unwrap();
        assert_eq!(first, second);
        assert_eq!(backend.calls.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn version_is_part_of_the_key() {
        let cache = ScoreCache::in_memory();
        let v1 = Counting::new("1");
        let v2 = Counting::new("2");
        cache_get_or_score(&cache, &v1, &request()).unwrap();
        cache_get_or_score(&cache, &v2, &request()).unwrap();
        assert_eq!(v2.calls.load(Ordering::SeqCst), 1);
        assert_ne!(cache_key("a", "1", "h", "p"), cache_key("a", "2", "h", "p"));
    }

    #[test]
    fn persists_and_recovers_from_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let backend = Counting::new("1");
        {
            let cache = ScoreCache::open(&path).unwrap();
            cache_get_or_score(&cache, &backend, &request()).unwrap();
        }
        let reopened = ScoreCache::open(&path).unwrap();
        assert_eq!(reopened.len(), 1);
        cache_get_or_score(&reopened, &backend, &request()).unwrap();
        assert_eq!(backend.calls.load(Ordering::SeqCst), 1);
        drop(reopened);

        // Corrupt the only entry: an invalid distribution and a garbage line.
        let key = cache_key("counting", "1", "a b c", "a b d");
        std::fs::write(
            &path,
            format!("{{\"key\":\"{key}\",\"supported\":0.9,\"partially_supported\":0.9,\"not_supported\":0.0}}\nnot json\n"),
        )
        .unwrap();
        let cache = ScoreCache::open(&path).unwrap();
        assert_eq!(cache.corrupted_lines(), 2);
        assert!(cache.is_empty());
        let d = cache_get_or_score(&cache, &backend, &request()).unwrap();
        assert_eq!(backend.calls.load(Ordering::SeqCst), 2);
        drop(cache);
        let healed = ScoreCache::open(&path).unwrap();
        assert_eq!(healed.get(&key), Some(d));
    }

    #[test]
    fn unusable_path_degrades_to_memory() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ScoreCache::open_or_memory(dir.path().join("missing").join("cache.jsonl"));
        assert!(cache.path().is_none());
        let backend = Counting::new("1");
        cache_get_or_score(&cache, &backend, &request()).unwrap();
        assert_eq!(cache.len(), 1);
    }

    #[test]
    fn cached_backend_only_scores_misses_and_replay_serves_hits() {
        let inner = Arc::new(Counting::new("1"));
        let cache = Arc::new(ScoreCache::in_memory());
        let cached = CachedBackend::new(inner.clone(), cache.clone());
        let a = ScoreRequest::new("a", "x y", "x y").unwrap();
        let b = ScoreRequest::new("b", "x z", "x y").unwrap();
        score_batch(&cached, std::slice::from_ref(&a)).unwrap();
        let both = score_batch(&cached, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(inner.calls.load(Ordering::SeqCst), 2);
        assert_eq!(both[0].supported, 1.0);

        let replay = ReplayBackend::new(cache, "counting", "1");
        assert_eq!(score_batch(&replay, &[b.clone(), a]).unwrap()[0], both[1]);
        let unseen = ScoreRequest::new("c", "q", "r").unwrap();
        assert!(matches!(score_batch(&replay, &[unseen]), Err(ScoreError::ReplayMiss(_))));
    }
}
