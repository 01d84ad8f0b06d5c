use super::{Capability, ScoreDistribution, ScoreError, ScoreRequest, ScorerBackend};
use crate::textproc::{bigram_recall_tokens, tokenize, unigram_recall_tokens};

/// Deterministic three-way scorer from word overlap.
///
/// With `u` the distinct-unigram recall and `b` the distinct-bigram recall of
/// the hypothesis against the premise:
///
/// ```text
/// supported           = b
/// partially_supported = max(u - b, 0)
/// not_supported       = 1 - max(u, b)
/// ```
///
/// Hypotheses with a single token have no bigrams; for them `b = u`.
pub fn lexical_distribution(hypothesis: &str, premise: &str) -> ScoreDistribution {
    let h = tokenize(hypothesis);
    let p = tokenize(premise);
    let u = unigram_recall_tokens(&h, &p);
    let b = if h.len() < 2 { u } else { bigram_recall_tokens(&h, &p) };
    ScoreDistribution {
        supported: b,
        partially_supported: (u - b).max(0.0),
        not_supported: 1.0 - u.max(b),
    }
}

#[derive(Debug, Clone)]
pub struct LexicalBackend {
    batch_limit: usize,
}

impl Default for LexicalBackend {
    fn default() -> Self {
        Self { batch_limit: 1024 }
    }
}

impl LexicalBackend {
    pub fn with_batch_limit(batch_limit: usize) -> Self {
        Self { batch_limit }
    }
}

impl ScorerBackend for LexicalBackend {
    fn id(&self) -> &str {
        "lexical"
    }

    fn version(&self) -> &str {
        "1"
    }

    fn batch_limit(&self) -> usize {
        self.batch_limit
    }

    fn capability(&self) -> Capability {
        Capability::ThreeWay
    }

    fn score_requests(&self, requests: &[ScoreRequest]) -> Result<Vec<ScoreDistribution>, ScoreError> {
        Ok(requests
            .iter()
            .map(|r| lexical_distribution(&r.hypothesis, &r.premise))
            .collect())
    }
}
