//! Supporting-sentence retrieval.
//!
//! Sentences are scored either lexically ([`bm25_scores`]) or through an
//! entailment scorer ([`nli_sentence_scores`]), optionally with surrounding
//! evidence context. Predictions are made by thresholding ([`select_above`],
//! tuned with [`tune_threshold`]) or by [`top_k`]; the top-k sentences can be
//! joined into a new premise for retrieve-then-predict.

mod bm25;
mod context;
mod threshold;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bm25::{bm25_scores, Bm25Params};
pub use context::{contextualize, ContextualizedSentence, DEFAULT_CONTEXT_TOKENS, SEP};
pub use threshold::{mean_max_f1, select_above, threshold_candidates, tune_threshold, DevItem, ThresholdChoice};

use crate::corpus::{CorpusError, EvidenceSet, SentenceRef};
use crate::entail::{max_stretch, EntailError, EntailmentVerdict};
use crate::scorer::{ScoreDistribution, ScoreError, ScoreRequest, Scorer};

pub const DEFAULT_TOP_K: usize = 7;

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("no sentences selected")]
    EmptySelection,
    #[error("sentence {0} is not part of the evidence")]
    UnknownSentence(SentenceRef),
    #[error("no development items with gold sets")]
    NoDevItems,
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Entail(#[from] EntailError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalScore {
    pub sentence: SentenceRef,
    pub score: f64,
}

/// Retrieval score from a three-way distribution:
/// `p(supported) + 0.5 * p(partially supported)`.
pub fn nli_retrieval_score(dist: &ScoreDistribution) -> f64 {
    dist.supported + 0.5 * dist.partially_supported
}

/// Scores every evidence sentence against the claim with an entailment
/// scorer. With `context_tokens`, each sentence is preceded by its
/// surrounding context as `context <SEP> sentence`.
pub fn nli_sentence_scores(
    claim_id: &str,
    claim_text: &str,
    evidence: &EvidenceSet<'_>,
    scorer: &Scorer,
    context_tokens: Option<usize>,
) -> Result<Vec<RetrievalScore>, RetrievalError> {
    let mut refs = Vec::new();
    let mut requests = Vec::new();
    for doc in &evidence.docs {
        for sentence in &doc.sentences {
            let premise = match context_tokens {
                Some(budget) => contextualize(doc, sentence.index, budget)?.premise(doc),
                None => sentence.text.clone(),
            };
            let r = doc.sentence_ref(sentence.index);
            requests.push(ScoreRequest::new(format!("{claim_id}/{r}"), claim_text, premise)?);
            refs.push(r);
        }
    }
    let dists = scorer.score(&requests)?;
    Ok(refs
        .into_iter()
        .zip(dists.iter())
        .map(|(sentence, d)| RetrievalScore {
            sentence,
            score: nli_retrieval_score(d),
        })
        .collect())
}

/// The `k` highest-scoring sentences, best first. Equal scores keep their
/// input order, which for every scorer in this crate is document order.
pub fn top_k(scores: &[RetrievalScore], k: usize) -> Vec<SentenceRef> {
    let mut order: Vec<&RetrievalScore> = scores.iter().collect();
    order.sort_by(|a, b| b.score.total_cmp(&a.score));
    order.into_iter().take(k.max(1)).map(|s| s.sentence.clone()).collect()
}

/// Selected sentences, deduplicated, in document order, joined by single
/// spaces.
pub fn build_rtp_premise(evidence: &EvidenceSet<'_>, selected: &[SentenceRef]) -> Result<String, RetrievalError> {
    if selected.is_empty() {
        return Err(RetrievalError::EmptySelection);
    }
    if let Some(unknown) = selected.iter().find(|r| evidence.position(r).is_none()) {
        return Err(RetrievalError::UnknownSentence(unknown.clone()));
    }
    Ok(evidence.join(selected))
}

/// Retrieve-then-predict: score the claim once against the concatenation of
/// the top-k retrieved sentences.
pub fn retrieve_then_predict(
    claim_id: &str,
    claim_text: &str,
    evidence: &EvidenceSet<'_>,
    retrieval_scores: &[RetrievalScore],
    k: usize,
    scorer: &Scorer,
    threshold: f64,
) -> Result<(Vec<SentenceRef>, EntailmentVerdict), RetrievalError> {
    let selected = top_k(retrieval_scores, k);
    let premise = build_rtp_premise(evidence, &selected)?;
    let mut verdict = max_stretch(claim_id, claim_text, &[premise], scorer, threshold)?;
    verdict.strategy = "rtp".into();
    Ok((evidence.in_document_order(&selected), verdict))
}

/// One line of a retrieval output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalRecord {
    pub claim_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subclaim_id: Option<String>,
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub refs: Vec<SentenceRef>,
    pub scores: Vec<RetrievalScore>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::EvidenceDocument;
    use crate::scorer::LexicalBackend;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn rs(index: usize, score: f64) -> RetrievalScore {
        RetrievalScore {
            sentence: SentenceRef::new("d", index),
            score,
        }
    }

    #[test]
    fn nli_score_formula() {
        let d = |s, p, n| ScoreDistribution::new(s, p, n).unwrap();
        assert!((nli_retrieval_score(&d(0.6, 0.2, 0.2)) - 0.7).abs() < 1e-12);
        assert_eq!(nli_retrieval_score(&d(1.0, 0.0, 0.0)), 1.0);
        assert_eq!(nli_retrieval_score(&d(0.0, 1.0, 0.0)), 0.5);
    }

    #[test]
    fn top_k_examples() {
        let three = [rs(0, 0.1), rs(1, 0.5), rs(2, 0.3)];
        assert_eq!(top_k(&three, 7).len(), 3);
        let idx: Vec<usize> = top_k(&three, 2).iter().map(|r| r.index).collect();
        assert_eq!(idx, vec![1, 2]);
        let tie = [rs(0, 0.2), rs(1, 0.9), rs(2, 0.5), rs(3, 0.5)];
        let idx: Vec<usize> = top_k(&tie, 2).iter().map(|r| r.index).collect();
        assert_eq!(idx, vec![1, 2]);
    }

    #[test]
    fn rtp_premise_examples() {
        let doc = EvidenceDocument::from_sentences("d", ["S0.", "S1.", "S2.", "S3.", "S4."]);
        let ev = EvidenceSet::single(&doc);
        let r = |i| SentenceRef::new("d", i);
        assert_eq!(build_rtp_premise(&ev, &[r(4), r(1)]).unwrap(), "S1. S4.");
        assert_eq!(build_rtp_premise(&ev, &[r(2)]).unwrap(), "S2.");
        assert_eq!(build_rtp_premise(&ev, &[r(3), r(1), r(3)]).unwrap(), "S1. S3.");
        assert!(matches!(build_rtp_premise(&ev, &[]), Err(RetrievalError::EmptySelection)));
        assert!(matches!(build_rtp_premise(&ev, &[r(9)]), Err(RetrievalError::UnknownSentence(_))));
    }

    #[test]
    fn rtp_scores_the_concatenated_premise() {
        let doc = EvidenceDocument::from_sentences("d", ["The tower is tall.", "Noise.", "It opened in 1889."]);
        let ev = EvidenceSet::single(&doc);
        let scorer = Scorer::sequential(Arc::new(LexicalBackend::default()));
        let scores = nli_sentence_scores("c", "The tower opened in 1889.", &ev, &scorer, None).unwrap();
        let (refs, verdict) =
            retrieve_then_predict("c", "The tower opened in 1889.", &ev, &scores, 2, &scorer, 0.5).unwrap();
        let idx: Vec<usize> = refs.iter().map(|r| r.index).collect();
        assert_eq!(idx, vec![0, 2]);
        assert_eq!(verdict.strategy, "rtp");
        assert_eq!(verdict.per_partition_scores.len(), 1);
    }

    proptest! {
        #[test]
        fn top_k_size_and_order(scores in prop::collection::vec(0u8..5, 1..20), k in 1usize..10) {
            let items: Vec<RetrievalScore> = scores.iter().enumerate().map(|(i, &s)| rs(i, s as f64)).collect();
            let out = top_k(&items, k);
            prop_assert_eq!(out.len(), k.min(items.len()));
            let picked: Vec<f64> = out.iter().map(|r| items[r.index].score).collect();
            prop_assert!(picked.windows(2).all(|w| w[0] >= w[1]));
            let worst_kept = picked.last().copied().unwrap();
            for s in &items {
                if !out.contains(&s.sentence) {
                    prop_assert!(s.score <= worst_kept);
                    if s.score == worst_kept {
                        prop_assert!(out.iter().all(|r| items[r.index].score > worst_kept || r.index < s.sentence.index));
                    }
                }
            }
            prop_assert_eq!(top_k(&items, k), out);
        }

        #[test]
        fn nli_score_monotone(s in 0.0f64..0.4, p in 0.0f64..0.4, ds in 0.0f64..0.2) {
            let a = ScoreDistribution::new(s, p, 1.0 - s - p).unwrap();
            let b = ScoreDistribution::new(s + ds, p, 1.0 - s - p - ds).unwrap();
            let c = ScoreDistribution::new(s, p + ds, 1.0 - s - p - ds).unwrap();
            prop_assert!(nli_retrieval_score(&b) >= nli_retrieval_score(&a));
            prop_assert!(nli_retrieval_score(&c) >= nli_retrieval_score(&a));
            prop_assert!((0.0..=1.0).contains(&nli_retrieval_score(&a)));
        }
    }
}
