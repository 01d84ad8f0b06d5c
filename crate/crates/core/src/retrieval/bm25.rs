use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::RetrievalScore;
use crate::corpus::EvidenceSet;
use crate::textproc::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.5, b: 0.75 }
    }
}

/// Okapi BM25 with each evidence sentence as a document and the claim's
/// evidence as the collection.
///
/// `idf(t) = max(0, ln(1 + (N - df + 0.5) / (df + 0.5)))`. Repeated query
/// tokens contribute once per occurrence. Scores come back in document order.
pub fn bm25_scores(claim_tokens: &[String], evidence: &EvidenceSet<'_>, params: Bm25Params) -> Vec<RetrievalScore> {
    let docs: Vec<_> = evidence
        .sentences()
        .map(|(r, s)| (r, tokenize(&s.text)))
        .collect();
    let n = docs.len() as f64;
    let total_len: usize = docs.iter().map(|(_, t)| t.len()).sum();
    let avgdl = if docs.is_empty() { 0.0 } else { total_len as f64 / n };

    let mut df: HashMap<&str, usize> = HashMap::new();
    for (_, tokens) in &docs {
        let mut seen: Vec<&str> = tokens.iter().map(String::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        for t in seen {
            *df.entry(t).or_default() += 1;
        }
    }
    let idf = |t: &str| {
        let d = df.get(t).copied().unwrap_or(0) as f64;
        (1.0 + (n - d + 0.5) / (d + 0.5)).ln().max(0.0)
    };

    docs.iter()
        .map(|(r, tokens)| {
            let mut tf: HashMap<&str, usize> = HashMap::new();
            for t in tokens {
                *tf.entry(t.as_str()).or_default() += 1;
            }
            let dl = tokens.len() as f64;
            let norm = if avgdl > 0.0 { dl / avgdl } else { 0.0 };
            let score = claim_tokens
                .iter()
                .map(|q| {
                    let f = tf.get(q.as_str()).copied().unwrap_or(0) as f64;
                    if f == 0.0 {
                        0.0
                    } else {
                        idf(q) * f * (params.k1 + 1.0) / (f + params.k1 * (1.0 - params.b + params.b * norm))
                    }
                })
                .sum();
            RetrievalScore {
                sentence: r.clone(),
                score,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::EvidenceDocument;

    #[test]
    fn absent_terms_score_zero() {
        let doc = EvidenceDocument::from_sentences("d", ["alpha beta", "gamma"]);
        let scores = bm25_scores(&tokenize("delta"), &EvidenceSet::single(&doc), Bm25Params::default());
        assert!(scores.iter().all(|s| s.score == 0.0));
    }

    #[test]
    fn single_sentence_containing_query_is_positive() {
        let doc = EvidenceDocument::from_sentences("d", ["The bridge opened in 1932."]);
        let scores = bm25_scores(&tokenize("bridge opened"), &EvidenceSet::single(&doc), Bm25Params::default());
        assert!(scores[0].score > 0.0);
    }

    #[test]
    fn empty_evidence() {
        let doc = EvidenceDocument::from_sentences("d", Vec::<String>::new());
        assert!(bm25_scores(&tokenize("x"), &EvidenceSet::single(&doc), Bm25Params::default()).is_empty());
    }
}
