//! Oracle-retrieval dataset: per claim (or subclaim), three chunks built
//! around gold supporting-sentence sets and padded with random evidence
//! sentences up to the token budget.
//!
//! Items with no gold set fall back to the leading chunks of the standard
//! greedy chunking. Randomness is drawn from a per-item stream derived from
//! the global seed and the item id, so output does not depend on item order
//! or thread count.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, CorpusError, EvidenceSet, GoldAnnotation, SentenceRef, SupportSet};
use crate::entail::{max_stretch, EntailError, EntailmentVerdict};
use crate::rng::{below, derive_seed, rng_from_seed, shuffle, SeededRng};
use crate::scorer::Scorer;
use crate::textproc::chunk;

pub const ORACLE_CHUNKS: usize = 3;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("{0}: no gold annotation and no evidence")]
    NoEvidence(String),
    #[error("{item}: gold sentence {sentence} is not in the evidence")]
    UnknownSentence { item: String, sentence: SentenceRef },
    #[error("no hypothesis text for oracle item {0}")]
    UnknownItem(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Entail(#[from] EntailError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChunkOrigin {
    GoldPadded,
    MaxFallback,
}

/// One oracle chunk; also the line format of the persisted dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleChunk {
    pub claim_id: String,
    pub chunk_index: usize,
    /// Document order.
    pub refs: Vec<SentenceRef>,
    pub token_count: usize,
    pub origin: ChunkOrigin,
    /// Which gold set the chunk was built from, in the annotation's order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_set: Option<usize>,
    /// The per-item seed actually used.
    pub seed: u64,
}

/// Gold sentences in document order, with trailing ones dropped until the
/// total fits `max_tokens`. A lone sentence is kept even when too long.
fn trimmed_gold(item: &str, set: &SupportSet, evidence: &EvidenceSet<'_>, max_tokens: usize) -> Result<(Vec<SentenceRef>, usize), OracleError> {
    if let Some(missing) = set.iter().find(|r| evidence.position(r).is_none()) {
        return Err(OracleError::UnknownSentence {
            item: item.to_string(),
            sentence: missing.clone(),
        });
    }
    let mut refs = evidence.in_document_order(set);
    let cost = |r: &SentenceRef| evidence.sentence(r).map_or(0, |s| s.token_count);
    let mut total: usize = refs.iter().map(cost).sum();
    while total > max_tokens && refs.len() > 1 {
        let last = refs.pop().unwrap();
        total -= cost(&last);
    }
    Ok((refs, total))
}

/// Adds shuffled non-included sentences until the next one would overflow.
fn pad(
    mut refs: Vec<SentenceRef>,
    mut total: usize,
    evidence: &EvidenceSet<'_>,
    max_tokens: usize,
    rng: &mut SeededRng,
) -> (Vec<SentenceRef>, usize) {
    let included: BTreeSet<SentenceRef> = refs.iter().cloned().collect();
    let mut pool: Vec<(SentenceRef, usize)> = evidence
        .sentences()
        .filter(|(r, _)| !included.contains(r))
        .map(|(r, s)| (r, s.token_count))
        .collect();
    shuffle(rng, &mut pool);
    for (r, cost) in pool {
        if total + cost > max_tokens {
            break;
        }
        total += cost;
        refs.push(r);
    }
    (evidence.in_document_order(&refs), total)
}

fn max_fallback(item: &str, evidence: &EvidenceSet<'_>, max_tokens: usize, seed: u64) -> Result<Vec<OracleChunk>, OracleError> {
    let chunks: Vec<_> = evidence.docs.iter().flat_map(|d| chunk(d, max_tokens)).collect();
    if chunks.is_empty() {
        return Err(OracleError::NoEvidence(item.to_string()));
    }
    Ok((0..ORACLE_CHUNKS)
        .map(|i| {
            let c = &chunks[i % chunks.len()];
            OracleChunk {
                claim_id: item.to_string(),
                chunk_index: i,
                refs: c.sentence_indices.iter().map(|&s| SentenceRef::new(c.doc_id.clone(), s)).collect(),
                token_count: c.token_count,
                origin: ChunkOrigin::MaxFallback,
                gold_set: None,
                seed,
            }
        })
        .collect())
}

/// Exactly [`ORACLE_CHUNKS`] chunks for one claim or subclaim.
///
/// With three or more gold sets, three are picked uniformly without
/// replacement; with fewer, the sets are reused in turn and each copy gets
/// its own padding. Without gold sets the first greedy chunks are used,
/// repeating them when the evidence yields fewer than three.
pub fn build_oracle_chunks(
    item_id: &str,
    gold: Option<&GoldAnnotation>,
    evidence: &EvidenceSet<'_>,
    seed: u64,
    max_tokens: usize,
) -> Result<Vec<OracleChunk>, OracleError> {
    let sets: Vec<&SupportSet> = gold
        .map(|g| g.support_sets.iter().filter(|s| !s.is_empty()).collect())
        .unwrap_or_default();
    if sets.is_empty() {
        return max_fallback(item_id, evidence, max_tokens, seed);
    }
    let mut rng = rng_from_seed(seed);
    let picked: Vec<usize> = if sets.len() >= ORACLE_CHUNKS {
        let mut order: Vec<usize> = (0..sets.len()).collect();
        // Partial Fisher-Yates: the first ORACLE_CHUNKS slots are a uniform sample.
        for i in 0..ORACLE_CHUNKS {
            let j = i + below(&mut rng, sets.len() - i);
            order.swap(i, j);
        }
        let mut chosen = order[..ORACLE_CHUNKS].to_vec();
        chosen.sort_unstable();
        chosen
    } else {
        (0..ORACLE_CHUNKS).map(|i| i % sets.len()).collect()
    };
    picked
        .into_iter()
        .enumerate()
        .map(|(chunk_index, set_index)| {
            let (gold_refs, total) = trimmed_gold(item_id, sets[set_index], evidence, max_tokens)?;
            let (refs, token_count) = pad(gold_refs, total, evidence, max_tokens, &mut rng);
            Ok(OracleChunk {
                claim_id: item_id.to_string(),
                chunk_index,
                refs,
                token_count,
                origin: ChunkOrigin::GoldPadded,
                gold_set: Some(set_index),
                seed,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleLevel {
    Claim,
    Subclaim,
}

/// Oracle chunks for every claim (or every subclaim) of `claim_ids`, in
/// input order. Per-item seeds come from `derive_seed(global_seed, id)`.
pub fn build_oracle_dataset(
    corpus: &Corpus,
    claim_ids: &[String],
    level: OracleLevel,
    global_seed: u64,
    max_tokens: usize,
) -> Result<Vec<OracleChunk>, OracleError> {
    let mut items: Vec<(String, Option<&GoldAnnotation>, EvidenceSet<'_>)> = Vec::new();
    for id in claim_ids {
        let claim = corpus
            .claim(id)
            .ok_or_else(|| CorpusError::Invalid(format!("unknown claim {id}")))?;
        let evidence = corpus.evidence(claim)?;
        match level {
            OracleLevel::Claim => items.push((claim.id.clone(), claim.gold.as_ref(), evidence)),
            OracleLevel::Subclaim => {
                for sub in &claim.subclaims {
                    items.push((sub.id.clone(), sub.gold.as_ref(), evidence.clone()));
                }
            }
        }
    }
    let per_item: Vec<Vec<OracleChunk>> = items
        .par_iter()
        .map(|(id, gold, evidence)| build_oracle_chunks(id, *gold, evidence, derive_seed(global_seed, id), max_tokens))
        .collect::<Result<_, _>>()?;
    Ok(per_item.into_iter().flatten().collect())
}


/// MAX over each item's oracle chunks. Items appear in the order of their
/// first chunk; hypotheses are looked up among claims and subclaims.
pub fn score_oracle(corpus: &Corpus, chunks: &[OracleChunk], scorer: &Scorer, threshold: f64) -> Result<Vec<EntailmentVerdict>, OracleError> {
    let mut hypotheses: HashMap<&str, (&str, &crate::corpus::Claim)> = HashMap::new();
    for claim in &corpus.claims {
        hypotheses.insert(&claim.id, (&claim.text, claim));
        for sub in &claim.subclaims {
            hypotheses.insert(&sub.id, (&sub.text, claim));
        }
    }
    let mut order: Vec<&str> = Vec::new();
    let mut grouped: HashMap<&str, Vec<&OracleChunk>> = HashMap::new();
    for c in chunks {
        let entry = grouped.entry(&c.claim_id).or_default();
        if entry.is_empty() {
            order.push(&c.claim_id);
        }
        entry.push(c);
    }
    order
        .into_iter()
        .map(|id| {
            let (text, claim) = hypotheses.get(id).ok_or_else(|| OracleError::UnknownItem(id.to_string()))?;
            let evidence = corpus.evidence(claim)?;
            let premises: Vec<String> = grouped[id].iter().map(|c| evidence.join(&c.refs)).collect();
            let mut verdict = max_stretch(id, text, &premises, scorer, threshold)?;
            verdict.strategy = "oracle".into();
            Ok(verdict)
        })
        .collect()
}
