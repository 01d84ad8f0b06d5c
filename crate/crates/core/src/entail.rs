//! Document-level entailment by scoring evidence partitions.
//!
//! The MAX strategy scores the claim against every partition of the evidence
//! (sentences or token-bounded chunks) and keeps the highest supported
//! probability. With claim decomposition, each subclaim gets its own MAX
//! score and the subclaim scores are combined, by default with the harmonic
//! mean.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Claim, Corpus, CorpusError, EvidenceSet, SentenceRef};
use crate::scorer::{binary_score, ScoreError, ScoreRequest, Scorer};
use crate::textproc;

/// Scores at or below this are treated as zero by the harmonic mean.
pub const ZERO_SCORE_EPSILON: f64 = 1e-9;

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum EntailError {
    #[error("{0}: no evidence partitions to score")]
    NoEvidence(String),
    #[error("{0}: no subclaims")]
    NoSubclaims(String),
    #[error("cannot aggregate an empty score list")]
    EmptyScores,
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    Sentence,
    Chunk,
    /// The whole evidence as a single premise.
    Document,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    Harmonic,
    Min,
    Mean,
}

impl Aggregation {
    pub fn apply(self, scores: &[f64]) -> Result<f64, EntailError> {
        match self {
            Aggregation::Harmonic => harmonic_aggregate(scores),
            Aggregation::Min => scores.iter().copied().reduce(f64::min).ok_or(EntailError::EmptyScores),
            Aggregation::Mean => {
                if scores.is_empty() {
                    Err(EntailError::EmptyScores)
                } else {
                    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Aggregation::Harmonic => "harmonic",
            Aggregation::Min => "min",
            Aggregation::Mean => "mean",
        }
    }
}

/// Harmonic mean of subclaim scores; 0 as soon as any score is (nearly) 0.
pub fn harmonic_aggregate(scores: &[f64]) -> Result<f64, EntailError> {
    if scores.is_empty() {
        return Err(EntailError::EmptyScores);
    }
    if scores.iter().any(|&s| s <= ZERO_SCORE_EPSILON) {
        return Ok(0.0);
    }
    let inverse_sum: f64 = scores.iter().map(|s| 1.0 / s).sum();
    Ok(scores.len() as f64 / inverse_sum)
}

/// A premise built from evidence sentences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub refs: Vec<SentenceRef>,
    pub text: String,
}

/// Splits evidence into partitions. Chunks never cross document boundaries.
pub fn partitions(evidence: &EvidenceSet<'_>, level: Level, chunk_tokens: usize) -> Vec<Partition> {
    match level {
        Level::Sentence => evidence
            .sentences()
            .map(|(r, s)| Partition {
                refs: vec![r],
                text: s.text.clone(),
            })
            .collect(),
        Level::Chunk => evidence
            .docs
            .iter()
            .flat_map(|doc| {
                textproc::chunk(doc, chunk_tokens).into_iter().map(move |c| Partition {
                    text: c.text(doc),
                    refs: c.sentence_indices.iter().map(|&i| doc.sentence_ref(i)).collect(),
                })
            })
            .collect(),
        Level::Document => {
            let refs: Vec<SentenceRef> = evidence.sentences().map(|(r, _)| r).collect();
            if refs.is_empty() {
                Vec::new()
            } else {
                vec![Partition {
                    text: evidence.join(&refs),
                    refs,
                }]
            }
        }
    }
}

/// Document-level decision for one claim (or subclaim).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntailmentVerdict {
    pub claim_id: String,
    pub strategy: String,
    pub score: f64,
    pub predicted: bool,
    pub per_partition_scores: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subclaim_scores: Vec<f64>,
}

impl EntailmentVerdict {
    pub fn new(claim_id: impl Into<String>, strategy: impl Into<String>, score: f64, threshold: f64) -> Self {
        Self {
            claim_id: claim_id.into(),
            strategy: strategy.into(),
            score,
            predicted: score > threshold,
            per_partition_scores: Vec::new(),
            subclaim_scores: Vec::new(),
        }
    }
}

fn requests(id: &str, hypothesis: &str, partitions: &[String]) -> Result<Vec<ScoreRequest>, ScoreError> {
    partitions
        .iter()
        .enumerate()
        .map(|(i, p)| ScoreRequest::new(format!("{id}/p{i}"), hypothesis, p.as_str()))
        .collect()
}

/// MAX strategy: the verdict score is the largest supported probability
/// over all partitions.
pub fn max_stretch(
    claim_id: &str,
    claim_text: &str,
    partitions: &[String],
    scorer: &Scorer,
    threshold: f64,
) -> Result<EntailmentVerdict, EntailError> {
    if partitions.is_empty() {
        return Err(EntailError::NoEvidence(claim_id.to_string()));
    }
    let scores: Vec<f64> = scorer
        .score(&requests(claim_id, claim_text, partitions)?)?
        .iter()
        .map(binary_score)
        .collect();
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut verdict = EntailmentVerdict::new(claim_id, "max", max, threshold);
    verdict.per_partition_scores = scores;
    Ok(verdict)
}

/// Per-subclaim MAX scores combined with `aggregation` and thresholded.
pub fn classify_with_claimsplit(
    claim_id: &str,
    subclaims: &[&str],
    partitions: &[String],
    scorer: &Scorer,
    threshold: f64,
    aggregation: Aggregation,
) -> Result<EntailmentVerdict, EntailError> {
    if subclaims.is_empty() {
        return Err(EntailError::NoSubclaims(claim_id.to_string()));
    }
    if partitions.is_empty() {
        return Err(EntailError::NoEvidence(claim_id.to_string()));
    }
    let mut all = Vec::with_capacity(subclaims.len() * partitions.len());
    for (j, sub) in subclaims.iter().enumerate() {
        all.extend(requests(&format!("{claim_id}/s{j}"), sub, partitions)?);
    }
    let scores: Vec<f64> = scorer.score(&all)?.iter().map(binary_score).collect();
    let subclaim_scores: Vec<f64> = scores
        .chunks(partitions.len())
        .map(|c| c.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let score = aggregation.apply(&subclaim_scores)?;
    let mut verdict = EntailmentVerdict::new(claim_id, format!("max+{}", aggregation.name()), score, threshold);
    verdict.subclaim_scores = subclaim_scores;
    Ok(verdict)
}

/// Result of removing trivially entailed claims.
#[derive(Debug, Clone, Default)]
pub struct FilterOutcome {
    pub retained: Vec<Claim>,
    pub removed: Vec<String>,
}

/// Removes claims whose every subclaim is entailed by at least one chunk,
/// i.e. has a MAX chunk score above `entail_threshold`. A claim without
/// subclaims is judged on its own text.
pub fn filter_trivially_entailed(
    corpus: &Corpus,
    claims: &[Claim],
    scorer: &Scorer,
    chunk_tokens: usize,
    entail_threshold: f64,
) -> Result<FilterOutcome, EntailError> {
    let mut outcome = FilterOutcome::default();
    for claim in claims {
        let evidence = corpus.evidence(claim)?;
        let premises: Vec<String> = partitions(&evidence, Level::Chunk, chunk_tokens)
            .into_iter()
            .map(|p| p.text)
            .collect();
        let units: Vec<(&str, &str)> = if claim.subclaims.is_empty() {
            vec![(claim.id.as_str(), claim.text.as_str())]
        } else {
            claim.subclaims.iter().map(|s| (s.id.as_str(), s.text.as_str())).collect()
        };
        let mut all_entailed = !premises.is_empty();
        for (id, text) in units {
            if !all_entailed {
                break;
            }
            let verdict = max_stretch(id, text, &premises, scorer, entail_threshold)?;
            all_entailed = verdict.predicted;
        }
        if all_entailed {
            outcome.removed.push(claim.id.clone());
        } else {
            outcome.retained.push(claim.clone());
        }
    }
    Ok(outcome)
}
