//! Claims, evidence documents and gold annotations.
//!
//! Corpora are stored as two JSONL files, one record per line: a claims file
//! ([`Claim`] records with nested [`Subclaim`]s) and an evidence file
//! ([`EvidenceDocument`] records). Worker-level judgments live in a separate
//! raw-annotations file ([`RawAnnotationRecord`]). Fields the crate does not
//! know about are kept and written back unchanged.

mod aggregate;
mod agreement;
mod io;
mod stats;
mod types;
pub mod wice;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use aggregate::{
    aggregate_gold, aggregate_worker_labels, annotate_corpus, derive_partition_labels,
    normalize_worker, project_claim_gold, project_claim_label, project_claim_support,
    AnnotationOutcome, TOKEN_DISAGREEMENT_LIMIT,
};
pub use agreement::krippendorff_alpha;
pub use io::{read_jsonl, read_jsonl_lines, write_jsonl, write_jsonl_to};
pub use stats::{dataset_stats, round1, LabelDistribution, StatsReport};
pub use types::{
    Claim, EntailmentLabel, EvidenceDocument, GoldAnnotation, Sentence, SentenceRef, Subclaim,
    SupportSet, WorkerAnnotation,
};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: I/O error")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record")]
    Parse {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid data: {0}")]
    Invalid(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Worker annotations for one subclaim, as stored in the raw-annotations file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawAnnotationRecord {
    pub claim_id: String,
    pub subclaim_id: String,
    pub workers: Vec<WorkerAnnotation>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

/// An in-memory corpus. Immutable once loaded and validated.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub claims: Vec<Claim>,
    pub documents: BTreeMap<String, EvidenceDocument>,
}

impl Corpus {
    pub fn new(claims: Vec<Claim>, documents: Vec<EvidenceDocument>) -> Result<Self, CorpusError> {
        let mut by_id = BTreeMap::new();
        for doc in documents {
            if by_id.contains_key(&doc.id) {
                return Err(CorpusError::Invalid(format!("duplicate document id {}", doc.id)));
            }
            by_id.insert(doc.id.clone(), doc);
        }
        let corpus = Self {
            claims,
            documents: by_id,
        };
        corpus.validate()?;
        Ok(corpus)
    }

    pub fn load(claims: impl AsRef<Path>, evidence: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let claims: Vec<Claim> = read_jsonl(claims)?;
        let documents: Vec<EvidenceDocument> = read_jsonl(evidence)?;
        Self::new(claims, documents)
    }

    pub fn save(&self, claims: impl AsRef<Path>, evidence: impl AsRef<Path>) -> Result<(), CorpusError> {
        write_jsonl(claims, &self.claims)?;
        write_jsonl(evidence, self.documents.values())
    }

    /// Checks every structural invariant: document indices and token counts,
    /// evidence resolution, subclaim tokens, gold annotations and the sentences
    /// they reference.
    pub fn validate(&self) -> Result<(), CorpusError> {
        for doc in self.documents.values() {
            doc.validate()?;
        }
        let mut seen = std::collections::HashSet::new();
        for claim in &self.claims {
            if !seen.insert(claim.id.as_str()) {
                return Err(CorpusError::Invalid(format!("duplicate claim id {}", claim.id)));
            }
            if claim.text.trim().is_empty() {
                return Err(CorpusError::Invalid(format!("claim {}: empty text", claim.id)));
            }
            let evidence = self.evidence(claim)?;
            if let Some(gold) = &claim.gold {
                gold.validate(&claim.id, crate::textproc::token_count(&claim.text))?;
                check_refs(&evidence, gold, &claim.id)?;
            }
            for sub in &claim.subclaims {
                if sub.text.trim().is_empty() {
                    return Err(CorpusError::Invalid(format!("subclaim {}: empty text", sub.id)));
                }
                if sub.tokens != crate::textproc::tokenize(&sub.text) {
                    return Err(CorpusError::Invalid(format!(
                        "subclaim {}: tokens do not match the tokenizer output",
                        sub.id
                    )));
                }
                if let Some(gold) = &sub.gold {
                    gold.validate(&sub.id, sub.tokens.len())?;
                    check_refs(&evidence, gold, &sub.id)?;
                }
            }
        }
        Ok(())
    }

    /// The claim's evidence documents in citation order.
    pub fn evidence<'a>(&'a self, claim: &Claim) -> Result<EvidenceSet<'a>, CorpusError> {
        let docs = claim
            .evidence_ids
            .iter()
            .map(|id| {
                self.documents.get(id).ok_or_else(|| {
                    CorpusError::Invalid(format!("claim {}: unknown evidence document {id}", claim.id))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EvidenceSet { docs })
    }

    pub fn claim(&self, id: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.id == id)
    }
}

fn check_refs(evidence: &EvidenceSet<'_>, gold: &GoldAnnotation, owner: &str) -> Result<(), CorpusError> {
    for r in gold.support_sets.iter().flatten() {
        if evidence.text(r).is_none() {
            return Err(CorpusError::Invalid(format!("{owner}: unknown sentence {r}")));
        }
    }
    Ok(())
}

/// The ordered evidence documents of one claim.
///
/// Document order is citation order, then sentence index.
#[derive(Debug, Clone)]
pub struct EvidenceSet<'a> {
    pub docs: Vec<&'a EvidenceDocument>,
}

impl<'a> EvidenceSet<'a> {
    pub fn single(doc: &'a EvidenceDocument) -> Self {
        Self { docs: vec![doc] }
    }

    pub fn sentences(&self) -> impl Iterator<Item = (SentenceRef, &'a Sentence)> + '_ {
        self.docs
            .iter()
            .flat_map(|doc| doc.sentences.iter().map(move |s| (doc.sentence_ref(s.index), s)))
    }

    pub fn len(&self) -> usize {
        self.docs.iter().map(|d| d.sentences.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sentence(&self, r: &SentenceRef) -> Option<&'a Sentence> {
        self.docs
            .iter()
            .find(|d| d.id == r.doc_id)
            .and_then(|d| d.sentences.get(r.index))
    }

    pub fn text(&self, r: &SentenceRef) -> Option<&'a str> {
        self.sentence(r).map(|s| s.text.as_str())
    }

    /// Global document-order position of a sentence.
    pub fn position(&self, r: &SentenceRef) -> Option<usize> {
        let mut offset = 0;
        for doc in &self.docs {
            if doc.id == r.doc_id {
                return (r.index < doc.sentences.len()).then_some(offset + r.index);
            }
            offset += doc.sentences.len();
        }
        None
    }

    /// Sorts refs into document order, dropping unknown ones and duplicates.
    pub fn in_document_order<'r, I>(&self, refs: I) -> Vec<SentenceRef>
    where
        I: IntoIterator<Item = &'r SentenceRef>,
    {
        let mut keyed: Vec<(usize, SentenceRef)> = refs
            .into_iter()
            .filter_map(|r| self.position(r).map(|p| (p, r.clone())))
            .collect();
        keyed.sort_by_key(|(p, _)| *p);
        keyed.dedup_by_key(|(p, _)| *p);
        keyed.into_iter().map(|(_, r)| r).collect()
    }

    /// Texts of `refs` in document order joined by single spaces.
    pub fn join(&self, refs: &[SentenceRef]) -> String {
        self.in_document_order(refs)
            .iter()
            .filter_map(|r| self.text(r))
            .collect::<Vec<_>>()
            .join(" ")
    }
}
