//! Importer for the public WiCE release (`entailment_retrieval/{claim,subclaim}/<split>.jsonl`).
//!
//! Each release line carries `label`, `supporting_sentences` (a list of
//! alternative index lists), `claim`, `evidence` (sentence list) and a `meta`
//! object with at least `id`. Subclaim records are linked to their claim by
//! `meta.claim_id` when present, otherwise by stripping a trailing `-<n>`
//! from the subclaim id.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;

use super::types::{Claim, EntailmentLabel, EvidenceDocument, GoldAnnotation, SentenceRef, Subclaim, SupportSet};
use super::{read_jsonl, Corpus, CorpusError, LabelDistribution};

#[derive(Debug, Clone, Deserialize)]
pub struct WiceRecord {
    pub label: String,
    #[serde(default)]
    pub supporting_sentences: Vec<Vec<usize>>,
    pub claim: String,
    #[serde(default)]
    pub evidence: Vec<String>,
    #[serde(default)]
    pub meta: Value,
}

impl WiceRecord {
    pub fn id(&self) -> Option<&str> {
        self.meta.get("id").and_then(Value::as_str)
    }

    pub fn label(&self) -> Result<EntailmentLabel, CorpusError> {
        self.label.parse()
    }

    fn context(&self) -> String {
        match self.meta.get("claim_context") {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Array(parts)) => parts
                .iter()
                .filter_map(Value::as_str)
                .collect::<Vec<_>>()
                .join(" "),
            _ => String::new(),
        }
    }

    fn parent_id(&self) -> Option<String> {
        if let Some(parent) = self.meta.get("claim_id").and_then(Value::as_str) {
            return Some(parent.to_string());
        }
        let id = self.id()?;
        let (head, tail) = id.rsplit_once('-')?;
        tail.chars().all(|c| c.is_ascii_digit()).then(|| head.to_string())
    }

    fn gold(&self, doc_id: &str) -> Result<GoldAnnotation, CorpusError> {
        let label = self.label()?;
        let support_sets: Vec<SupportSet> = if label == EntailmentLabel::NotSupported {
            Vec::new()
        } else {
            self.supporting_sentences
                .iter()
                .map(|set| set.iter().map(|&i| SentenceRef::new(doc_id, i)).collect::<SupportSet>())
                .filter(|s| !s.is_empty())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        };
        Ok(GoldAnnotation {
            label,
            support_sets,
            unsupported_token_indices: BTreeSet::new(),
        })
    }
}

/// Paths of one split in a release directory.
#[derive(Debug, Clone)]
pub struct WiceSplit {
    pub claims: PathBuf,
    pub subclaims: PathBuf,
}

impl WiceSplit {
    /// `root` is the `entailment_retrieval` directory of the release.
    pub fn in_release(root: impl AsRef<Path>, split: &str) -> Self {
        let root = root.as_ref();
        Self {
            claims: root.join("claim").join(format!("{split}.jsonl")),
            subclaims: root.join("subclaim").join(format!("{split}.jsonl")),
        }
    }

    pub fn exists(&self) -> bool {
        self.claims.is_file() && self.subclaims.is_file()
    }
}

/// Counts read straight from the release files.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WiceSplitCounts {
    pub claims: usize,
    pub subclaims: usize,
    pub claim_labels: LabelDistribution,
    pub subclaim_labels: LabelDistribution,
}

pub fn split_counts(split: &WiceSplit) -> Result<WiceSplitCounts, CorpusError> {
    let claims: Vec<WiceRecord> = read_jsonl(&split.claims)?;
    let subclaims: Vec<WiceRecord> = read_jsonl(&split.subclaims)?;
    let mut counts = WiceSplitCounts {
        claims: claims.len(),
        subclaims: subclaims.len(),
        ..Default::default()
    };
    for r in &claims {
        counts.claim_labels.add(r.label()?);
    }
    for r in &subclaims {
        counts.subclaim_labels.add(r.label()?);
    }
    Ok(counts)
}

/// Converts one release split into a corpus. Evidence documents are named
/// `<claim id>-evidence`. Subclaims whose claim is missing are reported in
/// the returned list of orphan ids.
pub fn import_split(split: &WiceSplit) -> Result<(Corpus, Vec<String>), CorpusError> {
    let claim_records: Vec<WiceRecord> = read_jsonl(&split.claims)?;
    let sub_records: Vec<WiceRecord> = read_jsonl(&split.subclaims)?;

    let mut claims = Vec::with_capacity(claim_records.len());
    let mut documents = Vec::with_capacity(claim_records.len());
    let mut position: BTreeMap<String, usize> = BTreeMap::new();
    for (n, record) in claim_records.iter().enumerate() {
        let id = record
            .id()
            .map(str::to_string)
            .unwrap_or_else(|| format!("claim-{n:05}"));
        let doc_id = format!("{id}-evidence");
        documents.push(EvidenceDocument::from_sentences(doc_id.clone(), record.evidence.clone()));
        let mut claim = Claim::new(id.clone(), record.claim.clone());
        claim.context = record.context();
        claim.evidence_ids = vec![doc_id.clone()];
        claim.gold = Some(record.gold(&doc_id)?);
        position.insert(id, claims.len());
        claims.push(claim);
    }

    let mut orphans = Vec::new();
    for (n, record) in sub_records.iter().enumerate() {
        let sub_id = record
            .id()
            .map(str::to_string)
            .unwrap_or_else(|| format!("subclaim-{n:05}"));
        let Some(&at) = record.parent_id().as_ref().and_then(|p| position.get(p)) else {
            orphans.push(sub_id);
            continue;
        };
        let doc_id = claims[at].evidence_ids[0].clone();
        let mut sub = Subclaim::new(sub_id, record.claim.clone());
        sub.gold = Some(record.gold(&doc_id)?);
        claims[at].subclaims.push(sub);
    }

    let mut by_id = BTreeMap::new();
    for doc in documents {
        by_id.insert(doc.id.clone(), doc);
    }
    Ok((
        Corpus {
            claims,
            documents: by_id,
        },
        orphans,
    ))
}
