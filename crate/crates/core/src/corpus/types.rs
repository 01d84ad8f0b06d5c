use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use super::CorpusError;
use crate::textproc;

/// Three-way entailment label.
///
/// Ordering for reporting is `Supported > PartiallySupported > NotSupported`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntailmentLabel {
    Supported,
    PartiallySupported,
    NotSupported,
}

impl EntailmentLabel {
    pub const ALL: [EntailmentLabel; 3] = [
        EntailmentLabel::Supported,
        EntailmentLabel::PartiallySupported,
        EntailmentLabel::NotSupported,
    ];

    fn rank(self) -> u8 {
        match self {
            EntailmentLabel::Supported => 2,
            EntailmentLabel::PartiallySupported => 1,
            EntailmentLabel::NotSupported => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EntailmentLabel::Supported => "supported",
            EntailmentLabel::PartiallySupported => "partially_supported",
            EntailmentLabel::NotSupported => "not_supported",
        }
    }
}

impl PartialOrd for EntailmentLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EntailmentLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl fmt::Display for EntailmentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntailmentLabel {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().replace('-', "_").as_str() {
            "supported" => Ok(EntailmentLabel::Supported),
            "partially_supported" => Ok(EntailmentLabel::PartiallySupported),
            "not_supported" | "non_supported" => Ok(EntailmentLabel::NotSupported),
            other => Err(CorpusError::Invalid(format!("unknown label {other:?}"))),
        }
    }
}

/// Reference to one evidence sentence: document id plus 0-based index.
///
/// Serialized as a two-element JSON array `["doc-id", 3]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SentenceRef {
    pub doc_id: String,
    pub index: usize,
}

impl SentenceRef {
    pub fn new(doc_id: impl Into<String>, index: usize) -> Self {
        Self {
            doc_id: doc_id.into(),
            index,
        }
    }
}

impl Serialize for SentenceRef {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (&self.doc_id, self.index).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SentenceRef {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (doc_id, index) = <(String, usize)>::deserialize(deserializer)?;
        Ok(Self { doc_id, index })
    }
}

impl fmt::Display for SentenceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.doc_id, self.index)
    }
}

pub type SupportSet = BTreeSet<SentenceRef>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldAnnotation {
    pub label: EntailmentLabel,
    /// Alternative sets of sentences, each sufficient on its own.
    #[serde(default)]
    pub support_sets: Vec<SupportSet>,
    /// Token positions (into the owning text's token list) marked unsupported.
    #[serde(default, rename = "unsupported_tokens")]
    pub unsupported_token_indices: BTreeSet<usize>,
}

impl GoldAnnotation {
    pub fn not_supported() -> Self {
        Self {
            label: EntailmentLabel::NotSupported,
            support_sets: Vec::new(),
            unsupported_token_indices: BTreeSet::new(),
        }
    }

    /// All sentences mentioned by any support set.
    pub fn support_union(&self) -> SupportSet {
        self.support_sets.iter().flatten().cloned().collect()
    }

    pub fn validate(&self, owner: &str, n_tokens: usize) -> Result<(), CorpusError> {
        let has_sets = !self.support_sets.is_empty();
        let needs_sets = self.label != EntailmentLabel::NotSupported;
        if has_sets != needs_sets {
            return Err(CorpusError::Invalid(format!(
                "{owner}: label {} with {} support sets",
                self.label,
                self.support_sets.len()
            )));
        }
        if self.support_sets.iter().any(BTreeSet::is_empty) {
            return Err(CorpusError::Invalid(format!("{owner}: empty support set")));
        }
        let distinct: BTreeSet<&SupportSet> = self.support_sets.iter().collect();
        if distinct.len() != self.support_sets.len() {
            return Err(CorpusError::Invalid(format!("{owner}: duplicate support sets")));
        }
        if !self.unsupported_token_indices.is_empty() {
            if self.label != EntailmentLabel::PartiallySupported {
                return Err(CorpusError::Invalid(format!(
                    "{owner}: unsupported tokens on a {} item",
                    self.label
                )));
            }
            if let Some(&max) = self.unsupported_token_indices.iter().next_back() {
                if max >= n_tokens {
                    return Err(CorpusError::Invalid(format!(
                        "{owner}: unsupported token index {max} out of range ({n_tokens} tokens)"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One crowd worker's judgment of a subclaim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkerAnnotation {
    pub worker_id: String,
    pub label: EntailmentLabel,
    #[serde(default)]
    pub support_set: SupportSet,
    #[serde(default, rename = "unsupported_tokens")]
    pub unsupported_token_indices: BTreeSet<usize>,
}

impl WorkerAnnotation {
    pub fn validate(&self) -> Result<(), CorpusError> {
        let needs_set = self.label != EntailmentLabel::NotSupported;
        if self.support_set.is_empty() == needs_set {
            return Err(CorpusError::Invalid(format!(
                "worker {}: label {} with {} supporting sentences",
                self.worker_id,
                self.label,
                self.support_set.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subclaim {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub tokens: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<GoldAnnotation>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

impl Subclaim {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        Self {
            id: id.into(),
            tokens: textproc::tokenize(&text),
            text,
            gold: None,
            extra: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub context: String,
    #[serde(default)]
    pub subclaims: Vec<Subclaim>,
    #[serde(default)]
    pub evidence_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<GoldAnnotation>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

impl Claim {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            context: String::new(),
            subclaims: Vec::new(),
            evidence_ids: Vec::new(),
            gold: None,
            extra: BTreeMap::new(),
        }
    }

    /// Claims usable for evaluation carry between two and six subclaims.
    pub fn has_valid_subclaim_count(&self) -> bool {
        crate::decompose::count_accepted(self.subclaims.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub index: usize,
    pub text: String,
    pub token_count: usize,
}

/// On disk, `sentences` is a list of strings; indices and token counts are
/// recomputed when reading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceDocument {
    pub id: String,
    #[serde(with = "sentence_texts")]
    pub sentences: Vec<Sentence>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

mod sentence_texts {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::Sentence;
    use crate::textproc;

    pub fn serialize<S: Serializer>(sentences: &[Sentence], serializer: S) -> Result<S::Ok, S::Error> {
        let texts: Vec<&str> = sentences.iter().map(|s| s.text.as_str()).collect();
        texts.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<Sentence>, D::Error> {
        let texts = Vec::<String>::deserialize(deserializer)?;
        Ok(texts
            .into_iter()
            .enumerate()
            .map(|(index, text)| Sentence {
                index,
                token_count: textproc::token_count(&text),
                text,
            })
            .collect())
    }
}

impl EvidenceDocument {
    /// Builds a document from pre-segmented sentences, computing indices and
    /// token counts.
    pub fn from_sentences<I, S>(id: impl Into<String>, sentences: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let sentences = sentences
            .into_iter()
            .enumerate()
            .map(|(index, text)| {
                let text = text.into();
                Sentence {
                    index,
                    token_count: textproc::token_count(&text),
                    text,
                }
            })
            .collect();
        Self {
            id: id.into(),
            sentences,
            extra: BTreeMap::new(),
        }
    }

    pub fn from_text(id: impl Into<String>, text: &str) -> Self {
        Self::from_sentences(id, textproc::segment_sentences(text))
    }

    pub fn sentence_ref(&self, index: usize) -> SentenceRef {
        SentenceRef::new(self.id.clone(), index)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        for (expected, sentence) in self.sentences.iter().enumerate() {
            if sentence.index != expected {
                return Err(CorpusError::Invalid(format!(
                    "document {}: sentence index {} at position {expected}",
                    self.id, sentence.index
                )));
            }
            let actual = textproc::token_count(&sentence.text);
            if sentence.token_count != actual {
                return Err(CorpusError::Invalid(format!(
                    "document {}: sentence {} token_count {} != {actual}",
                    self.id, sentence.index, sentence.token_count
                )));
            }
        }
        Ok(())
    }
}
