use serde::{Deserialize, Serialize};

use super::RetrievalError;
use crate::corpus::{EvidenceDocument, SentenceRef};

pub const DEFAULT_CONTEXT_TOKENS: usize = 128;
pub const SEP: &str = "<SEP>";

/// A target sentence plus the neighbouring sentences chosen as its context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextualizedSentence {
    pub sentence: SentenceRef,
    /// Context sentence indices in document order, target excluded.
    pub context: Vec<usize>,
    pub context_tokens: usize,
    pub budget: usize,
}

impl ContextualizedSentence {
    pub fn context_text(&self, doc: &EvidenceDocument) -> String {
        self.context
            .iter()
            .map(|&i| doc.sentences[i].text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// `context <SEP> sentence`, used as the premise when scoring.
    pub fn premise(&self, doc: &EvidenceDocument) -> String {
        let target = &doc.sentences[self.sentence.index].text;
        if self.context.is_empty() {
            format!("{SEP} {target}")
        } else {
            format!("{} {SEP} {target}", self.context_text(doc))
        }
    }

    /// `claim <SEP> context <SEP> sentence`.
    pub fn input(&self, claim: &str, doc: &EvidenceDocument) -> String {
        format!("{claim} {SEP} {}", self.premise(doc))
    }
}

/// Picks context sentences around `index`, alternating preceding and
/// following neighbours (preceding first). Sentences are taken whole and the
/// walk stops at the first one that would push the context past `budget`.
pub fn contextualize(
    doc: &EvidenceDocument,
    index: usize,
    budget: usize,
) -> Result<ContextualizedSentence, RetrievalError> {
    if index >= doc.sentences.len() {
        return Err(RetrievalError::UnknownSentence(doc.sentence_ref(index)));
    }
    let mut before = (0..index).rev();
    let mut after = index + 1..doc.sentences.len();
    let mut context = Vec::new();
    let mut used = 0;
    let mut take_before = true;
    loop {
        let next = if take_before {
            before.next().or_else(|| after.next())
        } else {
            after.next().or_else(|| before.next())
        };
        let Some(i) = next else { break };
        let cost = doc.sentences[i].token_count;
        if used + cost > budget {
            break;
        }
        used += cost;
        context.push(i);
        take_before = !take_before;
    }
    context.sort_unstable();
    Ok(ContextualizedSentence {
        sentence: doc.sentence_ref(index),
        context,
        context_tokens: used,
        budget,
    })
}
