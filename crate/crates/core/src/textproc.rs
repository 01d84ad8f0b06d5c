//! Deterministic text processing: tokenization, sentence segmentation,
//! evidence chunking and bigram overlap.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::corpus::EvidenceDocument;

/// Default maximum chunk size in tokens.
pub const DEFAULT_CHUNK_TOKENS: usize = 256;

const BUILTIN_ABBREVIATIONS: &str = include_str!("../resources/abbreviations.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenizerRule {
    /// Lowercase, split on whitespace, strip non-alphanumeric characters from
    /// both ends of each piece, drop pieces that become empty.
    WhitespaceLowerStrip,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerConfig {
    pub rule: TokenizerRule,
    pub version: String,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            rule: TokenizerRule::WhitespaceLowerStrip,
            version: "1".to_string(),
        }
    }
}

impl TokenizerConfig {
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        match self.rule {
            TokenizerRule::WhitespaceLowerStrip => text
                .split_whitespace()
                .filter_map(|piece| {
                    let stripped = piece.trim_matches(|c: char| !c.is_alphanumeric());
                    (!stripped.is_empty()).then(|| stripped.to_lowercase())
                })
                .collect(),
        }
    }
}

/// Tokenizes with the default rule.
pub fn tokenize(text: &str) -> Vec<String> {
    TokenizerConfig::default().tokenize(text)
}

pub fn token_count(text: &str) -> usize {
    tokenize(text).len()
}

/// Rule-based sentence splitter.
///
/// A boundary is placed after `.`, `!` or `?` (plus any closing quotes or
/// brackets) when it is followed by whitespace and then an uppercase letter or
/// a digit, optionally behind an opening quote or bracket. A period that ends
/// a listed abbreviation never closes a sentence.
#[derive(Debug, Clone)]
pub struct SentenceSplitter {
    abbreviations: HashSet<String>,
}

impl Default for SentenceSplitter {
    fn default() -> Self {
        Self::from_list(BUILTIN_ABBREVIATIONS)
    }
}

impl SentenceSplitter {
    /// Builds a splitter from a plain-text list, one abbreviation per line,
    /// without the trailing period. Blank lines and `#` comments are ignored.
    pub fn from_list(list: &str) -> Self {
        let abbreviations = list
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.trim_end_matches('.').to_lowercase())
            .collect();
        Self { abbreviations }
    }

    pub fn is_abbreviation(&self, word: &str) -> bool {
        self.abbreviations.contains(&word.to_lowercase())
    }

    pub fn split(&self, text: &str) -> Vec<String> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut sentences = Vec::new();
        let mut start = 0usize;
        let mut i = 0usize;
        while i < chars.len() {
            let (_, c) = chars[i];
            if !matches!(c, '.' | '!' | '?') {
                i += 1;
                continue;
            }
            let terminator = i;
            let mut end = i + 1;
            while end < chars.len() && matches!(chars[end].1, '.' | '!' | '?') {
                end += 1;
            }
            while end < chars.len() && is_closing(chars[end].1) {
                end += 1;
            }
            let boundary = end < chars.len()
                && chars[end].1.is_whitespace()
                && self.opens_sentence(&chars, end)
                && !(c == '.' && self.guarded(text, &chars, start, terminator));
            if boundary {
                let byte_end = chars[end].0;
                push_trimmed(&mut sentences, &text[start..byte_end]);
                start = byte_end;
            }
            i = end;
        }
        push_trimmed(&mut sentences, &text[start..]);
        sentences
    }

    fn opens_sentence(&self, chars: &[(usize, char)], mut pos: usize) -> bool {
        while pos < chars.len() && chars[pos].1.is_whitespace() {
            pos += 1;
        }
        while pos < chars.len() && is_opening(chars[pos].1) {
            pos += 1;
        }
        pos < chars.len() && (chars[pos].1.is_uppercase() || chars[pos].1.is_ascii_digit())
    }

    /// True when the word ending at `chars[terminator]` is an abbreviation.
    fn guarded(&self, text: &str, chars: &[(usize, char)], start: usize, terminator: usize) -> bool {
        let end_byte = chars[terminator].0;
        let head = &text[start..end_byte];
        let word = head
            .rsplit(char::is_whitespace)
            .next()
            .unwrap_or("")
            .trim_start_matches(|c: char| !c.is_alphanumeric());
        !word.is_empty() && self.is_abbreviation(word)
    }
}

fn is_closing(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}')
}

fn is_opening(c: char) -> bool {
    matches!(c, '"' | '\'' | '(' | '[' | '\u{201c}' | '\u{2018}')
}

fn push_trimmed(out: &mut Vec<String>, piece: &str) {
    let piece = piece.trim();
    if !piece.is_empty() {
        out.push(piece.to_string());
    }
}

/// Splits `text` into sentences with the built-in abbreviation list.
pub fn segment_sentences(text: &str) -> Vec<String> {
    SentenceSplitter::default().split(text)
}

/// A contiguous run of sentences from one evidence document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub doc_id: String,
    pub sentence_indices: Vec<usize>,
    pub token_count: usize,
}

impl Chunk {
    /// Sentence texts joined by single spaces.
    pub fn text(&self, doc: &EvidenceDocument) -> String {
        self.sentence_indices
            .iter()
            .map(|&i| doc.sentences[i].text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Greedy left-to-right packing of whole sentences into chunks of at most
/// `max_tokens` tokens. A sentence longer than the budget becomes a chunk of
/// its own and is never split.
pub fn chunk(doc: &EvidenceDocument, max_tokens: usize) -> Vec<Chunk> {
    let max_tokens = max_tokens.max(1);
    let mut chunks = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut current_tokens = 0usize;
    for sentence in &doc.sentences {
        if !current.is_empty() && current_tokens + sentence.token_count > max_tokens {
            chunks.push(Chunk {
                doc_id: doc.id.clone(),
                sentence_indices: std::mem::take(&mut current),
                token_count: current_tokens,
            });
            current_tokens = 0;
        }
        current.push(sentence.index);
        current_tokens += sentence.token_count;
    }
    if !current.is_empty() {
        chunks.push(Chunk {
            doc_id: doc.id.clone(),
            sentence_indices: current,
            token_count: current_tokens,
        });
    }
    chunks
}

pub fn bigrams(tokens: &[String]) -> HashSet<(&str, &str)> {
    tokens
        .windows(2)
        .map(|w| (w[0].as_str(), w[1].as_str()))
        .collect()
}

/// Fraction of distinct claim bigrams that also occur in the evidence.
/// Claims with fewer than two tokens score 0.
pub fn bigram_recall(claim_text: &str, evidence_text: &str) -> f64 {
    let claim = tokenize(claim_text);
    let evidence = tokenize(evidence_text);
    bigram_recall_tokens(&claim, &evidence)
}

pub fn bigram_recall_tokens(claim: &[String], evidence: &[String]) -> f64 {
    let claim_bigrams = bigrams(claim);
    if claim_bigrams.is_empty() {
        return 0.0;
    }
    let evidence_bigrams = bigrams(evidence);
    let hits = claim_bigrams
        .iter()
        .filter(|b| evidence_bigrams.contains(*b))
        .count();
    hits as f64 / claim_bigrams.len() as f64
}

/// Fraction of distinct claim tokens that also occur in the evidence.
/// Claims without tokens score 0.
pub fn unigram_recall_tokens(claim: &[String], evidence: &[String]) -> f64 {
    let claim_set: HashSet<&str> = claim.iter().map(String::as_str).collect();
    if claim_set.is_empty() {
        return 0.0;
    }
    let evidence_set: HashSet<&str> = evidence.iter().map(String::as_str).collect();
    let hits = claim_set.iter().filter(|t| evidence_set.contains(*t)).count();
    hits as f64 / claim_set.len() as f64
}
