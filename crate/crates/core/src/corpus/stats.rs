use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::types::{EntailmentLabel, GoldAnnotation};
use super::Corpus;
use crate::textproc;

/// Rounds to one decimal place, half away from zero.
pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelDistribution {
    pub supported: usize,
    pub partially_supported: usize,
    pub not_supported: usize,
}

impl LabelDistribution {
    pub fn add(&mut self, label: EntailmentLabel) {
        match label {
            EntailmentLabel::Supported => self.supported += 1,
            EntailmentLabel::PartiallySupported => self.partially_supported += 1,
            EntailmentLabel::NotSupported => self.not_supported += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.supported + self.partially_supported + self.not_supported
    }

    /// Percentages in Supported / PartiallySupported / NotSupported order,
    /// rounded to one decimal. All zero when empty.
    pub fn percentages(&self) -> [f64; 3] {
        let total = self.total();
        if total == 0 {
            return [0.0; 3];
        }
        [self.supported, self.partially_supported, self.not_supported]
            .map(|c| round1(100.0 * c as f64 / total as f64))
    }
}

/// Dataset statistics. Means over an empty population are reported as 0.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub n_claims: usize,
    pub n_subclaims: usize,
    pub mean_claim_tokens: f64,
    pub mean_subclaim_tokens: f64,
    pub mean_subclaims_per_claim: f64,
    /// Mean number of distinct gold sentences per supported or partially
    /// supported claim.
    pub mean_claim_support_sentences: f64,
    pub mean_subclaim_support_sentences: f64,
    pub mean_evidence_sentences: f64,
    pub mean_tokens_per_evidence_sentence: f64,
    pub mean_context_tokens: f64,
    pub claim_labels: LabelDistribution,
    pub subclaim_labels: LabelDistribution,
    /// Number of distinct gold sentences -> number of subclaims.
    pub subclaim_support_histogram: BTreeMap<usize, usize>,
    pub claim_support_histogram: BTreeMap<usize, usize>,
}

#[derive(Default)]
struct Mean {
    sum: f64,
    n: usize,
}

impl Mean {
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.n += 1;
    }

    fn value(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }
}

fn support_size(gold: &GoldAnnotation) -> Option<usize> {
    (gold.label != EntailmentLabel::NotSupported).then(|| gold.support_union().len())
}

pub fn dataset_stats(corpus: &Corpus) -> StatsReport {
    let mut report = StatsReport::default();
    let mut claim_tokens = Mean::default();
    let mut sub_tokens = Mean::default();
    let mut claim_support = Mean::default();
    let mut sub_support = Mean::default();
    let mut evidence_sentences = Mean::default();
    let mut sentence_tokens = Mean::default();
    let mut context_tokens = Mean::default();

    for claim in &corpus.claims {
        report.n_claims += 1;
        claim_tokens.push(textproc::token_count(&claim.text) as f64);
        context_tokens.push(textproc::token_count(&claim.context) as f64);
        if let Some(gold) = &claim.gold {
            report.claim_labels.add(gold.label);
            if let Some(n) = support_size(gold) {
                claim_support.push(n as f64);
                *report.claim_support_histogram.entry(n).or_default() += 1;
            }
        }
        if let Ok(evidence) = corpus.evidence(claim) {
            evidence_sentences.push(evidence.len() as f64);
            for (_, s) in evidence.sentences() {
                sentence_tokens.push(s.token_count as f64);
            }
        }
        for sub in &claim.subclaims {
            report.n_subclaims += 1;
            sub_tokens.push(sub.tokens.len() as f64);
            if let Some(gold) = &sub.gold {
                report.subclaim_labels.add(gold.label);
                if let Some(n) = support_size(gold) {
                    sub_support.push(n as f64);
                    *report.subclaim_support_histogram.entry(n).or_default() += 1;
                }
            }
        }
    }

    report.mean_claim_tokens = claim_tokens.value();
    report.mean_subclaim_tokens = sub_tokens.value();
    report.mean_subclaims_per_claim = if report.n_claims == 0 {
        0.0
    } else {
        report.n_subclaims as f64 / report.n_claims as f64
    };
    report.mean_claim_support_sentences = claim_support.value();
    report.mean_subclaim_support_sentences = sub_support.value();
    report.mean_evidence_sentences = evidence_sentences.value();
    report.mean_tokens_per_evidence_sentence = sentence_tokens.value();
    report.mean_context_tokens = context_tokens.value();
    report
}

impl StatsReport {
    /// Plain-text table with one decimal for means and percentages.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let row = |out: &mut String, name: &str, sub: String, claim: String| {
            let _ = writeln!(out, "{name:<36} {sub:>10} {claim:>10}");
        };
        row(&mut out, "statistic", "subclaim".into(), "claim".into());
        row(&mut out, "datapoints", self.n_subclaims.to_string(), self.n_claims.to_string());
        row(
            &mut out,
            "tokens",
            format!("{:.1}", self.mean_subclaim_tokens),
            format!("{:.1}", self.mean_claim_tokens),
        );
        row(
            &mut out,
            "supporting sentences",
            format!("{:.1}", self.mean_subclaim_support_sentences),
            format!("{:.1}", self.mean_claim_support_sentences),
        );
        row(&mut out, "subclaims / claim", "-".into(), format!("{:.1}", self.mean_subclaims_per_claim));
        let _ = writeln!(out, "{:<36} {:>21.1}", "evidence sentences / datapoint", self.mean_evidence_sentences);
        let _ = writeln!(
            out,
            "{:<36} {:>21.1}",
            "tokens / evidence sentence", self.mean_tokens_per_evidence_sentence
        );
        let _ = writeln!(out, "{:<36} {:>21.1}", "tokens / claim context", self.mean_context_tokens);
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<36} {:>10} {:>10} {:>10}", "label distribution (%)", "supported", "partial", "not");
        for (name, dist) in [("claim", &self.claim_labels), ("subclaim", &self.subclaim_labels)] {
            let [s, p, n] = dist.percentages();
            let _ = writeln!(out, "{name:<36} {s:>10.1} {p:>10.1} {n:>10.1}");
        }
        out
    }
}
