//! Shared helpers: a seeded synthetic corpus and a binary runner.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use claimcheck::corpus::{project_claim_gold, SupportSet};
use claimcheck::rng::{below, rng_from_seed, SeededRng};
use claimcheck::{Claim, Corpus, EntailmentLabel, EvidenceDocument, GoldAnnotation, SentenceRef, Subclaim};

const WORDS: &[&str] = &[
    "river", "bridge", "council", "museum", "harbor", "railway", "tower", "festival", "school", "market",
    "church", "mayor", "station", "garden", "library", "castle", "factory", "stadium", "island", "valley",
    "opened", "built", "closed", "moved", "expanded", "renamed", "restored", "founded", "hosted", "served",
];

fn sentence(rng: &mut SeededRng) -> String {
    let n = 6 + below(rng, 9);
    let mut words: Vec<&str> = (0..n).map(|_| WORDS[below(rng, WORDS.len())]).collect();
    words.push(["1890", "1921", "1954", "1987", "2003"][below(rng, 5)]);
    let mut s = words.join(" ");
    s[..1].make_ascii_uppercase();
    s.push('.');
    s
}

/// `n_claims` claims over their own evidence documents, each with two or
/// three subclaims that are copied (supported), half copied (partially
/// supported) or invented (not supported).
pub fn synthetic_corpus(n_claims: usize, seed: u64) -> Corpus {
    let mut rng = rng_from_seed(seed);
    let mut docs = Vec::new();
    let mut claims = Vec::new();
    for c in 0..n_claims {
        let doc_id = format!("doc{c}");
        let doc = EvidenceDocument::from_sentences(&doc_id, (0..8 + below(&mut rng, 10)).map(|_| sentence(&mut rng)));
        let mut claim = Claim::new(format!("claim{c}"), "");
        claim.evidence_ids = vec![doc_id.clone()];
        let mut texts = Vec::new();
        for s in 0..2 + below(&mut rng, 2) {
            let source = below(&mut rng, doc.sentences.len());
            let source_text = doc.sentences[source].text.trim_end_matches('.').to_string();
            let kind = below(&mut rng, 3);
            let (text, gold) = match kind {
                0 => (
                    source_text.clone(),
                    GoldAnnotation {
                        label: EntailmentLabel::Supported,
                        support_sets: vec![SupportSet::from([SentenceRef::new(&doc_id, source)])],
                        unsupported_token_indices: BTreeSet::new(),
                    },
                ),
                1 => {
                    let kept: Vec<&str> = source_text.split_whitespace().take(4).collect();
                    let text = format!("{} with a lighthouse keeper", kept.join(" "));
                    let n = text.split_whitespace().count();
                    (
                        text,
                        GoldAnnotation {
                            label: EntailmentLabel::PartiallySupported,
                            support_sets: vec![SupportSet::from([SentenceRef::new(&doc_id, source)])],
                            unsupported_token_indices: (n - 4..n).collect(),
                        },
                    )
                }
                _ => ("A zeppelin crossed the desert at dawn".to_string(), GoldAnnotation::not_supported()),
            };
            let mut sub = Subclaim::new(format!("claim{c}-s{s}"), format!("{text}."));
            sub.gold = Some(gold);
            texts.push(text);
            claim.subclaims.push(sub);
        }
        claim.text = format!("{}.", texts.join(" and "));
        let golds: Vec<&GoldAnnotation> = claim.subclaims.iter().filter_map(|s| s.gold.as_ref()).collect();
        claim.gold = Some(project_claim_gold(&golds).unwrap());
        claims.push(claim);
        docs.push(doc);
    }
    Corpus::new(claims, docs).unwrap()
}

pub fn write_corpus(corpus: &Corpus, dir: &Path) {
    corpus.save(dir.join("claims.jsonl"), dir.join("evidence.jsonl")).unwrap();
}

/// Runs the binary in `dir`.
pub fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_claimcheck"))
        .current_dir(dir)
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("spawn claimcheck")
}

pub fn run_ok(dir: &Path, args: &[&str]) -> Output {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "claimcheck {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}
