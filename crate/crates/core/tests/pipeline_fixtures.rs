//! Small end-to-end fixtures for the library pipeline, checked against
//! values recomputed in the test rather than taken from the library.

use std::collections::HashSet;
use std::sync::Arc;

use claimcheck::corpus::{Corpus, EvidenceSet, GoldAnnotation, SentenceRef, SupportSet};
use claimcheck::decompose::{decompose, prompt_digest, render_prompt, CompletionRecord, PromptTemplate, ReplayClient};
use claimcheck::entail::{classify_with_claimsplit, Aggregation};
use claimcheck::evalkit::paired_bootstrap;
use claimcheck::oracle::{build_oracle_chunks, build_oracle_dataset, score_oracle, OracleLevel, ORACLE_CHUNKS};
use claimcheck::scorer::{LexicalBackend, Scorer};
use claimcheck::{Claim, EntailmentLabel, EvidenceDocument};
use proptest::prelude::*;

fn words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

/// Share of the hypothesis's distinct bigrams that occur in the premise.
fn bigram_recall(hypothesis: &str, premise: &str) -> f64 {
    let (h, p) = (words(hypothesis), words(premise));
    let hb: HashSet<(&str, &str)> = h.windows(2).map(|w| (w[0].as_str(), w[1].as_str())).collect();
    let pb: HashSet<(&str, &str)> = p.windows(2).map(|w| (w[0].as_str(), w[1].as_str())).collect();
    hb.iter().filter(|b| pb.contains(b)).count() as f64 / hb.len() as f64
}

fn lexical() -> Scorer {
    Scorer::sequential(Arc::new(LexicalBackend::default()))
}

#[test]
fn claimsplit_composes_three_subclaims() {
    let partitions = vec!["the bridge opened in 1932".to_string(), "the town is red and old".to_string()];
    let subclaims = ["the bridge opened", "bridge in 1932", "the town is red"];
    // Per-subclaim maxima by hand: 1, 1/2 and 1.
    let cases = [
        (Aggregation::Harmonic, 3.0 / (1.0 + 2.0 + 1.0)),
        (Aggregation::Min, 0.5),
        (Aggregation::Mean, 2.5 / 3.0),
    ];
    for (aggregation, expected) in cases {
        let v = classify_with_claimsplit("c", &subclaims, &partitions, &lexical(), 0.7, aggregation).unwrap();
        assert_eq!(v.subclaim_scores, vec![1.0, 0.5, 1.0]);
        assert!((v.score - expected).abs() < 1e-12);
        assert_eq!(v.predicted, expected > 0.7);
    }
    let v = classify_with_claimsplit("c", &["the bridge opened", "a museum"], &partitions, &lexical(), 0.5, Aggregation::Harmonic).unwrap();
    assert_eq!(v.score, 0.0);
}

fn ten_claim_corpus() -> Corpus {
    let docs: Vec<EvidenceDocument> = (0..5)
        .map(|d| {
            EvidenceDocument::from_sentences(
                format!("d{d}"),
                (0..6).map(|s| format!("Sentence {s} of document {d} mentions topic {} here.", (d * 6 + s) % 7)),
            )
        })
        .collect();
    let claims = (0..10)
        .map(|i| {
            let mut c = Claim::new(format!("c{i}"), format!("document {} mentions topic {}", i % 5, i % 7));
            c.evidence_ids = vec![format!("d{}", i % 5), format!("d{}", (i + 1) % 5)];
            if i % 3 != 0 {
                let set = |s: usize| SupportSet::from([SentenceRef::new(format!("d{}", i % 5), s)]);
                c.gold = Some(GoldAnnotation {
                    label: EntailmentLabel::Supported,
                    support_sets: (0..i % 4 + 1).map(set).collect(),
                    unsupported_token_indices: Default::default(),
                });
            }
            c
        })
        .collect();
    Corpus::new(claims, docs).unwrap()
}

#[test]
fn oracle_scores_are_max_over_its_chunks() {
    let corpus = ten_claim_corpus();
    let ids: Vec<String> = corpus.claims.iter().map(|c| c.id.clone()).collect();
    let chunks = build_oracle_dataset(&corpus, &ids, OracleLevel::Claim, 11, 40).unwrap();
    assert_eq!(chunks.len(), 10 * ORACLE_CHUNKS);
    let verdicts = score_oracle(&corpus, &chunks, &lexical(), 0.5).unwrap();
    assert_eq!(verdicts.len(), 10);
    for (claim, verdict) in corpus.claims.iter().zip(&verdicts) {
        assert_eq!(verdict.claim_id, claim.id);
        let evidence = corpus.evidence(claim).unwrap();
        let expected = chunks
            .iter()
            .filter(|c| c.claim_id == claim.id)
            .map(|c| {
                let text: Vec<&str> = c.refs.iter().map(|r| evidence.text(r).unwrap()).collect();
                bigram_recall(&claim.text, &text.join(" "))
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((verdict.score - expected).abs() < 1e-12, "{}", claim.id);
        assert_eq!(verdict.predicted, expected > 0.5);
    }
}

/// Accuracy difference bootstrap written from scratch with its own generator.
fn reference_bootstrap(a: &[bool], b: &[bool], n_resamples: usize, mut state: u64) -> f64 {
    let mut next = || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    };
    let n = a.len();
    let mut not_better = 0;
    for _ in 0..n_resamples {
        let (mut sa, mut sb) = (0usize, 0usize);
        for _ in 0..n {
            let j = (next() % n as u64) as usize;
            sa += usize::from(a[j]);
            sb += usize::from(b[j]);
        }
        not_better += usize::from(sa <= sb);
    }
    not_better as f64 / n_resamples as f64
}

#[test]
fn bootstrap_agrees_with_independent_reimplementation() {
    // Per-item correctness; A is right on 40 of 50 items, B on 34.
    let a: Vec<bool> = (0..50).map(|i| i % 4 != 0 || i % 8 == 0 && i < 24).collect();
    let b: Vec<bool> = (0..50).map(|i| i % 3 != 0 || i == 3).collect();
    let gold = vec![true; 50];
    let accuracy = |sys: &[bool], g: &[bool]| sys.iter().zip(g).filter(|(s, g)| s == g).count() as f64 / g.len() as f64;
    let ours = paired_bootstrap(accuracy, &a, &b, &gold, 10_000, 3).unwrap();
    let theirs = reference_bootstrap(&a, &b, 10_000, 99);
    assert!((ours.p_value - theirs).abs() <= 0.02, "{} vs {theirs}", ours.p_value);
}

#[test]
fn replayed_decomposition() {
    let template = PromptTemplate::wice();
    let good = "The tower is 300 m tall and opened in 1889.";
    let bad = "The tower exists.";
    let client = ReplayClient::new([
        CompletionRecord {
            prompt_digest: prompt_digest(&render_prompt(&template, good).unwrap()),
            completion: "\n- The tower is 300 m tall.\n- The tower opened in 1889.\n\nSentence: next".into(),
        },
        CompletionRecord {
            prompt_digest: prompt_digest(&render_prompt(&template, bad).unwrap()),
            completion: "- The tower exists.".into(),
        },
    ]);
    let d = decompose("c1", good, &client, &template).unwrap();
    assert_eq!(d.subclaims, vec!["The tower is 300 m tall.", "The tower opened in 1889."]);
    assert!(d.accepted);
    let d = decompose("c2", bad, &client, &template).unwrap();
    assert!(!d.accepted);
    assert!(decompose("c3", "Something unrecorded.", &client, &template).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_chunks_respect_budget_and_contain_gold(
        lengths in prop::collection::vec(1usize..40, 3..25),
        n_sets in 0usize..5,
        seed in any::<u64>(),
        budget in 20usize..120,
    ) {
        let doc = EvidenceDocument::from_sentences("d", lengths.iter().map(|&n| vec!["w"; n].join(" ")));
        let evidence = EvidenceSet::single(&doc);
        let n = lengths.len();
        let sets: Vec<SupportSet> = (0..n_sets)
            .map(|k| [k % n, (k * 7 + 2) % n].into_iter().map(|s| SentenceRef::new("d", s)).collect())
            .collect();
        let gold = GoldAnnotation { label: EntailmentLabel::Supported, support_sets: sets.clone(), unsupported_token_indices: Default::default() };
        let chunks = build_oracle_chunks("x", Some(&gold), &evidence, seed, budget).unwrap();
        prop_assert_eq!(chunks.len(), ORACLE_CHUNKS);
        prop_assert_eq!(&chunks, &build_oracle_chunks("x", Some(&gold), &evidence, seed, budget).unwrap());
        for c in &chunks {
            let tokens: usize = c.refs.iter().map(|r| lengths[r.index]).sum();
            prop_assert_eq!(tokens, c.token_count);
            prop_assert!(tokens <= budget || c.refs.len() == 1);
            prop_assert!(c.refs.windows(2).all(|w| w[0].index < w[1].index));
            if let Some(k) = c.gold_set {
                // The first gold sentence in document order always survives trimming.
                let first = sets[k].iter().map(|r| r.index).min().unwrap();
                prop_assert!(c.refs.iter().any(|r| r.index == first));
            }
        }
    }
}
