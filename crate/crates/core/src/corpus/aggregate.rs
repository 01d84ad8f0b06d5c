//! Aggregation of worker judgments into gold annotations, and projection of
//! subclaim annotations onto claims and evidence partitions.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::types::{Claim, EntailmentLabel, GoldAnnotation, SupportSet, WorkerAnnotation};
use super::{CorpusError, RawAnnotationRecord};

/// A worker whose unsupported-token set misses more than this many tokens of
/// the union invalidates the token annotation.
pub const TOKEN_DISAGREEMENT_LIMIT: usize = 3;

/// Claim label from its subclaim labels: uniform Supported or NotSupported
/// carries over, anything else is PartiallySupported.
pub fn project_claim_label(subclaim_labels: &[EntailmentLabel]) -> Result<EntailmentLabel, CorpusError> {
    let first = *subclaim_labels
        .first()
        .ok_or_else(|| CorpusError::Precondition("no subclaim labels to project".into()))?;
    let uniform = subclaim_labels.iter().all(|&l| l == first);
    Ok(match first {
        EntailmentLabel::Supported | EntailmentLabel::NotSupported if uniform => first,
        _ => EntailmentLabel::PartiallySupported,
    })
}

/// Claim support sets: one set chosen per subclaim, unioned, over every
/// combination. Subclaims without sets do not constrain the product. Empty
/// unions are discarded and the result is sorted and deduplicated.
pub fn project_claim_support(per_subclaim_sets: &[Vec<SupportSet>]) -> Vec<SupportSet> {
    let mut combos: BTreeSet<SupportSet> = BTreeSet::from([SupportSet::new()]);
    for sets in per_subclaim_sets.iter().filter(|s| !s.is_empty()) {
        combos = combos
            .iter()
            .flat_map(|acc| sets.iter().map(move |s| acc.union(s).cloned().collect()))
            .collect();
    }
    combos.into_iter().filter(|s| !s.is_empty()).collect()
}

/// Claim-level gold from subclaim gold annotations.
pub fn project_claim_gold(subclaims: &[&GoldAnnotation]) -> Result<GoldAnnotation, CorpusError> {
    let labels: Vec<EntailmentLabel> = subclaims.iter().map(|g| g.label).collect();
    let label = project_claim_label(&labels)?;
    let support_sets = if label == EntailmentLabel::NotSupported {
        Vec::new()
    } else {
        let per: Vec<Vec<SupportSet>> = subclaims.iter().map(|g| g.support_sets.clone()).collect();
        project_claim_support(&per)
    };
    Ok(GoldAnnotation {
        label,
        support_sets,
        unsupported_token_indices: BTreeSet::new(),
    })
}

/// Majority vote over worker labels.
///
/// Returns `None` when the item should be dropped. With five workers, a
/// 2 PartiallySupported / 2 NotSupported split resolves to PartiallySupported.
pub fn aggregate_worker_labels(
    workers: &[WorkerAnnotation],
    n_expected: usize,
) -> Result<Option<EntailmentLabel>, CorpusError> {
    if !matches!(n_expected, 3 | 5) {
        return Err(CorpusError::Precondition(format!(
            "expected worker count must be 3 or 5, got {n_expected}"
        )));
    }
    if workers.len() != n_expected {
        return Err(CorpusError::Precondition(format!(
            "expected {n_expected} worker annotations, got {}",
            workers.len()
        )));
    }
    let mut counts: HashMap<EntailmentLabel, usize> = HashMap::new();
    for w in workers {
        *counts.entry(w.label).or_default() += 1;
    }
    if let Some((&label, _)) = counts.iter().find(|(_, &c)| 2 * c > n_expected) {
        return Ok(Some(label));
    }
    let count = |l| counts.get(&l).copied().unwrap_or(0);
    if n_expected == 5
        && count(EntailmentLabel::PartiallySupported) == 2
        && count(EntailmentLabel::NotSupported) == 2
    {
        return Ok(Some(EntailmentLabel::PartiallySupported));
    }
    Ok(None)
}

/// Builds the gold annotation for a subclaim once its label is decided.
///
/// Support sets are the distinct sets of workers who chose `final_label`.
/// Unsupported tokens are the union over PartiallySupported voters; when the
/// final label is PartiallySupported and some voter misses more than
/// [`TOKEN_DISAGREEMENT_LIMIT`] tokens of that union, `None` is returned.
pub fn aggregate_gold(workers: &[WorkerAnnotation], final_label: EntailmentLabel) -> Option<GoldAnnotation> {
    let support_sets = if final_label == EntailmentLabel::NotSupported {
        Vec::new()
    } else {
        workers
            .iter()
            .filter(|w| w.label == final_label && !w.support_set.is_empty())
            .map(|w| w.support_set.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    };

    let mut unsupported = BTreeSet::new();
    if final_label == EntailmentLabel::PartiallySupported {
        let partial: Vec<&WorkerAnnotation> = workers
            .iter()
            .filter(|w| w.label == EntailmentLabel::PartiallySupported)
            .collect();
        unsupported = partial
            .iter()
            .flat_map(|w| w.unsupported_token_indices.iter().copied())
            .collect();
        let worst = partial
            .iter()
            .map(|w| unsupported.difference(&w.unsupported_token_indices).count())
            .max()
            .unwrap_or(0);
        if worst > TOKEN_DISAGREEMENT_LIMIT {
            return None;
        }
    }

    Some(GoldAnnotation {
        label: final_label,
        support_sets,
        unsupported_token_indices: unsupported,
    })
}

/// A worker who marks every token of the subclaim unsupported is recorded as
/// NotSupported.
pub fn normalize_worker(mut worker: WorkerAnnotation, n_tokens: usize) -> WorkerAnnotation {
    let all_marked = n_tokens > 0
        && worker.unsupported_token_indices.len() >= n_tokens
        && (0..n_tokens).all(|i| worker.unsupported_token_indices.contains(&i));
    if worker.label == EntailmentLabel::PartiallySupported && all_marked {
        worker.label = EntailmentLabel::NotSupported;
        worker.support_set.clear();
        worker.unsupported_token_indices.clear();
    }
    worker
}

/// Gold label of an evidence partition for a gold-annotated item.
///
/// No gold sentence in the partition gives NotSupported; a Supported item
/// whose partition covers some complete gold set gives Supported; anything
/// else is PartiallySupported.
pub fn derive_partition_labels(partition: &SupportSet, gold: &GoldAnnotation) -> EntailmentLabel {
    let touches_gold = gold
        .support_sets
        .iter()
        .flatten()
        .any(|r| partition.contains(r));
    if !touches_gold {
        return EntailmentLabel::NotSupported;
    }
    let covers_a_set = gold.support_sets.iter().any(|s| s.is_subset(partition));
    if covers_a_set && gold.label == EntailmentLabel::Supported {
        EntailmentLabel::Supported
    } else {
        EntailmentLabel::PartiallySupported
    }
}

/// Result of attaching aggregated worker annotations to claims.
#[derive(Debug, Clone, Default)]
pub struct AnnotationOutcome {
    /// Claims whose subclaims all received a label, with subclaim and claim gold.
    pub claims: Vec<Claim>,
    /// Claims removed, with the reason.
    pub dropped: Vec<(String, String)>,
    /// Subclaims kept for classification and retrieval whose unsupported-token
    /// annotation was discarded for worker disagreement.
    pub token_excluded: Vec<String>,
}

/// Aggregates raw worker annotations onto `claims`.
///
/// A claim is dropped when any of its subclaims lacks annotations or has no
/// resolvable majority label.
pub fn annotate_corpus(
    claims: &[Claim],
    records: &[RawAnnotationRecord],
    n_expected: usize,
) -> Result<AnnotationOutcome, CorpusError> {
    let mut by_subclaim: BTreeMap<(&str, &str), &RawAnnotationRecord> = BTreeMap::new();
    for r in records {
        if by_subclaim.insert((&r.claim_id, &r.subclaim_id), r).is_some() {
            return Err(CorpusError::Invalid(format!(
                "duplicate annotations for {}/{}",
                r.claim_id, r.subclaim_id
            )));
        }
    }

    let mut outcome = AnnotationOutcome::default();
    'claims: for claim in claims {
        let mut annotated = claim.clone();
        let mut excluded = Vec::new();
        for sub in &mut annotated.subclaims {
            let Some(record) = by_subclaim.get(&(claim.id.as_str(), sub.id.as_str())) else {
                outcome
                    .dropped
                    .push((claim.id.clone(), format!("subclaim {} has no annotations", sub.id)));
                continue 'claims;
            };
            let workers: Vec<WorkerAnnotation> = record
                .workers
                .iter()
                .cloned()
                .map(|w| normalize_worker(w, sub.tokens.len()))
                .collect();
            for w in &workers {
                w.validate()?;
            }
            let Some(label) = aggregate_worker_labels(&workers, n_expected)? else {
                outcome
                    .dropped
                    .push((claim.id.clone(), format!("subclaim {} has no majority label", sub.id)));
                continue 'claims;
            };
            let gold = match aggregate_gold(&workers, label) {
                Some(g) => g,
                None => {
                    excluded.push(sub.id.clone());
                    let mut g = aggregate_gold(&without_tokens(&workers), label)
                        .expect("token-free aggregation always succeeds");
                    g.unsupported_token_indices.clear();
                    g
                }
            };
            sub.gold = Some(gold);
        }
        let golds: Vec<&GoldAnnotation> = annotated.subclaims.iter().filter_map(|s| s.gold.as_ref()).collect();
        if golds.is_empty() {
            outcome.dropped.push((claim.id.clone(), "claim has no subclaims".into()));
            continue;
        }
        annotated.gold = Some(project_claim_gold(&golds)?);
        outcome.token_excluded.extend(excluded);
        outcome.claims.push(annotated);
    }
    Ok(outcome)
}

fn without_tokens(workers: &[WorkerAnnotation]) -> Vec<WorkerAnnotation> {
    workers
        .iter()
        .cloned()
        .map(|mut w| {
            w.unsupported_token_indices.clear();
            w
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SentenceRef;
    use proptest::prelude::*;
    use EntailmentLabel::*;

    fn refs(ix: &[usize]) -> SupportSet {
        ix.iter().map(|&i| SentenceRef::new("d", i)).collect()
    }

    fn worker(label: EntailmentLabel, support: &[usize], tokens: &[usize]) -> WorkerAnnotation {
        WorkerAnnotation {
            worker_id: format!("w{}", support.len()),
            label,
            support_set: refs(support),
            unsupported_token_indices: tokens.iter().copied().collect(),
        }
    }

    fn votes(labels: &[EntailmentLabel]) -> Vec<WorkerAnnotation> {
        labels
            .iter()
            .map(|&l| match l {
                NotSupported => worker(l, &[], &[]),
                _ => worker(l, &[1], &[]),
            })
            .collect()
    }

    #[test]
    fn claim_label_projection() {
        assert_eq!(project_claim_label(&[Supported, Supported, Supported]).unwrap(), Supported);
        assert_eq!(project_claim_label(&[NotSupported, NotSupported]).unwrap(), NotSupported);
        assert_eq!(project_claim_label(&[Supported, NotSupported]).unwrap(), PartiallySupported);
        assert_eq!(project_claim_label(&[PartiallySupported]).unwrap(), PartiallySupported);
        assert!(matches!(project_claim_label(&[]), Err(CorpusError::Precondition(_))));
    }

    #[test]
    fn claim_support_projection() {
        assert_eq!(
            project_claim_support(&[vec![refs(&[1]), refs(&[2])], vec![refs(&[3])]]),
            vec![refs(&[1, 3]), refs(&[2, 3])]
        );
        assert_eq!(
            project_claim_support(&[vec![refs(&[1]), refs(&[1, 2])], vec![refs(&[2])]]),
            vec![refs(&[1, 2])]
        );
        assert_eq!(project_claim_support(&[vec![refs(&[5])], vec![]]), vec![refs(&[5])]);
        assert!(project_claim_support(&[]).is_empty());
        assert!(project_claim_support(&[vec![], vec![]]).is_empty());
    }

    #[test]
    fn worker_label_votes() {
        let v = votes(&[Supported, Supported, Supported, PartiallySupported, NotSupported]);
        assert_eq!(aggregate_worker_labels(&v, 5).unwrap(), Some(Supported));
        let v = votes(&[PartiallySupported, PartiallySupported, NotSupported, NotSupported, Supported]);
        assert_eq!(aggregate_worker_labels(&v, 5).unwrap(), Some(PartiallySupported));
        let v = votes(&[Supported, Supported, PartiallySupported, PartiallySupported, NotSupported]);
        assert_eq!(aggregate_worker_labels(&v, 5).unwrap(), None);
        let v = votes(&[Supported, PartiallySupported, NotSupported]);
        assert_eq!(aggregate_worker_labels(&v, 3).unwrap(), None);
        let v = votes(&[Supported, Supported, NotSupported]);
        assert_eq!(aggregate_worker_labels(&v, 3).unwrap(), Some(Supported));
        assert!(aggregate_worker_labels(&v, 5).is_err());
        assert!(aggregate_worker_labels(&v, 4).is_err());
    }

    #[test]
    fn gold_token_union_and_drop() {
        let kept = aggregate_gold(
            &[worker(PartiallySupported, &[1], &[1, 2]), worker(PartiallySupported, &[1], &[2, 3])],
            PartiallySupported,
        )
        .unwrap();
        assert_eq!(kept.unsupported_token_indices, [1, 2, 3].into_iter().collect());

        let dropped = aggregate_gold(
            &[worker(PartiallySupported, &[1], &[1]), worker(PartiallySupported, &[1], &[5, 6, 7, 8, 9])],
            PartiallySupported,
        );
        assert!(dropped.is_none());

        let dedup = aggregate_gold(
            &[worker(Supported, &[4, 7], &[]), worker(Supported, &[4, 7], &[]), worker(NotSupported, &[], &[])],
            Supported,
        )
        .unwrap();
        assert_eq!(dedup.support_sets, vec![refs(&[4, 7])]);
        assert!(dedup.unsupported_token_indices.is_empty());
    }

    #[test]
    fn gold_for_partial_tie_uses_partial_voters() {
        let workers = vec![
            worker(PartiallySupported, &[1], &[0]),
            worker(PartiallySupported, &[2], &[0, 1]),
            worker(NotSupported, &[], &[]),
            worker(NotSupported, &[], &[]),
            worker(Supported, &[3], &[]),
        ];
        let label = aggregate_worker_labels(&workers, 5).unwrap().unwrap();
        let gold = aggregate_gold(&workers, label).unwrap();
        assert_eq!(gold.support_sets, vec![refs(&[1]), refs(&[2])]);
        assert_eq!(gold.unsupported_token_indices, [0, 1].into_iter().collect());
    }

    #[test]
    fn all_tokens_marked_becomes_not_supported() {
        let w = normalize_worker(worker(PartiallySupported, &[1], &[0, 1, 2]), 3);
        assert_eq!(w.label, NotSupported);
        assert!(w.support_set.is_empty());
        let w = normalize_worker(worker(PartiallySupported, &[1], &[0, 2]), 3);
        assert_eq!(w.label, PartiallySupported);
    }

    #[test]
    fn partition_labels() {
        let gold = GoldAnnotation {
            label: Supported,
            support_sets: vec![refs(&[1, 2])],
            unsupported_token_indices: BTreeSet::new(),
        };
        assert_eq!(derive_partition_labels(&refs(&[9, 10]), &gold), NotSupported);
        assert_eq!(derive_partition_labels(&refs(&[1, 2, 9]), &gold), Supported);
        assert_eq!(derive_partition_labels(&refs(&[1, 9]), &gold), PartiallySupported);
        let partial = GoldAnnotation {
            label: PartiallySupported,
            ..gold.clone()
        };
        assert_eq!(derive_partition_labels(&refs(&[1, 2]), &partial), PartiallySupported);
        let two_sets = GoldAnnotation {
            support_sets: vec![refs(&[1, 2]), refs(&[5])],
            ..gold
        };
        assert_eq!(derive_partition_labels(&refs(&[5, 6]), &two_sets), Supported);
    }

    fn label_strategy() -> impl Strategy<Value = EntailmentLabel> {
        prop_oneof![Just(Supported), Just(PartiallySupported), Just(NotSupported)]
    }

    fn brute_force_support(per: &[Vec<SupportSet>]) -> BTreeSet<SupportSet> {
        let active: Vec<&Vec<SupportSet>> = per.iter().filter(|s| !s.is_empty()).collect();
        let mut out = BTreeSet::new();
        let total: usize = active.iter().map(|s| s.len()).product();
        for mut code in 0..total {
            let mut union = SupportSet::new();
            for sets in &active {
                union.extend(sets[code % sets.len()].iter().cloned());
                code /= sets.len();
            }
            if !union.is_empty() {
                out.insert(union);
            }
        }
        out
    }

    proptest! {
        #[test]
        fn label_projection_is_permutation_and_duplication_invariant(
            labels in prop::collection::vec(label_strategy(), 1..8),
            dup in 0usize..8,
        ) {
            let base = project_claim_label(&labels).unwrap();
            let mut reversed = labels.clone();
            reversed.reverse();
            prop_assert_eq!(project_claim_label(&reversed).unwrap(), base);
            let mut duplicated = labels.clone();
            duplicated.push(labels[dup % labels.len()]);
            prop_assert_eq!(project_claim_label(&duplicated).unwrap(), base);
        }

        #[test]
        fn support_projection_matches_enumeration(
            per in prop::collection::vec(
                prop::collection::vec(prop::collection::btree_set(0usize..6, 1..4), 0..4),
                0..4,
            )
        ) {
            let per: Vec<Vec<SupportSet>> = per
                .into_iter()
                .map(|sets| sets.into_iter().map(|s| s.into_iter().map(|i| SentenceRef::new("d", i)).collect()).collect())
                .collect();
            let got: BTreeSet<SupportSet> = project_claim_support(&per).into_iter().collect();
            prop_assert_eq!(got, brute_force_support(&per));
        }

        #[test]
        fn unanimous_votes_win(label in label_strategy(), five in any::<bool>()) {
            let n = if five { 5 } else { 3 };
            let v = votes(&vec![label; n]);
            prop_assert_eq!(aggregate_worker_labels(&v, n).unwrap(), Some(label));
        }

        #[test]
        fn full_evidence_partition_recovers_uniform_labels(
            sets in prop::collection::vec(prop::collection::btree_set(0usize..20, 1..4), 1..4),
            supported in any::<bool>(),
        ) {
            let full = refs(&(0..20).collect::<Vec<_>>());
            let gold = if supported {
                GoldAnnotation {
                    label: Supported,
                    support_sets: sets.into_iter().map(|s| s.into_iter().map(|i| SentenceRef::new("d", i)).collect()).collect(),
                    unsupported_token_indices: BTreeSet::new(),
                }
            } else {
                GoldAnnotation::not_supported()
            };
            prop_assert_eq!(derive_partition_labels(&full, &gold), gold.label);
        }
    }
}
