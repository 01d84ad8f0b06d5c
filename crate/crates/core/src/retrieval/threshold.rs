use super::{RetrievalError, RetrievalScore};
use crate::corpus::SupportSet;
use crate::evalkit::max_f1_over_gold_sets;

/// One development claim: per-sentence scores and its gold support sets.
#[derive(Debug, Clone)]
pub struct DevItem {
    pub scores: Vec<RetrievalScore>,
    pub gold_sets: Vec<SupportSet>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdChoice {
    pub threshold: f64,
    pub mean_max_f1: f64,
    /// Items that contributed to the objective (those with gold sets).
    pub n_items: usize,
}

/// Sentences whose score is strictly greater than `threshold`.
pub fn select_above(scores: &[RetrievalScore], threshold: f64) -> SupportSet {
    scores
        .iter()
        .filter(|s| s.score > threshold)
        .map(|s| s.sentence.clone())
        .collect::<SupportSet>()
}

/// Mean max-F1 over items that have at least one gold set.
pub fn mean_max_f1(items: &[DevItem], threshold: f64) -> Option<f64> {
    let f1s: Vec<f64> = items
        .iter()
        .filter_map(|item| {
            max_f1_over_gold_sets(&select_above(&item.scores, threshold), &item.gold_sets).map(|p| p.f1)
        })
        .collect();
    (!f1s.is_empty()).then(|| f1s.iter().sum::<f64>() / f1s.len() as f64)
}

/// Distinct observed scores, midpoints between neighbours, and one value
/// below the minimum so that selecting every sentence is reachable.
pub fn threshold_candidates(items: &[DevItem]) -> Vec<f64> {
    let mut distinct: Vec<f64> = items
        .iter()
        .flat_map(|i| i.scores.iter().map(|s| s.score))
        .filter(|s| s.is_finite())
        .collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let Some(&min) = distinct.first() else {
        return Vec::new();
    };
    let mut out = vec![min - 1.0];
    for w in distinct.windows(2) {
        out.push(w[0]);
        out.push(w[0] + (w[1] - w[0]) / 2.0);
    }
    out.push(*distinct.last().unwrap());
    out
}

/// Picks the candidate threshold with the highest mean max-F1 on the
/// development items; ties go to the smallest threshold.
pub fn tune_threshold(items: &[DevItem]) -> Result<ThresholdChoice, RetrievalError> {
    let n_items = items.iter().filter(|i| !i.gold_sets.is_empty()).count();
    if n_items == 0 {
        return Err(RetrievalError::NoDevItems);
    }
    let mut best: Option<ThresholdChoice> = None;
    for tau in threshold_candidates(items) {
        let Some(value) = mean_max_f1(items, tau) else { continue };
        if best.is_none_or(|b| value > b.mean_max_f1) {
            best = Some(ThresholdChoice {
                threshold: tau,
                mean_max_f1: value,
                n_items,
            });
        }
    }
    best.ok_or(RetrievalError::NoDevItems)
}
