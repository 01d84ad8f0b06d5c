use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::corpus::SupportSet;

/// One scored binary decision. `label` is the prediction, `gold` the truth;
/// the positive class is Supported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryPrediction {
    pub item_id: String,
    pub score: f64,
    pub label: bool,
    pub gold: bool,
}

impl BinaryPrediction {
    pub fn new(item_id: impl Into<String>, score: f64, threshold: f64, gold: bool) -> Self {
        Self {
            item_id: item_id.into(),
            score,
            label: score > threshold,
            gold,
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// F1 of the positive class and accuracy. Zero denominators give 0.
pub fn binary_f1_acc(preds: &[BinaryPrediction]) -> Result<(f64, f64), EvalError> {
    if preds.is_empty() {
        return Err(EvalError::Empty);
    }
    let (mut tp, mut fp, mut fn_, mut correct) = (0, 0, 0, 0);
    for p in preds {
        match (p.label, p.gold) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
        if p.label == p.gold {
            correct += 1;
        }
    }
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    Ok((harmonic(precision, recall), ratio(correct, preds.len())))
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half. `None` unless both classes are present.
///
/// Computed from mid-ranks (Mann-Whitney U), which equals exact pair
/// counting.
pub fn auroc(items: &[(f64, bool)]) -> Option<f64> {
    let n_pos = items.iter().filter(|(_, g)| *g).count();
    let n_neg = items.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let mut sorted: Vec<&(f64, bool)> = items.iter().collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Twice the positive rank sum, kept integral: a tie group spanning ranks
    // i+1..=j contributes (i + 1 + j) per positive.
    let mut twice_rank_sum: u128 = 0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j].0.total_cmp(&sorted[i].0) == Ordering::Equal {
            j += 1;
        }
        let positives = sorted[i..j].iter().filter(|(_, g)| *g).count() as u128;
        twice_rank_sum += positives * (i as u128 + 1 + j as u128);
        i = j;
    }
    let n_pos_u = n_pos as u128;
    // 2U = 2R - n_pos (n_pos + 1)
    let twice_u = twice_rank_sum - n_pos_u * (n_pos_u + 1);
    Some(twice_u as f64 / (2.0 * n_pos as f64 * n_neg as f64))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn f1_against(predicted: &SupportSet, gold: &SupportSet) -> Prf {
    if predicted.is_empty() {
        return Prf::default();
    }
    let hits = predicted.intersection(gold).count();
    let precision = ratio(hits, predicted.len());
    let recall = ratio(hits, gold.len());
    Prf {
        precision,
        recall,
        f1: harmonic(precision, recall),
    }
}

/// Best F1 over the alternative gold sets, with that set's precision and
/// recall. An empty prediction scores 0; no gold sets gives `None`.
pub fn max_f1_over_gold_sets(predicted: &SupportSet, gold_sets: &[SupportSet]) -> Option<Prf> {
    gold_sets
        .iter()
        .map(|g| f1_against(predicted, g))
        .reduce(|best, s| if s.f1 > best.f1 { s } else { best })
}

/// Mean of per-item best precision, recall and F1 over items that have gold
/// sets.
pub fn mean_retrieval_prf<'a, I>(items: I) -> Option<Prf>
where
    I: IntoIterator<Item = (&'a SupportSet, &'a [SupportSet])>,
{
    let mut sum = Prf::default();
    let mut n = 0usize;
    for (pred, golds) in items {
        if let Some(s) = max_f1_over_gold_sets(pred, golds) {
            sum.precision += s.precision;
            sum.recall += s.recall;
            sum.f1 += s.f1;
            n += 1;
        }
    }
    (n > 0).then(|| Prf {
        precision: sum.precision / n as f64,
        recall: sum.recall / n as f64,
        f1: sum.f1 / n as f64,
    })
}
