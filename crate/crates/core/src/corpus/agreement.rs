use std::collections::BTreeMap;

use super::CorpusError;

/// Krippendorff's alpha for nominal labels.
///
/// `items` holds the labels each item received. Items with fewer than two
/// labels carry no pairing information and are skipped. When every pairable
/// label in the data is identical the expected disagreement is zero and alpha
/// is defined as 1.
pub fn krippendorff_alpha<L: Ord>(items: &[Vec<L>]) -> Result<f64, CorpusError> {
    let pairable: Vec<&Vec<L>> = items.iter().filter(|labels| labels.len() >= 2).collect();
    if pairable.len() < 2 {
        return Err(CorpusError::Precondition(
            "alpha needs at least two items with two or more labels".into(),
        ));
    }

    // Coincidence matrix: each ordered pair of values within an item adds
    // 1 / (m_u - 1).
    let mut coincidence: BTreeMap<(&L, &L), f64> = BTreeMap::new();
    for labels in &pairable {
        let weight = 1.0 / (labels.len() - 1) as f64;
        for (i, a) in labels.iter().enumerate() {
            for (j, b) in labels.iter().enumerate() {
                if i != j {
                    *coincidence.entry((a, b)).or_default() += weight;
                }
            }
        }
    }

    let mut marginals: BTreeMap<&L, f64> = BTreeMap::new();
    for (&(a, _), &v) in &coincidence {
        *marginals.entry(a).or_default() += v;
    }
    let n: f64 = marginals.values().sum();

    let observed: f64 = coincidence
        .iter()
        .filter(|((a, b), _)| a != b)
        .map(|(_, &v)| v)
        .sum();
    let expected_pairs: f64 = marginals
        .iter()
        .flat_map(|(a, &na)| marginals.iter().filter(move |(b, _)| *b != a).map(move |(_, &nb)| na * nb))
        .sum();
    if expected_pairs == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - (n - 1.0) * observed / expected_pairs)
}
