use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::rng::{below, rng_from_seed, stream_seed};

pub const DEFAULT_RESAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOutcome {
    /// Fraction of resamples where metric(A) <= metric(B).
    pub p_value: f64,
    /// Fraction of resamples where metric(A) < metric(B).
    pub p_strict: f64,
    pub n_resamples: usize,
    pub seed: u64,
}

/// One-sided paired bootstrap test of "A is better than B".
///
/// Items are resampled with replacement `n_resamples` times. Resample `i`
/// draws from its own stream seeded with `stream_seed(seed, i)`, so the
/// result does not depend on how resamples are scheduled across threads.
pub fn paired_bootstrap<T, G, F>(
    metric: F,
    system_a: &[T],
    system_b: &[T],
    golds: &[G],
    n_resamples: usize,
    seed: u64,
) -> Result<BootstrapOutcome, EvalError>
where
    T: Clone + Sync,
    G: Clone + Sync,
    F: Fn(&[T], &[G]) -> f64 + Sync,
{
    let n = golds.len();
    if system_a.len() != n || system_b.len() != n {
        return Err(EvalError::Misaligned(format!(
            "{} / {} outputs for {n} gold items",
            system_a.len(),
            system_b.len()
        )));
    }
    if n == 0 || n_resamples == 0 {
        return Err(EvalError::Empty);
    }
    let (le, lt) = (0..n_resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(stream_seed(seed, i as u64));
            let idx: Vec<usize> = (0..n).map(|_| below(&mut rng, n)).collect();
            let a: Vec<T> = idx.iter().map(|&j| system_a[j].clone()).collect();
            let b: Vec<T> = idx.iter().map(|&j| system_b[j].clone()).collect();
            let g: Vec<G> = idx.iter().map(|&j| golds[j].clone()).collect();
            let (ma, mb) = (metric(&a, &g), metric(&b, &g));
            (usize::from(ma <= mb), usize::from(ma < mb))
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(BootstrapOutcome {
        p_value: le as f64 / n_resamples as f64,
        p_strict: lt as f64 / n_resamples as f64,
        n_resamples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn accuracy(preds: &[bool], golds: &[bool]) -> f64 {
        preds.iter().zip(golds).filter(|(p, g)| p == g).count() as f64 / golds.len() as f64
    }

    #[test]
    fn dominance_and_identity() {
        let golds: Vec<bool> = (0..40).map(|i| i % 3 == 0).collect();
        let perfect = golds.clone();
        let wrong: Vec<bool> = golds.iter().map(|g| !g).collect();
        let out = paired_bootstrap(accuracy, &perfect, &wrong, &golds, 2000, 3).unwrap();
        assert!(out.p_value <= 0.01);
        let same = paired_bootstrap(accuracy, &perfect, &perfect, &golds, 2000, 3).unwrap();
        assert_eq!(same.p_value, 1.0);
        assert_eq!(same.p_strict, 0.0);
    }

    #[test]
    fn seeded_runs_repeat_exactly() {
        let golds: Vec<bool> = (0..30).map(|i| i % 2 == 0).collect();
        let a: Vec<bool> = (0..30).map(|i| i % 2 == 0 || i % 7 == 0).collect();
        let b: Vec<bool> = (0..30).map(|i| i % 2 == 0 || i % 5 == 0).collect();
        let x = paired_bootstrap(accuracy, &a, &b, &golds, 500, 42).unwrap();
        let y = paired_bootstrap(accuracy, &a, &b, &golds, 500, 42).unwrap();
        assert_eq!(x, y);
        // Reversing the systems swaps the strict and non-strict tails.
        let r = paired_bootstrap(accuracy, &b, &a, &golds, 500, 42).unwrap();
        assert!((x.p_value + r.p_strict - 1.0).abs() < 1e-12);
    }

    #[test]
    fn misaligned_inputs() {
        let golds = vec![true, false];
        assert!(paired_bootstrap(accuracy, &[true], &[true, false], &golds, 10, 0).is_err());
        assert!(paired_bootstrap(accuracy, &[], &[], &Vec::<bool>::new(), 10, 0).is_err());
    }
}
