//! Evaluation statistics: binary classification, AUROC, retrieval F1 against
//! alternative gold sets, the paired bootstrap test and report assembly.

mod bootstrap;
mod metrics;
mod report;

use thiserror::Error;

pub use bootstrap::{paired_bootstrap, BootstrapOutcome, DEFAULT_RESAMPLES};
pub use metrics::{
    auroc, binary_f1_acc, f1_against, max_f1_over_gold_sets, mean_retrieval_prf, BinaryPrediction, Prf,
};
pub use report::{BootstrapSettings, EvalReport};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no items to evaluate")]
    Empty,
    #[error("misaligned inputs: {0}")]
    Misaligned(String),
}
