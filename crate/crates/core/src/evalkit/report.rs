use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::Prf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BootstrapSettings {
    pub n_resamples: usize,
    pub seed: u64,
}

/// Aggregate evaluation results for one system.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_items: usize,
    pub threshold: Option<f64>,
    pub f1: Option<f64>,
    pub accuracy: Option<f64>,
    pub auroc: Option<f64>,
    pub retrieval: Option<Prf>,
    /// Comparison name -> one-sided bootstrap p-value.
    pub p_values: BTreeMap<String, f64>,
    pub bootstrap: Option<BootstrapSettings>,
}

impl EvalReport {
    pub fn render_table(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{:.1}", 100.0 * x));
        let mut out = String::new();
        let _ = writeln!(out, "{:<12} {:>8}", "metric", "value");
        let _ = writeln!(out, "{:<12} {:>8}", "items", self.n_items);
        if let Some(t) = self.threshold {
            let _ = writeln!(out, "{:<12} {:>8.4}", "threshold", t);
        }
        let _ = writeln!(out, "{:<12} {:>8}", "F1", fmt(self.f1));
        let _ = writeln!(out, "{:<12} {:>8}", "Acc", fmt(self.accuracy));
        let _ = writeln!(out, "{:<12} {:>8}", "AUROC", fmt(self.auroc));
        if let Some(r) = self.retrieval {
            let _ = writeln!(out, "{:<12} {:>8}", "ret. P", fmt(Some(r.precision)));
            let _ = writeln!(out, "{:<12} {:>8}", "ret. R", fmt(Some(r.recall)));
            let _ = writeln!(out, "{:<12} {:>8}", "ret. F1", fmt(Some(r.f1)));
        }
        for (name, p) in &self.p_values {
            let _ = writeln!(out, "{:<12} {:>8.4}", format!("p({name})"), p);
        }
        out
    }
}
