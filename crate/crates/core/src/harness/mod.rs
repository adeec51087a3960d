//! File formats and the experiment driver behind the `tpfc` binary.

pub mod csvio;
pub mod fit;
pub mod knowledge;
pub mod sweep;

use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::metrics;

pub use fit::{fit_report, run_algorithm, score, Algorithm, FitReport, Scores};
pub use knowledge::{load_knowledge, save_knowledge, KnowledgeFile};
pub use sweep::{run_sweep, run_sweep_file, AggregateRow, DatasetSpec, ExperimentConfig, KnowledgeSpec, SweepOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalReport {
    pub rand_index: f64,
    pub nmi: f64,
    pub n: usize,
}

/// Compares two label files.
pub fn eval_label_files(pred: &Path, truth: &Path) -> Result<EvalReport> {
    let p = csvio::read_labels(pred)?;
    let t = csvio::read_labels(truth)?;
    Ok(EvalReport {
        rand_index: metrics::rand_index(&p, &t)?,
        nmi: metrics::nmi(&p, &t)?,
        n: p.len(),
    })
}
