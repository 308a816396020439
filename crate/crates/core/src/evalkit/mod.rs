//! String baselines, retrieval metrics, the diagnostic pair suite and the
//! testset harness.

mod diagnostics;
mod jaro;
pub mod mehdie;
mod metrics;
mod run;
mod testset;

pub use diagnostics::{
    parse_pairs, run_diagnostics, Category, DiagnosticPair, DiagnosticReport, DiagnosticResult, BUNDLED_DIAGNOSTICS,
    MATCH_THRESHOLD, SEPARATION_THRESHOLD,
};
pub use jaro::{jaro, jaro_winkler};
pub use metrics::{mrr, rank_of, recall_at_k, Metrics};
pub use run::{rank_by_score, run_baseline, run_model, StringMetric};
pub use testset::{TestQuery, Testset};

/// Bundled sample testset: Hebrew queries against romanised candidates.
pub const SAMPLE_QUERIES: &str = include_str!("../../data/testsets/sample.queries.tsv");
pub const SAMPLE_CANDIDATES: &str = include_str!("../../data/testsets/sample.candidates.tsv");

pub fn sample_testset() -> crate::Result<Testset> {
    Testset::parse("sample", SAMPLE_QUERIES, SAMPLE_CANDIDATES)
}
