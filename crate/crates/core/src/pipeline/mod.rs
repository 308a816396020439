//! File-based pipeline stages shared by the command line and the
//! end-to-end tests. Each stage reads the artifacts of earlier stages,
//! writes its own atomically, and produces identical bytes for identical
//! inputs and seed.

mod config;
mod stages;

pub use config::{IndexConfig, Paths, PipelineConfig, TripletConfig, PRESETS};
pub use stages::{
    build_vocab, diagnostics, embed, evaluate, evaluate_baselines, features, index, ingest, load_student_file,
    load_teacher_file, load_testsets, pairs, query, stamp_of, toy, train, triplets, EmbedSummary, QueryHit, Real,
    SystemMetrics, ToySummary, TripletSummary, LOG_MAGIC, REPORT_MAGIC, TOY_MAGIC,
};
