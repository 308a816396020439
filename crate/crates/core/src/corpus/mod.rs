//! Gazetteer ingestion, positive pairs, adjacency, prefix buckets and
//! triplet sampling.

pub mod io;
mod negatives;
mod pairs;
mod record;
mod similarity;

pub use negatives::{
    filter_by_features, prefix_key, AdjacencySet, NegativeSampler, PrefixIndex, Triplet, TripletKind, TripletReport,
    DEFAULT_MAX_DRAWS, PREFIX_PAD,
};
pub use pairs::{fold_name, gen_pairs, PairConfig, PairRecord, PairReport, QuotaTable, ScriptPair};
pub use record::{
    expected_script, ingest, is_pre_romanised, DocToponym, IngestReport, Namespace, PlaceDoc, ToponymRecord,
    ToponymStore, EXPECTED_SCRIPTS,
};
pub use similarity::{levenshtein, norm_lev_sim};
