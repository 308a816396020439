//! Grapheme-to-phoneme transcription and articulatory features for the
//! phonetic encoder.

mod features;
mod g2p;

pub use features::{FeatureSeq, FeatureTable, FeatureVec, IpaSeq, FEATURE_DIM, FEATURE_NAMES};
pub use g2p::{G2pProvider, RuleTable};

/// Transcription and features in one step; `None` when the language is
/// unsupported or no segment has features.
pub fn phonetic_features(provider: &G2pProvider, table: &FeatureTable, id: Option<u64>, name: &str, lang: Option<&str>) -> Option<FeatureSeq> {
    let ipa = provider.transcribe(id, name, lang)?;
    table.features(&ipa).ok()
}

/// Fraction of `(id, name, lang)` items that yield a non-empty feature
/// sequence; 0 for an empty stream.
pub fn coverage<'a, I>(items: I, provider: &G2pProvider, table: &FeatureTable) -> f64
where
    I: IntoIterator<Item = (Option<u64>, &'a str, Option<&'a str>)>,
{
    let (mut ok, mut total) = (0usize, 0usize);
    for (id, name, lang) in items {
        total += 1;
        if phonetic_features(provider, table, id, name, lang).is_some() {
            ok += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        ok as f64 / total as f64
    }
}
