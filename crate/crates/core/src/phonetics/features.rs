use std::collections::HashMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const FEATURE_DIM: usize = 24;

pub const FEATURE_NAMES: [&str; FEATURE_DIM] = [
    "syl", "son", "cons", "cont", "delrel", "lat", "nas", "strid", "voi", "sg", "cg", "ant", "cor", "distr", "lab",
    "hi", "lo", "back", "round", "velaric", "tense", "long", "hitone", "hireg",
];

const BUNDLED: &str = include_str!("../../data/features.tsv");

pub type FeatureVec = [u8; FEATURE_DIM];

/// Ordered IPA segments of one name.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IpaSeq(pub Vec<String>);

impl IpaSeq {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn render(&self) -> String {
        self.0.join(" ")
    }

    pub fn parse(s: &str) -> Self {
        IpaSeq(s.split_whitespace().map(str::to_string).collect())
    }
}

/// Per-segment articulatory vectors, never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSeq {
    pub vectors: Vec<FeatureVec>,
    /// Segments that had no entry in the table.
    pub dropped: usize,
}

impl FeatureSeq {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Row-major `len × 24` values.
    pub fn to_flat<S: crate::Scalar>(&self) -> Vec<S> {
        self.vectors.iter().flatten().map(|&b| S::of(b as f64)).collect()
    }
}

/// Segment → binary feature vector. Source values `+` become 1; `-` and `0`
/// both become 0.
#[derive(Debug, Clone)]
pub struct FeatureTable {
    map: HashMap<String, FeatureVec>,
}

impl FeatureTable {
    pub fn bundled() -> &'static FeatureTable {
        static TABLE: OnceLock<FeatureTable> = OnceLock::new();
        TABLE.get_or_init(|| FeatureTable::parse(BUNDLED).expect("bundled feature table is well formed"))
    }

    /// Lines `segment\tv1 v2 … v24`; values are `0`/`1` or `+`/`-`/`0`.
    pub fn parse(src: &str) -> Result<Self> {
        let mut map = HashMap::new();
        for (n, line) in src.lines().enumerate() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let bad = |why: String| Error::Config(format!("feature table line {}: {why}", n + 1));
            let (seg, values) = line.split_once('\t').ok_or_else(|| bad("missing tab".into()))?;
            let mut v = [0u8; FEATURE_DIM];
            let mut count = 0;
            for (i, tok) in values.split_whitespace().enumerate() {
                if i >= FEATURE_DIM {
                    return Err(bad("too many values".into()));
                }
                v[i] = match tok {
                    "1" | "+" => 1,
                    "0" | "-" => 0,
                    other => return Err(bad(format!("bad value {other:?}"))),
                };
                count += 1;
            }
            if count != FEATURE_DIM {
                return Err(bad(format!("expected {FEATURE_DIM} values, found {count}")));
            }
            if map.insert(seg.to_string(), v).is_some() {
                return Err(bad(format!("duplicate segment {seg:?}")));
            }
        }
        Ok(Self { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, segment: &str) -> Option<&FeatureVec> {
        self.map.get(segment)
    }

    /// Unknown segments are dropped and counted.
    pub fn features(&self, ipa: &IpaSeq) -> Result<FeatureSeq> {
        let mut vectors = Vec::with_capacity(ipa.len());
        let mut dropped = 0;
        for seg in &ipa.0 {
            match self.map.get(seg) {
                Some(v) => vectors.push(*v),
                None => dropped += 1,
            }
        }
        if vectors.is_empty() {
            return Err(Error::NoPhoneticFeatures);
        }
        Ok(FeatureSeq { vectors, dropped })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_and_b_differ_only_in_voicing() {
        let t = FeatureTable::bundled();
        let (p, b) = (t.get("p").unwrap(), t.get("b").unwrap());
        let diff: Vec<&str> = (0..FEATURE_DIM)
            .filter(|&i| p[i] != b[i])
            .map(|i| FEATURE_NAMES[i])
            .collect();
        assert_eq!(diff, vec!["voi"]);
    }

    #[test]
    fn unknown_segments_are_dropped() {
        let t = FeatureTable::bundled();
        let fs = t.features(&IpaSeq::parse("b ☃ a")).unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(fs.dropped, 1);
    }

    #[test]
    fn empty_or_all_unknown_is_an_error() {
        let t = FeatureTable::bundled();
        assert!(matches!(t.features(&IpaSeq::default()), Err(Error::NoPhoneticFeatures)));
        assert!(matches!(t.features(&IpaSeq::parse("☃ ☄")), Err(Error::NoPhoneticFeatures)));
    }

    #[test]
    fn ternary_values_map_to_binary() {
        let row = format!("x\t{}", ["+", "-", "0"].iter().cycle().take(FEATURE_DIM).copied().collect::<Vec<_>>().join(" "));
        let t = FeatureTable::parse(&row).unwrap();
        let v = t.get("x").unwrap();
        assert_eq!(&v[..3], &[1, 0, 0]);
        assert!(FeatureTable::parse("x\t1 0").is_err());
    }
}
