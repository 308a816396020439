use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pairs::PairRecord;
use super::record::ToponymStore;
use crate::error::{Error, Result};
use crate::script_kit::{romanise, ScriptId};

pub const PREFIX_PAD: char = '_';
pub const DEFAULT_MAX_DRAWS: usize = 32;

/// Every unordered pair of co-located toponym ids.
#[derive(Debug, Clone, Default)]
pub struct AdjacencySet {
    pairs: HashSet<(u64, u64)>,
}

impl AdjacencySet {
    pub fn build(store: &ToponymStore) -> Self {
        let mut pairs = HashSet::new();
        for members in store.places().values() {
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    if a != b {
                        pairs.insert((a.min(b), a.max(b)));
                    }
                }
            }
        }
        Self { pairs }
    }

    pub fn contains(&self, a: u64, b: u64) -> bool {
        self.pairs.contains(&(a.min(b), a.max(b)))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// First two characters of the romanised name, padded with `_` when the
/// romanisation has a single character; `None` when it is empty.
pub fn prefix_key(romanised: &str) -> Option<String> {
    let mut it = romanised.chars();
    let first = it.next()?;
    let second = it.next().unwrap_or(PREFIX_PAD);
    Some([first, second].iter().collect())
}

#[derive(Debug, Clone, Default)]
pub struct PrefixIndex {
    buckets: BTreeMap<(String, ScriptId), Vec<u64>>,
    keys: Vec<Option<(String, ScriptId)>>,
}

impl PrefixIndex {
    pub fn build(store: &ToponymStore) -> Self {
        let mut buckets: BTreeMap<(String, ScriptId), Vec<u64>> = BTreeMap::new();
        let mut keys = Vec::with_capacity(store.len());
        for r in store.records() {
            let key = prefix_key(&romanise(&r.name)).map(|p| (p, r.script));
            if let Some(k) = &key {
                buckets.entry(k.clone()).or_default().push(r.id);
            }
            keys.push(key);
        }
        Self { buckets, keys }
    }

    pub fn key_of(&self, id: u64) -> Option<&(String, ScriptId)> {
        self.keys.get(id as usize).and_then(Option::as_ref)
    }

    pub fn bucket(&self, key: &(String, ScriptId)) -> &[u64] {
        self.buckets.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn entries(&self) -> usize {
        self.buckets.values().map(Vec::len).sum()
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TripletKind {
    Random,
    Hard,
}

impl TripletKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TripletKind::Random => "random",
            TripletKind::Hard => "hard",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "random" => Some(TripletKind::Random),
            "hard" => Some(TripletKind::Hard),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triplet {
    pub anchor: u64,
    pub positive: u64,
    pub negative: u64,
    pub kind: TripletKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TripletReport {
    pub pairs: usize,
    pub emitted: usize,
    pub skipped: usize,
    pub rejected_draws: usize,
}

pub struct NegativeSampler<'a> {
    pub pool: &'a [u64],
    pub adjacency: &'a AdjacencySet,
    pub prefixes: &'a PrefixIndex,
    pub max_draws: usize,
}

impl NegativeSampler<'_> {
    /// One triplet per pair. Negatives are drawn uniformly from the pool
    /// (random) or the anchor's prefix bucket (hard); draws that hit the
    /// anchor, the positive or an adjacent toponym are rejected, and a pair
    /// is skipped after `max_draws` rejections.
    pub fn generate(&self, pairs: &[PairRecord], kind: TripletKind, seed: u64) -> Result<(Vec<Triplet>, TripletReport)> {
        if self.pool.is_empty() {
            return Err(Error::EmptyPool);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = TripletReport {
            pairs: pairs.len(),
            ..TripletReport::default()
        };
        let mut out = Vec::with_capacity(pairs.len());
        for p in pairs {
            let (a, pos) = (p.anchor_id, p.positive_id);
            let candidates: &[u64] = match kind {
                TripletKind::Random => self.pool,
                TripletKind::Hard => self.prefixes.key_of(a).map(|k| self.prefixes.bucket(k)).unwrap_or(&[]),
            };
            let mut found = None;
            if !candidates.is_empty() {
                for _ in 0..self.max_draws {
                    let n = candidates[rng.gen_range(0..candidates.len())];
                    if n != a && n != pos && !self.adjacency.contains(a, n) {
                        found = Some(n);
                        break;
                    }
                    report.rejected_draws += 1;
                }
            }
            match found {
                Some(negative) => out.push(Triplet {
                    anchor: a,
                    positive: pos,
                    negative,
                    kind,
                }),
                None => report.skipped += 1,
            }
        }
        report.emitted = out.len();
        Ok((out, report))
    }
}

/// Keeps triplets whose three members all satisfy `has_features`; returns
/// the survivors and the surviving fraction.
pub fn filter_by_features(triplets: &[Triplet], has_features: impl Fn(u64) -> bool) -> (Vec<Triplet>, f64) {
    let kept: Vec<Triplet> = triplets
        .iter()
        .copied()
        .filter(|t| has_features(t.anchor) && has_features(t.positive) && has_features(t.negative))
        .collect();
    let rate = if triplets.is_empty() {
        0.0
    } else {
        kept.len() as f64 / triplets.len() as f64
    };
    (kept, rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::record::Namespace;
    use crate::script_kit::detect_script;

    fn store(places: &[(u64, &[&str])]) -> ToponymStore {
        let mut s = ToponymStore::new();
        for &(pid, names) in places {
            for &n in names {
                s.push(pid, n.to_string(), None, detect_script(n).unwrap(), Namespace::Wd);
            }
        }
        s
    }

    fn pair(a: u64, p: u64) -> PairRecord {
        PairRecord {
            anchor_id: a,
            positive_id: p,
            similarity: 1.0,
            script_a: ScriptId::Latin,
            script_b: ScriptId::Latin,
        }
    }

    #[test]
    fn adjacency_is_the_complete_graph_per_place() {
        let s = store(&[(1, &["A", "B", "C"]), (2, &["D", "E"])]);
        let adj = AdjacencySet::build(&s);
        assert_eq!(adj.len(), 4);
        assert!(adj.contains(0, 1) && adj.contains(2, 0) && adj.contains(1, 2) && adj.contains(3, 4));
        assert!(!adj.contains(0, 3));
    }

    #[test]
    fn prefix_keys() {
        assert_eq!(prefix_key("munich").as_deref(), Some("mu"));
        assert_eq!(prefix_key("o").as_deref(), Some("o_"));
        assert_eq!(prefix_key(""), None);
        let s = store(&[(1, &["Москва", "Munich", "O"])]);
        let idx = PrefixIndex::build(&s);
        assert_eq!(idx.key_of(0), Some(&("mo".to_string(), ScriptId::Cyrillic)));
        assert_eq!(idx.key_of(1), Some(&("mu".to_string(), ScriptId::Latin)));
        assert_eq!(idx.key_of(2), Some(&("o_".to_string(), ScriptId::Latin)));
        for id in 0..3 {
            assert!(idx.bucket(idx.key_of(id).unwrap()).contains(&id));
        }
    }

    #[test]
    fn forced_random_negative() {
        let s = store(&[(1, &["A", "P"]), (2, &["N"])]);
        let adj = AdjacencySet::build(&s);
        let idx = PrefixIndex::build(&s);
        let pool: Vec<u64> = s.ids().collect();
        let sampler = NegativeSampler {
            pool: &pool,
            adjacency: &adj,
            prefixes: &idx,
            max_draws: DEFAULT_MAX_DRAWS,
        };
        let (t, _) = sampler.generate(&[pair(0, 1)], TripletKind::Random, 1).unwrap();
        assert_eq!(t[0].negative, 2);
    }

    #[test]
    fn hard_negative_skips_co_located_bucket_members() {
        let s = store(&[(1, &["Munich", "München", "Monaco di Baviera"]), (2, &["Murcia"])]);
        let adj = AdjacencySet::build(&s);
        let idx = PrefixIndex::build(&s);
        let pool: Vec<u64> = s.ids().collect();
        let sampler = NegativeSampler {
            pool: &pool,
            adjacency: &adj,
            prefixes: &idx,
            max_draws: DEFAULT_MAX_DRAWS,
        };
        let valid: Vec<u64> = idx
            .bucket(idx.key_of(0).unwrap())
            .iter()
            .copied()
            .filter(|&n| n != 0 && n != 1 && !adj.contains(0, n))
            .collect();
        assert_eq!(valid, vec![3]);
        for seed in 0..20 {
            let (t, _) = sampler.generate(&[pair(0, 1)], TripletKind::Hard, seed).unwrap();
            assert_eq!(t[0].negative, 3);
        }
    }

    #[test]
    fn pair_without_valid_candidates_is_skipped() {
        let s = store(&[(1, &["Munich", "München"]), (2, &["Berlin"])]);
        let adj = AdjacencySet::build(&s);
        let idx = PrefixIndex::build(&s);
        let pool: Vec<u64> = s.ids().collect();
        let sampler = NegativeSampler {
            pool: &pool,
            adjacency: &adj,
            prefixes: &idx,
            max_draws: DEFAULT_MAX_DRAWS,
        };
        let (t, report) = sampler.generate(&[pair(0, 1)], TripletKind::Hard, 0).unwrap();
        assert!(t.is_empty());
        assert_eq!(report.skipped, 1);
        let empty = NegativeSampler { pool: &[], ..sampler };
        assert!(matches!(empty.generate(&[], TripletKind::Random, 0), Err(Error::EmptyPool)));
    }
}
