use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::record::ToponymStore;
use super::similarity::norm_lev_sim;
use crate::error::{Error, Result};
use crate::script_kit::{romanise, ScriptId};

/// Unordered script pair, stored low index first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScriptPair(pub ScriptId, pub ScriptId);

impl ScriptPair {
    pub fn new(a: ScriptId, b: ScriptId) -> Self {
        if a <= b {
            ScriptPair(a, b)
        } else {
            ScriptPair(b, a)
        }
    }

    pub fn is_same_script(self) -> bool {
        self.0 == self.1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairConfig {
    /// Budget per unordered script pair.
    pub quota: usize,
    pub cross_threshold: f64,
    pub same_threshold: f64,
    /// Acceptance rate for same-script, cross-language candidates.
    pub same_script_rate: f64,
    /// Cross-script acceptance multiplier once a budget runs low.
    pub cross_weight: f64,
    /// A budget is "low" when remaining < `tight_fraction * quota`.
    pub tight_fraction: f64,
    /// Same-script acceptance probability while a budget is low.
    pub tight_base: f64,
}

impl Default for PairConfig {
    fn default() -> Self {
        Self {
            quota: 2000,
            cross_threshold: 0.35,
            same_threshold: 0.60,
            same_script_rate: 0.2,
            cross_weight: 3.0,
            tight_fraction: 0.2,
            tight_base: 1.0 / 3.0,
        }
    }
}

impl PairConfig {
    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("cross_threshold", self.cross_threshold),
            ("same_threshold", self.same_threshold),
            ("same_script_rate", self.same_script_rate),
            ("tight_fraction", self.tight_fraction),
            ("tight_base", self.tight_base),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("pairs.{name} must lie in [0, 1], got {p}")));
            }
        }
        if self.cross_weight < 0.0 || !self.cross_weight.is_finite() {
            return Err(Error::Config("pairs.cross_weight must be finite and non-negative".into()));
        }
        Ok(())
    }

    pub fn threshold(&self, pair: ScriptPair) -> f64 {
        if pair.is_same_script() {
            self.same_threshold
        } else {
            self.cross_threshold
        }
    }
}

/// Remaining budget per script pair.
#[derive(Debug, Clone)]
pub struct QuotaTable {
    config: PairConfig,
    emitted: BTreeMap<ScriptPair, usize>,
}

impl QuotaTable {
    pub fn new(config: PairConfig) -> Self {
        Self {
            config,
            emitted: BTreeMap::new(),
        }
    }

    pub fn emitted(&self, pair: ScriptPair) -> usize {
        self.emitted.get(&pair).copied().unwrap_or(0)
    }

    pub fn remaining(&self, pair: ScriptPair) -> usize {
        self.config.quota.saturating_sub(self.emitted(pair))
    }

    pub fn is_tight(&self, pair: ScriptPair) -> bool {
        (self.remaining(pair) as f64) < self.config.tight_fraction * self.config.quota as f64
    }

    /// Probability of accepting a candidate that already passed the
    /// similarity and dedup checks.
    pub fn acceptance(&self, pair: ScriptPair, cross_language: bool) -> f64 {
        if self.remaining(pair) == 0 {
            return 0.0;
        }
        let same = pair.is_same_script();
        let mut p = match (self.is_tight(pair), same) {
            (false, _) => 1.0,
            (true, true) => self.config.tight_base,
            (true, false) => (self.config.cross_weight * self.config.tight_base).min(1.0),
        };
        if same && cross_language {
            p *= self.config.same_script_rate;
        }
        p
    }

    pub fn record(&mut self, pair: ScriptPair) {
        *self.emitted.entry(pair).or_default() += 1;
    }

    pub fn counts(&self) -> &BTreeMap<ScriptPair, usize> {
        &self.emitted
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord {
    /// The lower of the two toponym ids.
    pub anchor_id: u64,
    pub positive_id: u64,
    pub similarity: f64,
    pub script_a: ScriptId,
    pub script_b: ScriptId,
}

impl PairRecord {
    pub fn script_pair(&self) -> ScriptPair {
        ScriptPair::new(self.script_a, self.script_b)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairReport {
    pub candidates: usize,
    pub twins: usize,
    pub below_threshold: usize,
    pub duplicates: usize,
    pub quota_exhausted: usize,
    pub sampled_out: usize,
    pub emitted: usize,
}

/// Case-folded name used for twin detection and deduplication.
pub fn fold_name(name: &str) -> String {
    name.to_lowercase()
}

type DedupKey = ((String, Option<String>), (String, Option<String>));

/// Scans places in ascending id order and all unordered member pairs in
/// ascending id order, emitting those that pass threshold, dedup, quota
/// and sampling.
pub fn gen_pairs(store: &ToponymStore, config: &PairConfig, seed: u64) -> Result<(Vec<PairRecord>, PairReport)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let romanised: Vec<String> = store.records().iter().map(|r| romanise(&r.name)).collect();
    let folded: Vec<String> = store.records().iter().map(|r| fold_name(&r.name)).collect();
    let mut quotas = QuotaTable::new(config.clone());
    let mut seen: HashSet<DedupKey> = HashSet::new();
    let mut report = PairReport::default();
    let mut out = Vec::new();

    for members in store.places().values() {
        let mut ids = members.clone();
        ids.sort_unstable();
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                let (ra, rb) = (&store.records()[a as usize], &store.records()[b as usize]);
                let key_a = (folded[a as usize].clone(), ra.lang.clone());
                let key_b = (folded[b as usize].clone(), rb.lang.clone());
                if key_a == key_b {
                    continue;
                }
                report.candidates += 1;
                let pair = ScriptPair::new(ra.script, rb.script);
                let twin = key_a.0 == key_b.0;
                let similarity = if twin {
                    report.twins += 1;
                    1.0
                } else {
                    let s = norm_lev_sim(&romanised[a as usize], &romanised[b as usize]);
                    if s < config.threshold(pair) {
                        report.below_threshold += 1;
                        continue;
                    }
                    s
                };
                let key = if key_a <= key_b { (key_a, key_b) } else { (key_b, key_a) };
                if seen.contains(&key) {
                    report.duplicates += 1;
                    continue;
                }
                if quotas.remaining(pair) == 0 {
                    report.quota_exhausted += 1;
                    continue;
                }
                let p = quotas.acceptance(pair, ra.lang != rb.lang);
                if p < 1.0 && rng.gen::<f64>() >= p {
                    report.sampled_out += 1;
                    continue;
                }
                seen.insert(key);
                quotas.record(pair);
                out.push(PairRecord {
                    anchor_id: a,
                    positive_id: b,
                    similarity,
                    script_a: ra.script,
                    script_b: rb.script,
                });
            }
        }
    }
    report.emitted = out.len();
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::record::Namespace;

    fn store(places: &[(u64, &[(&str, &str)])]) -> ToponymStore {
        let mut s = ToponymStore::new();
        for &(pid, names) in places {
            for &(name, lang) in names {
                let script = crate::script_kit::detect_script(name).unwrap();
                s.push(pid, name.to_string(), Some(lang.to_string()), script, Namespace::Gn);
            }
        }
        s
    }

    fn all_pass() -> PairConfig {
        PairConfig {
            same_script_rate: 1.0,
            ..PairConfig::default()
        }
    }

    #[test]
    fn orthographic_twins_are_kept_with_similarity_one() {
        let s = store(&[(1, &[("Paris", "en"), ("Paris", "fr")])]);
        let (pairs, report) = gen_pairs(&s, &all_pass(), 0).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].similarity, 1.0);
        assert_eq!(report.twins, 1);
    }

    #[test]
    fn dissimilar_pairs_are_rejected() {
        let s = store(&[(1, &[("Finland", "en"), ("Suomi", "fi")])]);
        let (pairs, report) = gen_pairs(&s, &all_pass(), 0).unwrap();
        assert!(pairs.is_empty());
        assert_eq!(report.below_threshold, 1);
    }

    #[test]
    fn duplicates_from_two_sources_are_emitted_once() {
        let s = store(&[
            (1, &[("London", "en"), ("Лондон", "ru")]),
            (2, &[("London", "en"), ("Лондон", "ru")]),
        ]);
        let (pairs, report) = gen_pairs(&s, &all_pass(), 0).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!((pairs[0].anchor_id, pairs[0].positive_id), (0, 1));
        assert_eq!(report.duplicates, 1);
    }

    #[test]
    fn same_script_threshold_is_stricter() {
        // 4/7 passes the cross-script bar but not the same-script one.
        let s = store(&[(1, &[("London", "en"), ("Londres", "fr")])]);
        let (pairs, report) = gen_pairs(&s, &all_pass(), 0).unwrap();
        assert!(pairs.is_empty());
        assert_eq!(report.below_threshold, 1);
    }

    #[test]
    fn cross_script_threshold_applies() {
        let s = store(&[(1, &[("Moskva", "de"), ("Москва", "ru")])]);
        let (pairs, _) = gen_pairs(&s, &PairConfig::default(), 0).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].similarity, 1.0);
    }

    #[test]
    fn quota_caps_emission() {
        let names: Vec<(String, String)> = (0..30).map(|i| (format!("name{i:02}"), format!("l{i}"))).collect();
        let refs: Vec<(&str, &str)> = names.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let s = store(&[(1, &refs)]);
        let cfg = PairConfig {
            quota: 10,
            same_script_rate: 1.0,
            ..PairConfig::default()
        };
        let (pairs, report) = gen_pairs(&s, &cfg, 3).unwrap();
        assert_eq!(pairs.len(), 10);
        assert!(report.quota_exhausted > 0);
    }

    #[test]
    fn tight_budget_favours_cross_script_three_to_one() {
        let cfg = PairConfig {
            quota: 100,
            same_script_rate: 1.0,
            ..PairConfig::default()
        };
        let mut q = QuotaTable::new(cfg);
        let same = ScriptPair::new(ScriptId::Latin, ScriptId::Latin);
        let cross = ScriptPair::new(ScriptId::Latin, ScriptId::Cyrillic);
        for _ in 0..90 {
            q.record(same);
            q.record(cross);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 20_000;
        let mut acc = [0usize; 2];
        for (k, pair) in [same, cross].into_iter().enumerate() {
            for _ in 0..trials {
                if rng.gen::<f64>() < q.acceptance(pair, true) {
                    acc[k] += 1;
                }
            }
        }
        let ratio = acc[1] as f64 / acc[0] as f64;
        assert!((ratio - 3.0).abs() < 0.3, "ratio {ratio}");
    }

    #[test]
    fn same_script_cross_language_is_sampled() {
        let q = QuotaTable::new(PairConfig::default());
        let same = ScriptPair::new(ScriptId::Latin, ScriptId::Latin);
        assert!((q.acceptance(same, true) - 0.2).abs() < 1e-12);
        assert_eq!(q.acceptance(same, false), 1.0);
        assert_eq!(q.acceptance(ScriptPair::new(ScriptId::Greek, ScriptId::Latin), true), 1.0);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let cfg = PairConfig {
            same_script_rate: 1.5,
            ..PairConfig::default()
        };
        assert!(gen_pairs(&ToponymStore::new(), &cfg, 0).is_err());
    }
}
