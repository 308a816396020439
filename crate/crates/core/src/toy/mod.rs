//! Seeded synthetic gazetteer in eleven languages and six scripts.
//!
//! Each place has one underlying phoneme string. Every language spells it
//! with its own orthography and, for some places, its own ending. A small
//! share of places carry a different word in one language, reuse another
//! place's word, appear twice under a second namespace, or contain a
//! Latin-script name tagged with a non-Latin language.

mod render;
mod seeds;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{DocToponym, PlaceDoc};
use crate::error::{Error, Result};
use crate::evalkit::{TestQuery, Testset};
use crate::script_kit::detect_script;

pub use render::{render, LANGS};
pub use seeds::{SEED_PLACES, SEED_PRE_ROMANISED};

pub const LATIN_LANGS: [&str; 5] = ["en", "de", "fr", "es", "it"];
pub const NON_LATIN_LANGS: [&str; 6] = ["ru", "uk", "el", "he", "ka", "ko"];

/// Place ids of duplicate documents are offset by this much.
pub const DUPLICATE_OFFSET: u64 = 1_000_000;
/// Held-out place ids start here.
pub const HELDOUT_BASE: u64 = 2_000_000;
pub const HELDOUT_NAME: &str = "toy-heldout";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToyConfig {
    pub places: usize,
    pub heldout: usize,
    /// Chance that a place has a name in each non-home language.
    pub other_lang_rate: f64,
    pub duplicate_rate: f64,
    pub pre_romanised_rate: f64,
    pub false_cognate_rate: f64,
    pub homonym_rate: f64,
    pub seed: u64,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self {
            places: 10_000,
            heldout: 500,
            other_lang_rate: 0.37,
            duplicate_rate: 0.05,
            pre_romanised_rate: 0.02,
            false_cognate_rate: 0.03,
            homonym_rate: 0.01,
            seed: 42,
        }
    }
}

impl ToyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.places == 0 {
            return Err(Error::Config("toy.places must be positive".into()));
        }
        for (name, v) in [
            ("other_lang_rate", self.other_lang_rate),
            ("duplicate_rate", self.duplicate_rate),
            ("pre_romanised_rate", self.pre_romanised_rate),
            ("false_cognate_rate", self.false_cognate_rate),
            ("homonym_rate", self.homonym_rate),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("toy.{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

pub struct ToyGazetteer {
    pub docs: Vec<PlaceDoc>,
    /// Cross-script queries against Latin-script candidates, from places
    /// that never appear in `docs`.
    pub heldout: Testset,
}

impl ToyGazetteer {
    pub fn toponym_count(&self) -> usize {
        self.docs.iter().map(|d| d.toponyms.len()).sum()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for d in &self.docs {
            out.push_str(&serde_json::to_string(d).expect("place documents serialise"));
            out.push('\n');
        }
        out
    }
}

const CONSONANTS: &[char] = &[
    'p', 'b', 't', 'd', 'k', 'g', 'f', 'v', 's', 'z', 'm', 'n', 'l', 'r', 'h', 'x', 'j', 'S', 'Z', 'c', 'C',
];
const COMMON: &[char] = &['t', 'k', 'n', 'm', 'l', 'r', 's', 'd', 'b', 'p', 'v', 'g'];
const VOWELS: &[char] = &['a', 'e', 'i', 'o', 'u'];
const CODAS: &[char] = &['n', 'm', 'l', 'r', 's', 'k', 't'];
const CLUSTERS: &[&str] = &[
    "st", "kr", "tr", "pl", "br", "gr", "sl", "sk", "dr", "bl", "kl", "pr", "sv", "zv",
];

fn word(rng: &mut ChaCha8Rng) -> Vec<char> {
    let syllables = match rng.gen::<f64>() {
        u if u < 0.15 => 1,
        u if u < 0.65 => 2,
        _ => 3,
    };
    let mut w = Vec::new();
    for _ in 0..syllables {
        let u: f64 = rng.gen();
        if u < 0.1 {
            w.extend(CLUSTERS.choose(rng).unwrap().chars());
        } else if u < 0.55 {
            w.push(*COMMON.choose(rng).unwrap());
        } else if u < 0.92 || w.is_empty() {
            w.push(*CONSONANTS.choose(rng).unwrap());
        }
        let v = *VOWELS.choose(rng).unwrap();
        if w.last() == Some(&'j') && v == 'i' {
            w.pop();
        }
        w.push(v);
        if rng.gen::<f64>() < 0.3 {
            w.push(*CODAS.choose(rng).unwrap());
        }
    }
    w
}

fn ending(lang: &str) -> Option<char> {
    match lang {
        "it" => Some('o'),
        "es" | "ru" => Some('a'),
        "el" => Some('o'),
        _ => None,
    }
}

/// The spelling of `w` in `lang`, with the language's ending when
/// `with_ending` is set and the word ends in a consonant.
fn localise(lang: &str, w: &[char], with_ending: bool) -> String {
    match ending(lang) {
        Some(e) if with_ending && w.last().is_some_and(|&p| !render::is_vowel(p)) => {
            let mut x = w.to_vec();
            x.push(e);
            render(lang, &x)
        }
        _ => render(lang, w),
    }
}

struct Place {
    langs: Vec<&'static str>,
    names: Vec<String>,
}

fn synth_place(rng: &mut ChaCha8Rng, cfg: &ToyConfig, w: &[char], forced: &[&'static str]) -> Place {
    let home = *LANGS.choose(rng).unwrap();
    let with_ending = rng.gen::<f64>() < 0.5;
    let mut langs: Vec<&'static str> = LANGS
        .iter()
        .copied()
        .filter(|&l| l == home || forced.contains(&l) || rng.gen::<f64>() < cfg.other_lang_rate)
        .collect();
    if langs.len() == 1 {
        // At least two names so the place can yield a pair.
        let extra = *LANGS.iter().filter(|&&l| l != home).collect::<Vec<_>>().choose(rng).unwrap();
        langs.push(extra);
        langs.sort_by_key(|l| LANGS.iter().position(|x| x == l));
    }
    let cognate_break = rng.gen::<f64>() < cfg.false_cognate_rate;
    let broken = if cognate_break {
        langs.iter().copied().filter(|&l| l != home).collect::<Vec<_>>().choose(rng).copied()
    } else {
        None
    };
    let names = langs
        .iter()
        .map(|&l| {
            if Some(l) == broken {
                localise(l, &word(rng), with_ending)
            } else {
                localise(l, w, with_ending)
            }
        })
        .collect();
    Place { langs, names }
}

fn doc(place_id: u64, namespace: &str, langs: &[&str], names: &[String]) -> PlaceDoc {
    PlaceDoc {
        place_id,
        namespace: namespace.to_string(),
        toponyms: langs
            .iter()
            .zip(names)
            .map(|(l, n)| DocToponym {
                name: n.clone(),
                lang: Some(l.to_string()),
            })
            .collect(),
    }
}

pub fn generate(cfg: &ToyConfig) -> Result<ToyGazetteer> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut docs = Vec::with_capacity(cfg.places + cfg.places / 10);
    let mut words: Vec<Vec<char>> = Vec::with_capacity(cfg.places);

    for (i, names) in SEED_PLACES.iter().enumerate() {
        let mut d = doc(i as u64, "gn", &LANGS, &names.map(String::from));
        for &(_, lang, name) in SEED_PRE_ROMANISED.iter().filter(|s| s.0 == i) {
            d.toponyms.push(DocToponym {
                name: name.to_string(),
                lang: Some(lang.to_string()),
            });
        }
        docs.push(d);
    }

    for id in SEED_PLACES.len() as u64..cfg.places.max(SEED_PLACES.len()) as u64 {
        let w = if !words.is_empty() && rng.gen::<f64>() < cfg.homonym_rate {
            words.choose(&mut rng).unwrap().clone()
        } else {
            word(&mut rng)
        };
        let place = synth_place(&mut rng, cfg, &w, &[]);
        let mut d = doc(id, "gn", &place.langs, &place.names);
        if rng.gen::<f64>() < cfg.pre_romanised_rate {
            let lang = *NON_LATIN_LANGS.choose(&mut rng).unwrap();
            d.toponyms.push(DocToponym {
                name: render("en", &w),
                lang: Some(lang.to_string()),
            });
        }
        if rng.gen::<f64>() < cfg.duplicate_rate {
            // Second source, same place, a subset of the names.
            let keep: Vec<usize> = (0..place.langs.len()).filter(|_| rng.gen::<f64>() < 0.7).collect();
            if keep.len() >= 2 {
                let langs: Vec<&str> = keep.iter().map(|&k| place.langs[k]).collect();
                let names: Vec<String> = keep.iter().map(|&k| place.names[k].clone()).collect();
                docs.push(doc(id + DUPLICATE_OFFSET, "wd", &langs, &names));
            }
        }
        docs.push(d);
        words.push(w);
    }
    docs.sort_by_key(|d| d.place_id);

    let heldout = heldout(&mut rng, cfg)?;
    Ok(ToyGazetteer { docs, heldout })
}

fn heldout(rng: &mut ChaCha8Rng, cfg: &ToyConfig) -> Result<Testset> {
    let mut queries = Vec::with_capacity(cfg.heldout);
    let mut candidates = Vec::with_capacity(cfg.heldout);
    for k in 0..cfg.heldout as u64 {
        let q_lang = *NON_LATIN_LANGS.choose(rng).unwrap();
        let c_lang = *LATIN_LANGS.choose(rng).unwrap();
        let w = word(rng);
        let place = synth_place(rng, cfg, &w, &[q_lang, c_lang]);
        let name_of = |lang: &str| place.names[place.langs.iter().position(|&l| l == lang).unwrap()].clone();
        let id = HELDOUT_BASE + k;
        let text = name_of(q_lang);
        queries.push(TestQuery {
            script: detect_script(&text).ok(),
            text,
            truth: id,
        });
        candidates.push((id, name_of(c_lang)));
    }
    if queries.is_empty() {
        return Err(Error::EmptyTestset);
    }
    Ok(Testset {
        name: HELDOUT_NAME.to_string(),
        queries,
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeSet, HashSet};

    use super::*;
    use crate::corpus::ingest;
    use crate::script_kit::ScriptId;

    fn small() -> ToyConfig {
        ToyConfig {
            places: 2_000,
            heldout: 100,
            ..ToyConfig::default()
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        let a = generate(&small()).unwrap();
        let b = generate(&small()).unwrap();
        assert_eq!(a.to_jsonl(), b.to_jsonl());
        assert_eq!(a.heldout, b.heldout);
        let c = generate(&ToyConfig { seed: 7, ..small() }).unwrap();
        assert_ne!(a.to_jsonl(), c.to_jsonl());
    }

    #[test]
    fn default_size_is_about_fifty_thousand_toponyms() {
        let g = generate(&ToyConfig::default()).unwrap();
        let n = g.toponym_count();
        assert!((45_000..58_000).contains(&n), "{n}");
    }

    #[test]
    fn every_language_and_script_appears_and_ingests() {
        let g = generate(&small()).unwrap();
        let (store, report) = ingest(g.to_jsonl().as_bytes()).unwrap();
        assert!(report.filtered_total() > 0, "pre-romanised names are dropped");
        let langs: BTreeSet<&str> = store.records().iter().filter_map(|r| r.lang.as_deref()).collect();
        assert_eq!(langs.len(), 11);
        let scripts: BTreeSet<ScriptId> = store.records().iter().map(|r| r.script).collect();
        for s in [
            ScriptId::Latin,
            ScriptId::Cyrillic,
            ScriptId::Greek,
            ScriptId::Hebrew,
            ScriptId::Georgian,
            ScriptId::Hangul,
        ] {
            assert!(scripts.contains(&s), "{s:?}");
        }
        assert!(store.records().iter().any(|r| r.name == "Москва"));
        assert!(store.places().keys().any(|&p| p >= DUPLICATE_OFFSET));
    }

    #[test]
    fn heldout_is_cross_script_and_disjoint_from_training() {
        let g = generate(&small()).unwrap();
        let t = &g.heldout;
        assert_eq!(t.queries.len(), 100);
        assert_eq!(t.candidates.len(), 100);
        let ids: HashSet<u64> = t.candidates.iter().map(|c| c.0).collect();
        for q in &t.queries {
            assert!(ids.contains(&q.truth));
            assert_ne!(q.script, Some(ScriptId::Latin));
        }
        for (_, name) in &t.candidates {
            assert_eq!(detect_script(name).unwrap(), ScriptId::Latin);
        }
        assert!(g.docs.iter().all(|d| d.place_id < HELDOUT_BASE));
        let reparsed = Testset::parse(&t.name, &t.queries_tsv(), &t.candidates_tsv()).unwrap();
        assert_eq!(&reparsed, t);
    }
}
