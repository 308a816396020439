use std::collections::BTreeMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::script_kit::{detect_script, ScriptId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Namespace {
    Gn,
    Wd,
    Tgn,
    Other,
}

impl Namespace {
    pub fn as_str(self) -> &'static str {
        match self {
            Namespace::Gn => "gn",
            Namespace::Wd => "wd",
            Namespace::Tgn => "tgn",
            Namespace::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Namespace {
        match s {
            "gn" => Namespace::Gn,
            "wd" => Namespace::Wd,
            "tgn" => Namespace::Tgn,
            _ => Namespace::Other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToponymRecord {
    pub id: u64,
    pub place_id: u64,
    pub name: String,
    pub lang: Option<String>,
    pub script: ScriptId,
    pub namespace: Namespace,
}

/// One line of the place document stream.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlaceDoc {
    pub place_id: u64,
    pub namespace: String,
    pub toponyms: Vec<DocToponym>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DocToponym {
    pub name: String,
    #[serde(default)]
    pub lang: Option<String>,
}

/// Toponyms with dense ids (`records[i].id == i`) and the place → toponym
/// map, both in ingestion order.
#[derive(Debug, Clone, Default)]
pub struct ToponymStore {
    records: Vec<ToponymRecord>,
    places: BTreeMap<u64, Vec<u64>>,
}

impl ToponymStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a record, assigning the next id.
    pub fn push(&mut self, place_id: u64, name: String, lang: Option<String>, script: ScriptId, namespace: Namespace) -> u64 {
        let id = self.records.len() as u64;
        self.records.push(ToponymRecord {
            id,
            place_id,
            name,
            lang,
            script,
            namespace,
        });
        self.places.entry(place_id).or_default().push(id);
        id
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: u64) -> Option<&ToponymRecord> {
        self.records.get(id as usize)
    }

    pub fn records(&self) -> &[ToponymRecord] {
        &self.records
    }

    /// Places in ascending id order; member ids ascending.
    pub fn places(&self) -> &BTreeMap<u64, Vec<u64>> {
        &self.places
    }

    pub fn ids(&self) -> impl Iterator<Item = u64> + '_ {
        self.records.iter().map(|r| r.id)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub lines: usize,
    pub malformed: usize,
    pub kept: usize,
    /// Pre-romanised records dropped, by `(lang, observed script)`.
    pub filtered: BTreeMap<(String, ScriptId), usize>,
}

impl IngestReport {
    pub fn filtered_total(&self) -> usize {
        self.filtered.values().sum()
    }
}

/// Expected script for language codes whose native orthography is not
/// Latin. Codes not listed are not filtered.
pub const EXPECTED_SCRIPTS: &[(&str, ScriptId)] = &[
    ("am", ScriptId::Other),
    ("ar", ScriptId::Arabic),
    ("be", ScriptId::Cyrillic),
    ("bg", ScriptId::Cyrillic),
    ("bn", ScriptId::Bengali),
    ("el", ScriptId::Greek),
    ("fa", ScriptId::Arabic),
    ("gu", ScriptId::Gujarati),
    ("he", ScriptId::Hebrew),
    ("hi", ScriptId::Devanagari),
    ("hy", ScriptId::Armenian),
    ("ja", ScriptId::Cjk),
    ("ka", ScriptId::Georgian),
    ("kk", ScriptId::Cyrillic),
    ("kn", ScriptId::Kannada),
    ("ko", ScriptId::Hangul),
    ("mk", ScriptId::Cyrillic),
    ("ml", ScriptId::Malayalam),
    ("mn", ScriptId::Cyrillic),
    ("mr", ScriptId::Devanagari),
    ("ne", ScriptId::Devanagari),
    ("ps", ScriptId::Arabic),
    ("ru", ScriptId::Cyrillic),
    ("sr", ScriptId::Cyrillic),
    ("ta", ScriptId::Tamil),
    ("te", ScriptId::Telugu),
    ("th", ScriptId::Thai),
    ("uk", ScriptId::Cyrillic),
    ("ur", ScriptId::Arabic),
    ("yi", ScriptId::Hebrew),
    ("zh", ScriptId::Cjk),
];

pub fn expected_script(lang: &str) -> Option<ScriptId> {
    EXPECTED_SCRIPTS
        .binary_search_by(|(l, _)| (*l).cmp(lang))
        .ok()
        .map(|i| EXPECTED_SCRIPTS[i].1)
}

/// A name is pre-romanised when its language expects a non-Latin script
/// but the name itself is Latin.
pub fn is_pre_romanised(lang: Option<&str>, script: ScriptId) -> bool {
    script == ScriptId::Latin && lang.and_then(expected_script).is_some_and(|s| s != ScriptId::Latin)
}

fn normalise_lang(lang: Option<String>) -> Option<String> {
    lang.map(|l| l.trim().to_ascii_lowercase())
        .filter(|l| !l.is_empty() && l != "und" && l != "unk")
}

/// Reads JSON-lines place documents; `#` lines are comments. Unparseable lines and empty names are
/// skipped and counted; a stream where nothing parses is rejected as the
/// wrong format.
pub fn ingest<R: BufRead>(reader: R) -> Result<(ToponymStore, IngestReport)> {
    let mut store = ToponymStore::new();
    let mut report = IngestReport::default();
    let mut parsed_docs = 0usize;
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(format!("<input line {}>", n + 1), e))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        report.lines += 1;
        let doc: PlaceDoc = match serde_json::from_str(&line) {
            Ok(d) => d,
            Err(_) => {
                report.malformed += 1;
                continue;
            }
        };
        parsed_docs += 1;
        let namespace = Namespace::parse(&doc.namespace);
        for t in doc.toponyms {
            let name = t.name.trim().to_string();
            let Ok(script) = detect_script(&name) else {
                report.malformed += 1;
                continue;
            };
            let lang = normalise_lang(t.lang);
            if is_pre_romanised(lang.as_deref(), script) {
                *report
                    .filtered
                    .entry((lang.clone().unwrap_or_default(), script))
                    .or_default() += 1;
                continue;
            }
            store.push(doc.place_id, name, lang, script, namespace);
            report.kept += 1;
        }
    }
    if parsed_docs == 0 && report.malformed > 0 {
        return Err(Error::format("place documents", "no line matches the place document schema"));
    }
    Ok((store, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ingest_str(s: &str) -> Result<(ToponymStore, IngestReport)> {
        ingest(s.as_bytes())
    }

    #[test]
    fn expected_script_table_is_sorted() {
        assert!(EXPECTED_SCRIPTS.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn pre_romanised_names_are_filtered() {
        let src = r#"{"place_id": 1, "namespace": "gn", "toponyms": [{"name": "Zhongguo", "lang": "zh"}, {"name": "中国", "lang": "zh"}, {"name": "China", "lang": "en"}]}
{"place_id": 2, "namespace": "wd", "toponyms": [{"name": "Paris", "lang": "fr"}, {"name": "北京", "lang": "zh"}]}
not json
"#;
        let (store, report) = ingest_str(src).unwrap();
        assert_eq!(store.len(), 4);
        assert_eq!(report.malformed, 1);
        assert_eq!(report.filtered.get(&("zh".to_string(), ScriptId::Latin)), Some(&1));
        assert_eq!(store.get(1).unwrap().script, ScriptId::Latin);
        assert_eq!(store.places()[&2], vec![2, 3]);
        assert_eq!(store.get(3).unwrap().namespace, Namespace::Wd);
    }

    #[test]
    fn null_and_missing_lang_are_unknown() {
        let src = r#"{"place_id": 5, "namespace": "tgn", "toponyms": [{"name": "A", "lang": null}, {"name": "B"}, {"name": "C", "lang": "und"}]}"#;
        let (store, _) = ingest_str(src).unwrap();
        assert!(store.records().iter().all(|r| r.lang.is_none()));
    }

    #[test]
    fn wrong_format_is_rejected() {
        assert!(ingest_str("a,b,c\nd,e,f\n").is_err());
        assert!(ingest_str("").unwrap().0.is_empty());
    }
}
