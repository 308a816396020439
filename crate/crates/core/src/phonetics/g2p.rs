//! Longest-match rule transcription.
//!
//! Table format, one rule per line:
//!
//! ```text
//! # toponym-g2p v1 <lang>
//! @<class>\t<characters>
//! <graphemes>\t<segments or ->\t[<left>_<right>]
//! ```
//!
//! At each position the longest grapheme with a satisfied context wins;
//! equal lengths are tried in file order. A context side is empty (any),
//! `#` (string edge or non-letter) or `@class` (neighbouring character is
//! in the class). Characters no rule covers are skipped.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use super::features::IpaSeq;
use crate::error::{Error, Result};
use crate::script_kit::preprocess;

const BUNDLED: &[(&str, &str)] = &[
    ("de", include_str!("../../data/g2p/de.tsv")),
    ("el", include_str!("../../data/g2p/el.tsv")),
    ("es", include_str!("../../data/g2p/es.tsv")),
    ("it", include_str!("../../data/g2p/it.tsv")),
    ("ka", include_str!("../../data/g2p/ka.tsv")),
    ("ko", include_str!("../../data/g2p/ko.tsv")),
    ("ru", include_str!("../../data/g2p/ru.tsv")),
    ("uk", include_str!("../../data/g2p/uk.tsv")),
];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Ctx {
    Any,
    Edge,
    Class(Vec<char>),
}

impl Ctx {
    fn matches(&self, c: Option<char>) -> bool {
        match self {
            Ctx::Any => true,
            Ctx::Edge => c.is_none_or(|c| !c.is_alphabetic()),
            Ctx::Class(set) => c.is_some_and(|c| set.contains(&c)),
        }
    }
}

#[derive(Debug, Clone)]
struct Rule {
    graphemes: Vec<char>,
    segments: Vec<String>,
    left: Ctx,
    right: Ctx,
}

#[derive(Debug, Clone)]
pub struct RuleTable {
    lang: String,
    /// Rules keyed by first grapheme, longest first, then file order.
    rules: HashMap<char, Vec<Rule>>,
}

impl RuleTable {
    pub fn parse(src: &str) -> Result<Self> {
        let mut lines = src.lines().enumerate();
        let lang = lines
            .next()
            .and_then(|(_, h)| h.strip_prefix("# toponym-g2p v1 "))
            .map(|l| l.trim().to_string())
            .filter(|l| !l.is_empty())
            .ok_or_else(|| Error::Config("g2p table: missing `# toponym-g2p v1 <lang>` header".into()))?;
        let mut classes: HashMap<String, Vec<char>> = HashMap::new();
        let mut rules: HashMap<char, Vec<Rule>> = HashMap::new();
        for (n, line) in lines {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |why: &str| Error::Config(format!("g2p table {lang} line {}: {why}", n + 1));
            let fields: Vec<&str> = line.split('\t').collect();
            if let Some(name) = fields[0].strip_prefix('@') {
                let chars = fields.get(1).ok_or_else(|| bad("class without characters"))?;
                classes.insert(name.to_string(), chars.chars().collect());
                continue;
            }
            if fields.len() < 2 || fields.len() > 3 || fields[0].is_empty() {
                return Err(bad("expected `graphemes\\tsegments[\\tcontext]`"));
            }
            let segments = match fields[1].trim() {
                "-" => Vec::new(),
                s if s.is_empty() => return Err(bad("empty output; use `-`")),
                s => s.split(' ').map(str::to_string).collect(),
            };
            let (left, right) = match fields.get(2) {
                None => (Ctx::Any, Ctx::Any),
                Some(ctx) => {
                    let (l, r) = ctx.split_once('_').ok_or_else(|| bad("context needs `_`"))?;
                    (parse_ctx(l, &classes).ok_or_else(|| bad("unknown context"))?, parse_ctx(r, &classes).ok_or_else(|| bad("unknown context"))?)
                }
            };
            let graphemes: Vec<char> = fields[0].chars().collect();
            rules.entry(graphemes[0]).or_default().push(Rule {
                graphemes,
                segments,
                left,
                right,
            });
        }
        for list in rules.values_mut() {
            // Stable: equal lengths keep file order.
            list.sort_by(|a, b| b.graphemes.len().cmp(&a.graphemes.len()));
        }
        Ok(Self { lang, rules })
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }

    /// Applies the rules to already preprocessed text.
    pub fn apply(&self, text: &[char]) -> IpaSeq {
        let mut out = Vec::new();
        let mut i = 0;
        while i < text.len() {
            let prev = i.checked_sub(1).map(|j| text[j]);
            let chosen = self.rules.get(&text[i]).and_then(|list| {
                list.iter().find(|r| {
                    let end = i + r.graphemes.len();
                    end <= text.len()
                        && text[i..end] == r.graphemes[..]
                        && r.left.matches(prev)
                        && r.right.matches(text.get(end).copied())
                })
            });
            match chosen {
                Some(r) => {
                    out.extend(r.segments.iter().cloned());
                    i += r.graphemes.len();
                }
                None => i += 1,
            }
        }
        IpaSeq(out)
    }

    /// Every segment any rule can emit.
    pub fn segments(&self) -> impl Iterator<Item = &str> {
        self.rules.values().flatten().flat_map(|r| r.segments.iter().map(String::as_str))
    }
}

fn parse_ctx(s: &str, classes: &HashMap<String, Vec<char>>) -> Option<Ctx> {
    match s {
        "" => Some(Ctx::Any),
        "#" => Some(Ctx::Edge),
        s => classes.get(s.strip_prefix('@')?).map(|c| Ctx::Class(c.clone())),
    }
}

/// Rule tables per language plus an overlay of precomputed transcriptions
/// keyed by toponym id.
#[derive(Debug, Clone, Default)]
pub struct G2pProvider {
    tables: BTreeMap<String, RuleTable>,
    overlay: HashMap<u64, IpaSeq>,
}

impl G2pProvider {
    pub fn bundled() -> &'static G2pProvider {
        static P: OnceLock<G2pProvider> = OnceLock::new();
        P.get_or_init(|| {
            let mut p = G2pProvider::default();
            for (_, src) in BUNDLED {
                p.add_table(RuleTable::parse(src).expect("bundled g2p tables are well formed"));
            }
            p
        })
    }

    pub fn add_table(&mut self, table: RuleTable) {
        self.tables.insert(table.lang.clone(), table);
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.tables.keys().map(String::as_str)
    }

    pub fn table(&self, lang: &str) -> Option<&RuleTable> {
        self.tables.get(lang)
    }

    /// Loads `toponym-id\tsegments` lines; later lines win.
    pub fn load_overlay(&mut self, src: &str) -> Result<usize> {
        let mut n = 0;
        for (i, line) in src.lines().enumerate() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let (id, ipa) = line
                .split_once('\t')
                .ok_or_else(|| Error::format("ipa overlay", format!("line {}: missing tab", i + 1)))?;
            let id: u64 = id
                .trim()
                .parse()
                .map_err(|_| Error::format("ipa overlay", format!("line {}: bad id", i + 1)))?;
            self.overlay.insert(id, IpaSeq::parse(ipa));
            n += 1;
        }
        Ok(n)
    }

    /// Overlay entry for `id` if any, else the rule table for `lang`, else
    /// `None` (unsupported).
    pub fn transcribe(&self, id: Option<u64>, text: &str, lang: Option<&str>) -> Option<IpaSeq> {
        if let Some(ipa) = id.and_then(|id| self.overlay.get(&id)) {
            return Some(ipa.clone());
        }
        let table = self.tables.get(lang?)?;
        let chars: Vec<char> = preprocess(text).reconstruct().chars().collect();
        Some(table.apply(&chars))
    }
}
