//! Diagnostic pair suite. File format:
//!
//! ```text
//! # toponym-diagnostics v1
//! <category>\t<name_a>\t<lang_a>\t<name_b>\t<lang_b>
//! ```
//!
//! `lang` may be `-` for unknown.

use std::fmt::Write;

use crate::encoder::{cosine, Student};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::script_kit::Vocabulary;

pub const BUNDLED_DIAGNOSTICS: &str = include_str!("../../data/diagnostics.tsv");
pub const MATCH_THRESHOLD: f64 = 0.85;
pub const SEPARATION_THRESHOLD: f64 = 0.50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    CrossScript,
    SameScript,
    Unrelated,
    Diacritic,
}

impl Category {
    pub const ALL: [Category; 4] = [Category::CrossScript, Category::SameScript, Category::Unrelated, Category::Diacritic];

    pub fn name(self) -> &'static str {
        match self {
            Category::CrossScript => "cross-script",
            Category::SameScript => "same-script-cross-language",
            Category::Unrelated => "unrelated",
            Category::Diacritic => "diacritic",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }

    /// `None` for the informational category.
    pub fn passes(self, cos: f64) -> Option<bool> {
        match self {
            Category::CrossScript | Category::Diacritic => Some(cos >= MATCH_THRESHOLD),
            Category::Unrelated => Some(cos < SEPARATION_THRESHOLD),
            Category::SameScript => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticPair {
    pub category: Category,
    pub name_a: String,
    pub lang_a: Option<String>,
    pub name_b: String,
    pub lang_b: Option<String>,
}

pub fn parse_pairs(src: &str) -> Result<Vec<DiagnosticPair>> {
    let lang = |s: &str| (s != "-" && !s.is_empty()).then(|| s.to_string());
    let mut out = Vec::new();
    for (n, line) in src.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let bad = |why: &str| Error::format("diagnostics", format!("line {}: {why}", n + 1));
        if f.len() != 5 {
            return Err(bad("expected five tab-separated fields"));
        }
        out.push(DiagnosticPair {
            category: Category::parse(f[0]).ok_or_else(|| bad("unknown category"))?,
            name_a: f[1].to_string(),
            lang_a: lang(f[2]),
            name_b: f[3].to_string(),
            lang_b: lang(f[4]),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticResult {
    pub pair: DiagnosticPair,
    pub cosine: f64,
    pub passed: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticReport {
    pub results: Vec<DiagnosticResult>,
}

impl DiagnosticReport {
    /// `(passed, total)`; `passed` is `None` for the informational category.
    pub fn tally(&self, c: Category) -> (Option<usize>, usize) {
        let rows: Vec<&DiagnosticResult> = self.results.iter().filter(|r| r.pair.category == c).collect();
        let passed = c.passes(0.0).map(|_| rows.iter().filter(|r| r.passed == Some(true)).count());
        (passed, rows.len())
    }

    /// `category passed total` lines; `-` marks the informational category.
    pub fn summary_tsv(&self) -> String {
        let mut out = String::new();
        for c in Category::ALL {
            let (passed, total) = self.tally(c);
            let passed = passed.map_or_else(|| "-".to_string(), |p| p.to_string());
            let _ = writeln!(out, "{}\t{passed}\t{total}", c.name());
        }
        out
    }

    pub fn pairs_tsv(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let verdict = match r.passed {
                Some(true) => "pass",
                Some(false) => "fail",
                None => "info",
            };
            let _ = writeln!(out, "{}\t{}\t{}\t{:.4}\t{verdict}", r.pair.category.name(), r.pair.name_a, r.pair.name_b, r.cosine);
        }
        out
    }
}

pub fn run_diagnostics<S: Scalar>(student: &Student<S>, vocab: &Vocabulary, pairs: &[DiagnosticPair]) -> Result<DiagnosticReport> {
    let mut results = Vec::with_capacity(pairs.len());
    for p in pairs {
        let a = student.embed_text(vocab, &p.name_a, p.lang_a.as_deref())?;
        let b = student.embed_text(vocab, &p.name_b, p.lang_b.as_deref())?;
        let cos = cosine(&a, &b).as_f64();
        results.push(DiagnosticResult {
            pair: p.clone(),
            cosine: cos,
            passed: p.category.passes(cos),
        });
    }
    Ok(DiagnosticReport { results })
}
