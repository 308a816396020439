//! Testset files, UTF-8 TSV with an optional `#` comment header:
//!
//! ```text
//! <name>.queries.tsv     query \t query_script \t truth_candidate_id
//! <name>.candidates.tsv  id \t name
//! ```

use std::collections::HashSet;
use std::fmt::Write;
use std::path::{Path, PathBuf};

use crate::artifact::read_text;
use crate::error::{Error, Result};
use crate::script_kit::ScriptId;

#[derive(Debug, Clone, PartialEq)]
pub struct TestQuery {
    pub text: String,
    pub script: Option<ScriptId>,
    pub truth: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Testset {
    pub name: String,
    pub queries: Vec<TestQuery>,
    pub candidates: Vec<(u64, String)>,
}

fn records(src: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    src.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(n, l)| (n + 1, l.split('\t').collect()))
}

impl Testset {
    pub fn parse(name: &str, queries: &str, candidates: &str) -> Result<Self> {
        let mut cands = Vec::new();
        let mut ids = HashSet::new();
        for (n, f) in records(candidates) {
            let bad = |why: &str| Error::format("testset", format!("{name}.candidates line {n}: {why}"));
            if f.len() != 2 {
                return Err(bad("expected `id\\tname`"));
            }
            let id: u64 = f[0].trim().parse().map_err(|_| bad("bad id"))?;
            if !ids.insert(id) {
                return Err(bad("duplicate id"));
            }
            cands.push((id, f[1].to_string()));
        }
        let mut qs = Vec::new();
        for (n, f) in records(queries) {
            let bad = |why: &str| Error::format("testset", format!("{name}.queries line {n}: {why}"));
            if f.len() != 3 {
                return Err(bad("expected `query\\tquery_script\\ttruth_candidate_id`"));
            }
            let script = match f[1].trim() {
                "" | "-" => None,
                s => Some(s.to_ascii_uppercase().parse().map_err(|_| bad("unknown script"))?),
            };
            let truth: u64 = f[2].trim().parse().map_err(|_| bad("bad truth id"))?;
            if !ids.contains(&truth) {
                return Err(bad("ground truth is not among the candidates"));
            }
            qs.push(TestQuery {
                text: f[0].to_string(),
                script,
                truth,
            });
        }
        if qs.is_empty() || cands.is_empty() {
            return Err(Error::EmptyTestset);
        }
        Ok(Self {
            name: name.to_string(),
            queries: qs,
            candidates: cands,
        })
    }

    pub fn paths(dir: &Path, name: &str) -> (PathBuf, PathBuf) {
        (dir.join(format!("{name}.queries.tsv")), dir.join(format!("{name}.candidates.tsv")))
    }

    pub fn load(dir: &Path, name: &str) -> Result<Self> {
        let (q, c) = Self::paths(dir, name);
        Self::parse(name, &read_text(&q, "evaluate")?, &read_text(&c, "evaluate")?)
    }

    /// Every `<name>` with both files present in `dir`, sorted.
    pub fn discover(dir: &Path) -> Result<Vec<String>> {
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut names = Vec::new();
        for e in entries {
            let e = e.map_err(|err| Error::io(dir, err))?;
            let file = e.file_name().to_string_lossy().into_owned();
            if let Some(name) = file.strip_suffix(".queries.tsv") {
                if Self::paths(dir, name).1.exists() {
                    names.push(name.to_string());
                }
            }
        }
        names.sort();
        Ok(names)
    }

    pub fn queries_tsv(&self) -> String {
        let mut out = String::from("# query\tquery_script\ttruth_candidate_id\n");
        for q in &self.queries {
            let script = q.script.map_or("-", |s| s.name());
            let _ = writeln!(out, "{}\t{script}\t{}", q.text, q.truth);
        }
        out
    }

    pub fn candidates_tsv(&self) -> String {
        let mut out = String::from("# id\tname\n");
        for (id, name) in &self.candidates {
            let _ = writeln!(out, "{id}\t{name}");
        }
        out
    }
}
