//! Converter from MEHDIE ground-truth exports to testset files.
//!
//! The benchmark ships one spreadsheet per testset pairing a Hebrew source
//! list with an Arabic one. Export each testset to a two-column UTF-8 TSV:
//!
//! | MEHDIE field                         | column | testset field         |
//! |--------------------------------------|--------|-----------------------|
//! | query-side toponym (e.g. Hebrew)     | 1      | `query`               |
//! | matched toponym on the other side    | 2      | candidate `name`      |
//!
//! Rows with an empty first column add a distractor candidate (a target
//! toponym without a ground-truth match). Candidate ids are assigned
//! densely in order of first appearance; the query script is detected from
//! the text. Lines starting with `#` are ignored.

use std::collections::HashMap;

use super::testset::{TestQuery, Testset};
use crate::error::{Error, Result};
use crate::script_kit::detect_script;

pub fn convert_pairs(name: &str, src: &str) -> Result<Testset> {
    let mut ids: HashMap<String, u64> = HashMap::new();
    let mut candidates = Vec::new();
    let mut queries = Vec::new();
    for (n, line) in src.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 2 || f[1].trim().is_empty() {
            return Err(Error::format("mehdie export", format!("line {}: expected `query\\tmatch`", n + 1)));
        }
        let target = f[1].trim().to_string();
        let id = *ids.entry(target.clone()).or_insert_with(|| {
            candidates.push((candidates.len() as u64 + 1, target));
            candidates.len() as u64
        });
        let query = f[0].trim();
        if !query.is_empty() {
            queries.push(TestQuery {
                text: query.to_string(),
                script: detect_script(query).ok(),
                truth: id,
            });
        }
    }
    if queries.is_empty() {
        return Err(Error::EmptyTestset);
    }
    Ok(Testset {
        name: name.to_string(),
        queries,
        candidates,
    })
}
