//! TSV artifacts of the corpus stages. Each file starts with
//! `# <magic> v1 config=<hash> seed=<seed> version=<code version>` and its
//! records are sorted.
//!
//! - toponyms: `id  place_id  namespace  lang  script  name` (`-` = unknown lang)
//! - pairs: `anchor_id  positive_id  similarity  script_a  script_b`
//! - triplets: `anchor_id  positive_id  negative_id  kind`

use super::negatives::{Triplet, TripletKind};
use super::pairs::PairRecord;
use super::record::{Namespace, ToponymStore};
use crate::artifact::{escape_field, split_header, unescape_field, Stamp};
use crate::error::{Error, Result};
use crate::script_kit::ScriptId;

pub const TOPONYMS_MAGIC: &str = "toponym-store";
pub const PAIRS_MAGIC: &str = "toponym-pairs";
pub const TRIPLETS_MAGIC: &str = "toponym-triplets";
pub const FORMAT_VERSION: u32 = 1;

fn header(magic: &str, stamp: &Stamp) -> String {
    format!("# {magic} v{FORMAT_VERSION} {}\n", stamp.render())
}

fn field<'a>(fields: &[&'a str], i: usize, what: &'static str, line: usize) -> Result<&'a str> {
    fields
        .get(i)
        .copied()
        .ok_or_else(|| Error::format(what, format!("line {line}: expected at least {} fields", i + 1)))
}

fn num<T: std::str::FromStr>(s: &str, what: &'static str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::format(what, format!("line {line}: bad number {s:?}")))
}

pub fn write_toponyms(store: &ToponymStore, stamp: &Stamp) -> String {
    let mut out = header(TOPONYMS_MAGIC, stamp);
    for r in store.records() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            r.id,
            r.place_id,
            r.namespace.as_str(),
            r.lang.as_deref().unwrap_or("-"),
            r.script.name(),
            escape_field(&r.name)
        ));
    }
    out
}

pub fn read_toponyms(text: &str) -> Result<ToponymStore> {
    let (_, lines) = split_header(text, TOPONYMS_MAGIC, FORMAT_VERSION)?;
    let mut store = ToponymStore::new();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let f: Vec<&str> = line.split('\t').collect();
        let id: u64 = num(field(&f, 0, TOPONYMS_MAGIC, n)?, TOPONYMS_MAGIC, n)?;
        if id != store.len() as u64 {
            return Err(Error::format(TOPONYMS_MAGIC, format!("line {n}: ids must be dense and ascending")));
        }
        let place_id = num(field(&f, 1, TOPONYMS_MAGIC, n)?, TOPONYMS_MAGIC, n)?;
        let namespace = Namespace::parse(field(&f, 2, TOPONYMS_MAGIC, n)?);
        let lang = match field(&f, 3, TOPONYMS_MAGIC, n)? {
            "-" => None,
            l => Some(l.to_string()),
        };
        let script: ScriptId = field(&f, 4, TOPONYMS_MAGIC, n)?.parse()?;
        let name = unescape_field(field(&f, 5, TOPONYMS_MAGIC, n)?)
            .ok_or_else(|| Error::format(TOPONYMS_MAGIC, format!("line {n}: bad escape")))?;
        store.push(place_id, name, lang, script, namespace);
    }
    Ok(store)
}

pub fn write_pairs(pairs: &[PairRecord], stamp: &Stamp) -> String {
    let mut sorted: Vec<&PairRecord> = pairs.iter().collect();
    sorted.sort_by_key(|p| (p.anchor_id, p.positive_id));
    let mut out = header(PAIRS_MAGIC, stamp);
    for p in sorted {
        out.push_str(&format!(
            "{}\t{}\t{:.6}\t{}\t{}\n",
            p.anchor_id,
            p.positive_id,
            p.similarity,
            p.script_a.name(),
            p.script_b.name()
        ));
    }
    out
}

pub fn read_pairs(text: &str) -> Result<Vec<PairRecord>> {
    let (_, lines) = split_header(text, PAIRS_MAGIC, FORMAT_VERSION)?;
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let f: Vec<&str> = line.split('\t').collect();
        out.push(PairRecord {
            anchor_id: num(field(&f, 0, PAIRS_MAGIC, n)?, PAIRS_MAGIC, n)?,
            positive_id: num(field(&f, 1, PAIRS_MAGIC, n)?, PAIRS_MAGIC, n)?,
            similarity: num(field(&f, 2, PAIRS_MAGIC, n)?, PAIRS_MAGIC, n)?,
            script_a: field(&f, 3, PAIRS_MAGIC, n)?.parse()?,
            script_b: field(&f, 4, PAIRS_MAGIC, n)?.parse()?,
        });
    }
    Ok(out)
}

pub fn write_triplets(triplets: &[Triplet], stamp: &Stamp) -> String {
    let mut sorted = triplets.to_vec();
    sorted.sort();
    let mut out = header(TRIPLETS_MAGIC, stamp);
    for t in sorted {
        out.push_str(&format!("{}\t{}\t{}\t{}\n", t.anchor, t.positive, t.negative, t.kind.as_str()));
    }
    out
}

pub fn read_triplets(text: &str) -> Result<Vec<Triplet>> {
    let (_, lines) = split_header(text, TRIPLETS_MAGIC, FORMAT_VERSION)?;
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let f: Vec<&str> = line.split('\t').collect();
        let kind = field(&f, 3, TRIPLETS_MAGIC, n)?;
        out.push(Triplet {
            anchor: num(field(&f, 0, TRIPLETS_MAGIC, n)?, TRIPLETS_MAGIC, n)?,
            positive: num(field(&f, 1, TRIPLETS_MAGIC, n)?, TRIPLETS_MAGIC, n)?,
            negative: num(field(&f, 2, TRIPLETS_MAGIC, n)?, TRIPLETS_MAGIC, n)?,
            kind: TripletKind::parse(kind)
                .ok_or_else(|| Error::format(TRIPLETS_MAGIC, format!("line {n}: unknown kind {kind:?}")))?,
        });
    }
    Ok(out)
}
