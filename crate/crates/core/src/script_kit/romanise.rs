//! Table-driven ASCII transliteration.
//!
//! The bundled table (`data/translit.tsv`) maps single code points to
//! lowercase ASCII strings. Format, one record per line:
//!
//! ```text
//! # toponym-translit v1
//! 00FC<TAB>u
//! ```
//!
//! The code point is upper-case hex without prefix; the value is `[a-z0-9]*`.
//! Lines starting with `#` are comments. Code points absent from the table
//! romanise to the empty string.

use std::collections::HashMap;
use std::sync::OnceLock;

use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

pub const TRANSLIT_VERSION: u32 = 1;

const BUNDLED_TABLE: &str = include_str!("../../data/translit.tsv");

#[derive(Debug, Clone)]
pub struct Romaniser {
    table: HashMap<char, Box<str>>,
}

impl Romaniser {
    pub fn bundled() -> &'static Romaniser {
        static BUNDLED: OnceLock<Romaniser> = OnceLock::new();
        BUNDLED.get_or_init(|| Romaniser::parse(BUNDLED_TABLE).expect("bundled transliteration table is valid"))
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut lines = src.lines();
        let header = lines.next().unwrap_or_default();
        let version = header
            .strip_prefix("# toponym-translit v")
            .and_then(|v| v.trim().parse::<u32>().ok())
            .ok_or_else(|| Error::format("transliteration table", "missing version header"))?;
        if version != TRANSLIT_VERSION {
            return Err(Error::VersionMismatch {
                what: "transliteration table",
                found: version,
                expected: TRANSLIT_VERSION,
            });
        }
        let mut table = HashMap::new();
        for (n, line) in lines.enumerate() {
            if line.starts_with('#') || line.is_empty() {
                continue;
            }
            let bad = || Error::format("transliteration table", format!("line {}: {line:?}", n + 2));
            let (cp, value) = line.split_once('\t').ok_or_else(bad)?;
            let c = u32::from_str_radix(cp, 16).ok().and_then(char::from_u32).ok_or_else(bad)?;
            if !value.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit()) {
                return Err(bad());
            }
            table.insert(c, value.into());
        }
        Ok(Self { table })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// ASCII replacement for a single non-ASCII code point, if tabled.
    pub fn char_value(&self, c: char) -> Option<&str> {
        self.table.get(&c).map(|s| &**s)
    }

    /// NFC-normalises, then maps every code point to lowercase ASCII.
    /// Idempotent, and the identity on lowercase printable ASCII.
    pub fn romanise(&self, text: &str) -> String {
        let mut out = String::with_capacity(text.len());
        for c in text.nfc() {
            if c.is_ascii() {
                if !c.is_ascii_control() {
                    out.push(c.to_ascii_lowercase());
                }
            } else if let Some(v) = self.table.get(&c) {
                out.push_str(v);
            }
        }
        out
    }
}

/// [`Romaniser::romanise`] with the bundled table.
pub fn romanise(text: &str) -> String {
    Romaniser::bundled().romanise(text)
}
