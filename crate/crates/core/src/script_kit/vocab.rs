//! Script-partitioned character vocabulary.
//!
//! File layout (UTF-8, `\n` line ends):
//!
//! ```text
//! # toponym-vocab v1 <artifact stamp>
//! <id>\t<SCRIPT>\t<token>
//! ```
//!
//! Records are sorted by id. Ids 0 and 1 are the reserved `PAD` and `UNK`
//! entries with script field `RESERVED`. Tokens escape `\\`, `\t`, `\n` and
//! `\r` with a backslash. The vocabulary hash is the SHA-256 of the record
//! lines only, so it does not depend on the stamp.

use std::collections::{BTreeSet, HashMap};

use sha2::{Digest, Sha256};

use super::hangul;
use super::preprocess::{preprocess, Token, TokenSeq};
use super::romanise::Romaniser;
use super::script::{script_of, ScriptId};
use crate::artifact::{escape_field as escape, unescape_field as unescape, Stamp};
use crate::error::{Error, Result};

pub const VOCAB_VERSION: u32 = 1;
pub const PAD: u32 = 0;
pub const UNK: u32 = 1;

#[derive(Debug, Clone)]
pub struct Vocabulary {
    /// Index `id - 2` holds the token with that id.
    tokens: Vec<Token>,
    index: HashMap<(ScriptId, String), u32>,
    partitions: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Copy)]
pub struct VocabOptions {
    /// Add every letter of each observed script, not just the observed ones.
    pub expand_ranges: bool,
}

impl Default for VocabOptions {
    fn default() -> Self {
        Self { expand_ranges: true }
    }
}

impl Vocabulary {
    /// Single streaming pass over `names`.
    pub fn build<I, S>(names: I, options: VocabOptions) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut seen: BTreeSet<(ScriptId, String)> = BTreeSet::new();
        let mut any = false;
        for name in names {
            let name = name.as_ref();
            if name.is_empty() {
                continue;
            }
            any = true;
            for t in preprocess(name).tokens {
                seen.insert((t.script, t.text));
            }
        }
        if !any {
            return Err(Error::EmptyCorpus);
        }
        if options.expand_ranges {
            let observed: BTreeSet<ScriptId> = seen.iter().map(|(s, _)| *s).collect();
            for script in observed {
                for tok in script_alphabet(script) {
                    seen.insert((script, tok));
                }
            }
        }
        Ok(Self::from_sorted(seen.into_iter().map(|(script, text)| Token { text, script }).collect()))
    }

    fn from_sorted(tokens: Vec<Token>) -> Self {
        let mut index = HashMap::with_capacity(tokens.len());
        let mut partitions = vec![Vec::new(); ScriptId::COUNT];
        for (i, t) in tokens.iter().enumerate() {
            let id = i as u32 + 2;
            index.insert((t.script, t.text.clone()), id);
            partitions[t.script.index()].push(id);
        }
        Self {
            tokens,
            index,
            partitions,
        }
    }

    /// Total size including `PAD` and `UNK`.
    pub fn len(&self) -> usize {
        self.tokens.len() + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn id(&self, script: ScriptId, text: &str) -> u32 {
        self.index.get(&(script, text.to_string())).copied().unwrap_or(UNK)
    }

    pub fn token(&self, id: u32) -> Option<&Token> {
        id.checked_sub(2).and_then(|i| self.tokens.get(i as usize))
    }

    /// Token ids (with `UNK` fallback) of a preprocessed sequence.
    pub fn encode(&self, seq: &TokenSeq) -> Vec<u32> {
        seq.tokens.iter().map(|t| self.id(t.script, &t.text)).collect()
    }

    /// Ids of all tokens tagged with `script`, ascending.
    pub fn partition(&self, script: ScriptId) -> &[u32] {
        &self.partitions[script.index()]
    }

    pub fn count_by_script(&self) -> Vec<(ScriptId, usize)> {
        ScriptId::ALL
            .iter()
            .map(|&s| (s, self.partitions[s.index()].len()))
            .filter(|&(_, n)| n > 0)
            .collect()
    }

    fn record_lines(&self) -> String {
        let mut out = String::new();
        out.push_str("0\tRESERVED\t<pad>\n1\tRESERVED\t<unk>\n");
        for (i, t) in self.tokens.iter().enumerate() {
            out.push_str(&format!("{}\t{}\t{}\n", i + 2, t.script.name(), escape(&t.text)));
        }
        out
    }

    /// SHA-256 of the record lines, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.record_lines().as_bytes()))
    }

    pub fn to_file_string(&self, stamp: &Stamp) -> String {
        format!("# toponym-vocab v{VOCAB_VERSION} {}\n{}", stamp.render(), self.record_lines())
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut lines = src.lines();
        let header = lines.next().unwrap_or_default();
        let version = header
            .strip_prefix("# toponym-vocab v")
            .and_then(|rest| rest.split_whitespace().next())
            .and_then(|v| v.parse::<u32>().ok())
            .ok_or_else(|| Error::format("vocabulary", "missing version header"))?;
        if version != VOCAB_VERSION {
            return Err(Error::VersionMismatch {
                what: "vocabulary",
                found: version,
                expected: VOCAB_VERSION,
            });
        }
        let mut tokens = Vec::new();
        for (n, line) in lines.enumerate() {
            let bad = |why: &str| Error::format("vocabulary", format!("record {n}: {why}"));
            let mut fields = line.splitn(3, '\t');
            let (Some(id), Some(script), Some(tok)) = (fields.next(), fields.next(), fields.next()) else {
                return Err(bad("expected three tab-separated fields"));
            };
            let id: usize = id.parse().map_err(|_| bad("bad id"))?;
            if id != n {
                return Err(bad("ids must be dense and ascending"));
            }
            if id < 2 {
                if script != "RESERVED" {
                    return Err(bad("ids 0 and 1 are reserved"));
                }
                continue;
            }
            tokens.push(Token {
                text: unescape(tok).ok_or_else(|| bad("bad escape"))?,
                script: script.parse()?,
            });
        }
        Ok(Self::from_sorted(tokens))
    }
}

/// Every token a script can produce after preprocessing.
pub fn script_alphabet(script: ScriptId) -> Vec<String> {
    match script {
        ScriptId::Hangul => hangul::compatibility_jamo().map(String::from).collect(),
        ScriptId::Other => Vec::new(),
        s if s.is_romanised_in_vocab() => {
            let romaniser = Romaniser::bundled();
            let mut set = BTreeSet::new();
            for &(lo, hi) in s.ranges() {
                for c in (lo..=hi).filter_map(char::from_u32) {
                    if let Some(v) = romaniser.char_value(c) {
                        set.extend(v.chars().map(String::from));
                    }
                }
            }
            set.into_iter().collect()
        }
        s => {
            let mut out = Vec::new();
            for &(lo, hi) in s.ranges() {
                for c in (lo..=hi).filter_map(char::from_u32) {
                    if !c.is_alphanumeric() || script_of(c) != s {
                        continue;
                    }
                    // Only code points that survive preprocessing unchanged.
                    let t = preprocess(&c.to_string());
                    if t.tokens.len() == 1 && t.tokens[0].text.chars().eq(std::iter::once(c)) {
                        out.push(c.to_string());
                    }
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_vocabulary_without_expansion() {
        let v = Vocabulary::build(["ab"], VocabOptions { expand_ranges: false }).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(v.id(ScriptId::Latin, "a"), 2);
        assert_eq!(v.id(ScriptId::Latin, "b"), 3);
        assert_eq!(v.id(ScriptId::Latin, "z"), UNK);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let none: [&str; 0] = [];
        assert!(matches!(
            Vocabulary::build(none, VocabOptions::default()),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn hangul_expansion_covers_every_jamo() {
        let v = Vocabulary::build(["서울"], VocabOptions::default()).unwrap();
        assert_eq!(v.partition(ScriptId::Hangul).len(), 51);
        for c in hangul::compatibility_jamo() {
            assert_ne!(v.id(ScriptId::Hangul, &c.to_string()), UNK);
        }
    }

    #[test]
    fn expansion_covers_unseen_letters_of_observed_scripts_only() {
        let v = Vocabulary::build(["Москва"], VocabOptions::default()).unwrap();
        assert_ne!(v.id(ScriptId::Cyrillic, "ж"), UNK);
        assert_ne!(v.id(ScriptId::Cyrillic, "ї"), UNK);
        assert_eq!(v.id(ScriptId::Cyrillic, "Ж"), UNK, "upper case never reaches the vocabulary");
        assert!(v.partition(ScriptId::Greek).is_empty());
    }

    #[test]
    fn same_letter_in_different_partitions_gets_different_ids() {
        let v = Vocabulary::build(["b", "北"], VocabOptions { expand_ranges: false }).unwrap();
        assert_ne!(v.id(ScriptId::Latin, "b"), v.id(ScriptId::Cjk, "b"));
    }

    #[test]
    fn file_round_trip_preserves_ids_and_hash() {
        let v = Vocabulary::build(["Zürich", "서울", "a\tb", "x\\y"], VocabOptions::default()).unwrap();
        let text = v.to_file_string(&Stamp::new("cfg", 7));
        let back = Vocabulary::parse(&text).unwrap();
        assert_eq!(back.len(), v.len());
        assert_eq!(back.hash(), v.hash());
        for id in 2..v.len() as u32 {
            let t = v.token(id).unwrap();
            assert_eq!(back.id(t.script, &t.text), id);
        }
    }

    #[test]
    fn version_mismatch_is_reported() {
        let err = Vocabulary::parse("# toponym-vocab v2 x\n").unwrap_err();
        assert!(matches!(err, Error::VersionMismatch { found: 2, .. }));
    }
}
