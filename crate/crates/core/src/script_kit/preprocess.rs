use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use super::hangul;
use super::romanise::Romaniser;
use super::script::{script_of, ScriptId};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub script: ScriptId,
}

impl Token {
    pub fn new(text: impl Into<String>, script: ScriptId) -> Self {
        Self {
            text: text.into(),
            script,
        }
    }
}

/// Per-character token stream of a name, each token tagged with the script
/// of the character it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSeq {
    pub tokens: Vec<Token>,
    pub source: String,
}

impl TokenSeq {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Concatenation of the token strings.
    pub fn reconstruct(&self) -> String {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }
}

/// Single-character case fold; multi-character lowercase expansions are
/// left untouched so every token stays one code point.
fn fold(c: char) -> char {
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

/// NFC, case folding for bicameral scripts, CJK/Kana romanisation into
/// ASCII letter tokens, Hangul syllables into compatibility Jamo.
pub fn preprocess(text: &str) -> TokenSeq {
    preprocess_with(Romaniser::bundled(), text)
}

pub fn preprocess_with(romaniser: &Romaniser, text: &str) -> TokenSeq {
    // Folding on the decomposed form keeps the result NFC-stable when
    // token strings are concatenated again.
    let normalized: String = text
        .nfd()
        .map(|c| if script_of(c).is_bicameral() { fold(c) } else { c })
        .nfc()
        .collect();
    let mut tokens = Vec::with_capacity(normalized.len());
    let mut after_romanised = false;
    for c in normalized.chars() {
        let script = script_of(c);
        if after_romanised && is_combining_mark(c) {
            continue;
        }
        after_romanised = false;
        match script {
            ScriptId::Hangul if hangul::is_syllable(c) => {
                for j in hangul::decompose(c).unwrap_or_default() {
                    tokens.push(Token::new(j, ScriptId::Hangul));
                }
            }
            s if s.is_romanised_in_vocab() => match romaniser.char_value(c) {
                Some(v) if !v.is_empty() => {
                    tokens.extend(v.chars().map(|a| Token::new(a, s)));
                    after_romanised = true;
                }
                _ => tokens.push(Token::new(c, s)),
            },
            s => tokens.push(Token::new(c, s)),
        }
    }
    TokenSeq {
        tokens,
        source: text.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(ts: &TokenSeq) -> Vec<&str> {
        ts.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    #[test]
    fn hangul_becomes_jamo() {
        let ts = preprocess("서울");
        assert_eq!(texts(&ts), vec!["ㅅ", "ㅓ", "ㅇ", "ㅜ", "ㄹ"]);
        assert!(ts.tokens.iter().all(|t| t.script == ScriptId::Hangul));
        assert_eq!(texts(&preprocess("가")), vec!["ㄱ", "ㅏ"]);
    }

    #[test]
    fn latin_is_folded_and_keeps_diacritics() {
        let ts = preprocess("Zürich");
        assert_eq!(texts(&ts), vec!["z", "ü", "r", "i", "c", "h"]);
        assert!(ts.tokens.iter().all(|t| t.script == ScriptId::Latin));
    }

    #[test]
    fn cjk_is_romanised_but_keeps_its_tag() {
        let ts = preprocess("北京");
        assert_eq!(ts.reconstruct(), "beijing");
        assert!(ts.tokens.iter().all(|t| t.script == ScriptId::Cjk));
    }

    #[test]
    fn unicameral_scripts_are_untouched() {
        let ts = preprocess("ירושלים");
        assert_eq!(ts.reconstruct(), "ירושלים");
        assert!(ts.tokens.iter().all(|t| t.script == ScriptId::Hebrew));
    }

    #[test]
    fn mixed_name_keeps_per_character_tags() {
        let ts = preprocess("Sankt-Петербург");
        assert_eq!(ts.tokens[0].script, ScriptId::Latin);
        assert_eq!(ts.tokens[5], Token::new("-", ScriptId::Other));
        assert_eq!(ts.tokens[6], Token::new("п", ScriptId::Cyrillic));
    }

    proptest::proptest! {
        #[test]
        fn token_stream_is_stable_under_reprocessing(s in "\\PC{1,12}") {
            let first = preprocess(&s);
            let second = preprocess(&first.reconstruct());
            let a: Vec<&str> = first.tokens.iter().map(|t| t.text.as_str()).collect();
            let b: Vec<&str> = second.tokens.iter().map(|t| t.text.as_str()).collect();
            proptest::prop_assert_eq!(a, b);
            proptest::prop_assert!(!first.is_empty());
        }
    }
}
