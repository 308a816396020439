use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Writing-system category of a code point or of a whole name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ScriptId {
    Latin,
    Cyrillic,
    Greek,
    Arabic,
    Hebrew,
    Devanagari,
    Bengali,
    Tamil,
    Telugu,
    Malayalam,
    Kannada,
    Gujarati,
    Thai,
    Georgian,
    Armenian,
    Cjk,
    Hiragana,
    Katakana,
    Hangul,
    Other,
}

impl ScriptId {
    pub const COUNT: usize = 20;

    pub const ALL: [ScriptId; Self::COUNT] = [
        ScriptId::Latin,
        ScriptId::Cyrillic,
        ScriptId::Greek,
        ScriptId::Arabic,
        ScriptId::Hebrew,
        ScriptId::Devanagari,
        ScriptId::Bengali,
        ScriptId::Tamil,
        ScriptId::Telugu,
        ScriptId::Malayalam,
        ScriptId::Kannada,
        ScriptId::Gujarati,
        ScriptId::Thai,
        ScriptId::Georgian,
        ScriptId::Armenian,
        ScriptId::Cjk,
        ScriptId::Hiragana,
        ScriptId::Katakana,
        ScriptId::Hangul,
        ScriptId::Other,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<ScriptId> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            ScriptId::Latin => "LATIN",
            ScriptId::Cyrillic => "CYRILLIC",
            ScriptId::Greek => "GREEK",
            ScriptId::Arabic => "ARABIC",
            ScriptId::Hebrew => "HEBREW",
            ScriptId::Devanagari => "DEVANAGARI",
            ScriptId::Bengali => "BENGALI",
            ScriptId::Tamil => "TAMIL",
            ScriptId::Telugu => "TELUGU",
            ScriptId::Malayalam => "MALAYALAM",
            ScriptId::Kannada => "KANNADA",
            ScriptId::Gujarati => "GUJARATI",
            ScriptId::Thai => "THAI",
            ScriptId::Georgian => "GEORGIAN",
            ScriptId::Armenian => "ARMENIAN",
            ScriptId::Cjk => "CJK",
            ScriptId::Hiragana => "HIRAGANA",
            ScriptId::Katakana => "KATAKANA",
            ScriptId::Hangul => "HANGUL",
            ScriptId::Other => "OTHER",
        }
    }

    /// Scripts with upper/lower case pairs; only these are case folded.
    pub fn is_bicameral(self) -> bool {
        matches!(
            self,
            ScriptId::Latin | ScriptId::Cyrillic | ScriptId::Greek | ScriptId::Armenian | ScriptId::Georgian
        )
    }

    /// Scripts whose characters are replaced by their ASCII transliteration
    /// during preprocessing.
    pub fn is_romanised_in_vocab(self) -> bool {
        matches!(self, ScriptId::Cjk | ScriptId::Hiragana | ScriptId::Katakana)
    }

    /// Hard-coded code point blocks belonging to this script.
    pub fn ranges(self) -> &'static [(u32, u32)] {
        RANGES
            .iter()
            .find(|(s, _)| *s == self)
            .map(|(_, r)| *r)
            .unwrap_or(&[])
    }
}

impl fmt::Display for ScriptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScriptId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScriptId::ALL
            .iter()
            .copied()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::format("script", format!("unknown script name {s:?}")))
    }
}

const RANGES: &[(ScriptId, &[(u32, u32)])] = &[
    (
        ScriptId::Latin,
        &[
            (0x0041, 0x005A),
            (0x0061, 0x007A),
            (0x00AA, 0x00AA),
            (0x00BA, 0x00BA),
            (0x00C0, 0x00D6),
            (0x00D8, 0x00F6),
            (0x00F8, 0x024F),
            (0x0250, 0x02AF),
            (0x1D00, 0x1D7F),
            (0x1E00, 0x1EFF),
            (0x2C60, 0x2C7F),
            (0xA720, 0xA7FF),
            (0xAB30, 0xAB6F),
            (0xFF21, 0xFF3A),
            (0xFF41, 0xFF5A),
        ],
    ),
    (ScriptId::Greek, &[(0x0370, 0x03FF), (0x1F00, 0x1FFF)]),
    (
        ScriptId::Cyrillic,
        &[(0x0400, 0x052F), (0x1C80, 0x1C8F), (0x2DE0, 0x2DFF), (0xA640, 0xA69F)],
    ),
    (ScriptId::Armenian, &[(0x0530, 0x058F), (0xFB13, 0xFB17)]),
    (ScriptId::Hebrew, &[(0x0590, 0x05FF), (0xFB1D, 0xFB4F)]),
    (
        ScriptId::Arabic,
        &[
            (0x0600, 0x06FF),
            (0x0750, 0x077F),
            (0x08A0, 0x08FF),
            (0xFB50, 0xFDFF),
            (0xFE70, 0xFEFF),
        ],
    ),
    (ScriptId::Devanagari, &[(0x0900, 0x097F), (0xA8E0, 0xA8FF)]),
    (ScriptId::Bengali, &[(0x0980, 0x09FF)]),
    (ScriptId::Gujarati, &[(0x0A80, 0x0AFF)]),
    (ScriptId::Tamil, &[(0x0B80, 0x0BFF)]),
    (ScriptId::Telugu, &[(0x0C00, 0x0C7F)]),
    (ScriptId::Kannada, &[(0x0C80, 0x0CFF)]),
    (ScriptId::Malayalam, &[(0x0D00, 0x0D7F)]),
    (ScriptId::Thai, &[(0x0E00, 0x0E7F)]),
    (
        ScriptId::Georgian,
        &[(0x10A0, 0x10FF), (0x1C90, 0x1CBF), (0x2D00, 0x2D2F)],
    ),
    (
        ScriptId::Hangul,
        &[
            (0x1100, 0x11FF),
            (0x3130, 0x318F),
            (0xA960, 0xA97F),
            (0xAC00, 0xD7A3),
            (0xD7B0, 0xD7FF),
            (0xFFA0, 0xFFDC),
        ],
    ),
    (ScriptId::Hiragana, &[(0x3040, 0x309F)]),
    (
        ScriptId::Katakana,
        &[(0x30A0, 0x30FF), (0x31F0, 0x31FF), (0xFF66, 0xFF9F)],
    ),
    (
        ScriptId::Cjk,
        &[
            (0x2E80, 0x2FDF),
            (0x3000, 0x303F),
            (0x3400, 0x4DBF),
            (0x4E00, 0x9FFF),
            (0xF900, 0xFAFF),
            (0x20000, 0x2FA1F),
        ],
    ),
];

/// Script of a single code point. Total: anything outside the hard-coded
/// blocks is [`ScriptId::Other`].
pub fn script_of(c: char) -> ScriptId {
    let cp = c as u32;
    if cp < 0x80 {
        return if c.is_ascii_alphabetic() {
            ScriptId::Latin
        } else {
            ScriptId::Other
        };
    }
    for (script, ranges) in RANGES {
        if ranges.iter().any(|&(lo, hi)| (lo..=hi).contains(&cp)) {
            return *script;
        }
    }
    ScriptId::Other
}

/// Whether `c` counts towards the majority vote of [`detect_script`].
fn is_scriptful(c: char) -> bool {
    c.is_alphanumeric() && script_of(c) != ScriptId::Other
}

/// Majority script over the scriptful characters of `text`; ties go to the
/// script seen first. Names without any scriptful character are `Other`.
pub fn detect_script(text: &str) -> Result<ScriptId> {
    if text.is_empty() {
        return Err(Error::EmptyToponym);
    }
    let mut counts = [0usize; ScriptId::COUNT];
    let mut first_seen = [usize::MAX; ScriptId::COUNT];
    for (pos, c) in text.chars().enumerate() {
        if !is_scriptful(c) {
            continue;
        }
        let s = script_of(c).index();
        counts[s] += 1;
        if first_seen[s] == usize::MAX {
            first_seen[s] = pos;
        }
    }
    let best = (0..ScriptId::COUNT)
        .filter(|&s| counts[s] > 0)
        .max_by(|&a, &b| counts[a].cmp(&counts[b]).then(first_seen[b].cmp(&first_seen[a])));
    Ok(best.and_then(ScriptId::from_index).unwrap_or(ScriptId::Other))
}
