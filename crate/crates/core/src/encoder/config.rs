use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phonetics::FEATURE_DIM;

pub const EMBED_DIM: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncoderConfig {
    pub char_dim: usize,
    pub script_dim: usize,
    pub lang_dim: usize,
    /// Recurrent width per direction.
    pub hidden: usize,
    pub heads: usize,
    /// Longer inputs are truncated.
    pub max_len: usize,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            char_dim: 96,
            script_dim: 16,
            lang_dim: 16,
            hidden: 128,
            heads: 4,
            max_len: 512,
        }
    }
}

impl EncoderConfig {
    /// Small trunk used for finite-difference checks.
    pub fn tiny() -> Self {
        Self {
            char_dim: 4,
            script_dim: 2,
            lang_dim: 2,
            hidden: 4,
            heads: 2,
            max_len: 512,
        }
    }

    /// Per-position width entering the trunk, shared by both encoders.
    pub fn input_width(&self) -> usize {
        self.char_dim + self.script_dim + self.lang_dim
    }

    pub fn trunk_width(&self) -> usize {
        2 * self.hidden
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("encoder: {m}")));
        if self.char_dim == 0 || self.hidden == 0 || self.heads == 0 || self.max_len == 0 {
            return bad("char_dim, hidden, heads and max_len must be positive".into());
        }
        if self.trunk_width() % self.heads != 0 {
            return bad(format!("heads ({}) must divide 2*hidden ({})", self.heads, self.trunk_width()));
        }
        Ok(())
    }

    /// Closed-form count of the shared trunk.
    pub fn trunk_param_count(&self) -> usize {
        let (p, h, w) = (self.input_width(), self.hidden, self.trunk_width());
        let lstm = 2 * (p * 4 * h + h * 4 * h + 4 * h);
        let attention = 4 * (w * w + w);
        let pooling = w * w + w + w;
        let output = w * EMBED_DIM + EMBED_DIM;
        lstm + attention + pooling + output
    }

    pub fn teacher_param_count(&self) -> usize {
        FEATURE_DIM * self.input_width() + self.input_width() + self.trunk_param_count()
    }

    pub fn student_param_count(&self, vocab_size: usize, languages: usize) -> usize {
        vocab_size * self.char_dim
            + crate::script_kit::ScriptId::COUNT * self.script_dim
            + (languages + 1) * self.lang_dim
            + self.trunk_param_count()
    }
}
