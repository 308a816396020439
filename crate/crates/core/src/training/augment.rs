use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encoder::StudentInput;
use crate::error::{Error, Result};
use crate::script_kit::{ScriptId, Vocabulary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub apply_prob: f64,
    pub insert: f64,
    pub delete: f64,
    pub substitute: f64,
    pub transpose: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            apply_prob: 0.3,
            insert: 0.1,
            delete: 0.1,
            substitute: 0.05,
            transpose: 0.05,
        }
    }
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("apply_prob", self.apply_prob),
            ("insert", self.insert),
            ("delete", self.delete),
            ("substitute", self.substitute),
            ("transpose", self.transpose),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("noise.{name} must lie in [0, 1], got {p}")));
            }
        }
        Ok(())
    }
}

/// Operations in the order they are tried.
pub const NOISE_OPS: [&str; 4] = ["insert", "delete", "substitute", "transpose"];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NoiseReport {
    /// The noise branch was taken.
    pub applied: bool,
    /// Which operations fired, in [`NOISE_OPS`] order.
    pub ops: [bool; 4],
}

fn script_at(vocab: &Vocabulary, id: usize, fallback: ScriptId) -> ScriptId {
    vocab.token(id as u32).map_or(fallback, |t| t.script)
}

fn draw_from(vocab: &Vocabulary, script: ScriptId, rng: &mut impl Rng) -> Option<usize> {
    let part = vocab.partition(script);
    (!part.is_empty()).then(|| part[rng.gen_range(0..part.len())] as usize)
}

/// With probability `apply_prob`, tries insertion, deletion, substitution
/// and transposition as independent events in that order. New tokens come
/// from the vocabulary partition of the affected position's script (the
/// name-level script for ids without a token, e.g. UNK). Deletion is
/// skipped on single-token input.
pub fn apply_noise(input: &StudentInput, vocab: &Vocabulary, cfg: &NoiseConfig, rng: &mut impl Rng) -> (StudentInput, NoiseReport) {
    let fallback = input.script;
    let mut out = input.ids.clone();
    let wrap = |ids: Vec<usize>| StudentInput {
        ids,
        script: input.script,
        lang: input.lang,
    };
    let mut report = NoiseReport::default();
    if out.is_empty() || rng.gen::<f64>() >= cfg.apply_prob {
        return (wrap(out), report);
    }
    report.applied = true;
    if rng.gen::<f64>() < cfg.insert {
        report.ops[0] = true;
        let pos = rng.gen_range(0..=out.len());
        let neighbour = out[pos.min(out.len() - 1)];
        if let Some(tok) = draw_from(vocab, script_at(vocab, neighbour, fallback), rng) {
            out.insert(pos, tok);
        }
    }
    if rng.gen::<f64>() < cfg.delete {
        report.ops[1] = true;
        if out.len() > 1 {
            let pos = rng.gen_range(0..out.len());
            out.remove(pos);
        }
    }
    if rng.gen::<f64>() < cfg.substitute {
        report.ops[2] = true;
        let pos = rng.gen_range(0..out.len());
        if let Some(tok) = draw_from(vocab, script_at(vocab, out[pos], fallback), rng) {
            out[pos] = tok;
        }
    }
    if rng.gen::<f64>() < cfg.transpose {
        report.ops[3] = true;
        if out.len() > 1 {
            let pos = rng.gen_range(0..out.len() - 1);
            out.swap(pos, pos + 1);
        }
    }
    (wrap(out), report)
}

/// Replaces a known language index with 0 (unknown) with probability `p`.
pub fn language_dropout(lang: usize, p: f64, rng: &mut impl Rng) -> usize {
    let drop = rng.gen::<f64>() < p;
    if drop {
        0
    } else {
        lang
    }
}
