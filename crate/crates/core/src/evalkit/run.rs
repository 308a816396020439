use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::jaro::jaro_winkler;
use super::metrics::Metrics;
use super::testset::Testset;
use crate::corpus::norm_lev_sim;
use crate::encoder::Student;
use crate::error::{Error, Result};
use crate::nn::dot;
use crate::scalar::Scalar;
use crate::script_kit::{Romaniser, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StringMetric {
    Lev,
    Jw,
}

impl StringMetric {
    pub fn name(self) -> &'static str {
        match self {
            StringMetric::Lev => "lev",
            StringMetric::Jw => "jw",
        }
    }

    pub fn score(self, a: &str, b: &str) -> f64 {
        match self {
            StringMetric::Lev => norm_lev_sim(a, b),
            StringMetric::Jw => jaro_winkler(a, b),
        }
    }
}

impl std::str::FromStr for StringMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lev" | "levenshtein" => Ok(StringMetric::Lev),
            "jw" | "jaro-winkler" => Ok(StringMetric::Jw),
            other => Err(Error::Config(format!("unknown baseline metric `{other}` (use lev or jw)"))),
        }
    }
}

/// Rank of the truth among scored candidates under descending score,
/// ascending id; independent of candidate order.
pub fn rank_by_score<T: PartialOrd + Copy>(scored: &[(u64, T)], truth: u64) -> Option<usize> {
    let &(_, ts) = scored.iter().find(|(id, _)| *id == truth)?;
    let ahead = scored
        .iter()
        .filter(|&&(id, s)| s > ts || (s == ts && id < truth))
        .count();
    Some(ahead + 1)
}

/// String-similarity baseline on romanised forms.
pub fn run_baseline(ts: &Testset, metric: StringMetric, romaniser: &Romaniser) -> Result<Metrics> {
    if ts.queries.is_empty() || ts.candidates.is_empty() {
        return Err(Error::EmptyTestset);
    }
    let cands: Vec<(u64, String)> = ts.candidates.iter().map(|(id, n)| (*id, romaniser.romanise(n))).collect();
    let ranks: Vec<Option<usize>> = ts
        .queries
        .iter()
        .map(|q| {
            let rq = romaniser.romanise(&q.text);
            let scored: Vec<(u64, f64)> = cands.iter().map(|(id, c)| (*id, metric.score(&rq, c))).collect();
            rank_by_score(&scored, q.truth)
        })
        .collect();
    Ok(Metrics::from_ranks(&ranks))
}

/// Embeds queries and candidates with the student and ranks by cosine.
/// `checkpoint_vocab_hash` is the vocabulary hash recorded at training time.
pub fn run_model<S: Scalar>(
    ts: &Testset,
    student: &Student<S>,
    vocab: &Vocabulary,
    checkpoint_vocab_hash: Option<&str>,
) -> Result<Metrics> {
    if ts.queries.is_empty() || ts.candidates.is_empty() {
        return Err(Error::EmptyTestset);
    }
    if let Some(expected) = checkpoint_vocab_hash {
        let found = vocab.hash();
        if found != expected {
            return Err(Error::HashMismatch {
                what: "vocabulary",
                expected: expected.to_string(),
                found,
            });
        }
    }
    let mut cache: HashMap<&str, Vec<S>> = HashMap::new();
    let embed = |text: &str| -> Result<Vec<S>> { student.embed_text(vocab, text, None) };
    let mut cands = Vec::with_capacity(ts.candidates.len());
    for (id, name) in &ts.candidates {
        if !cache.contains_key(name.as_str()) {
            cache.insert(name, embed(name)?);
        }
        cands.push((*id, name.as_str()));
    }
    let mut ranks = Vec::with_capacity(ts.queries.len());
    for q in &ts.queries {
        let e = embed(&q.text)?;
        let scored: Vec<(u64, S)> = cands.iter().map(|&(id, n)| (id, dot(&e, &cache[n]))).collect();
        ranks.push(rank_by_score(&scored, q.truth));
    }
    Ok(Metrics::from_ranks(&ranks))
}
