use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::artifact::{sha256_hex, Stamp};
use crate::corpus::{PairConfig, DEFAULT_MAX_DRAWS};
use crate::encoder::EncoderConfig;
use crate::error::{Error, Result};
use crate::index::{HnswParams, IndexMode};
use crate::toy::ToyConfig;
use crate::training::TrainConfig;

/// Artifact locations. Relative paths resolve against the working
/// directory of the process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Input gazetteer, JSON lines. The `toy` stage writes it.
    pub corpus: PathBuf,
    /// Optional `toponym-id \t segments` transcription overlay.
    pub ipa_overlay: Option<PathBuf>,
    pub toponyms: PathBuf,
    pub vocab: PathBuf,
    pub pairs: PathBuf,
    pub random_triplets: PathBuf,
    pub hard_triplets: PathBuf,
    pub checkpoints: PathBuf,
    pub embeddings: PathBuf,
    pub index: PathBuf,
    pub testsets: PathBuf,
    pub reports: PathBuf,
    /// Diagnostic pair file; the bundled suite when unset.
    pub diagnostics: Option<PathBuf>,
}

impl Default for Paths {
    fn default() -> Self {
        Self::under(Path::new("work"))
    }
}

impl Paths {
    pub fn under(dir: &Path) -> Self {
        Self {
            corpus: dir.join("corpus.jsonl"),
            ipa_overlay: None,
            toponyms: dir.join("toponyms.tsv"),
            vocab: dir.join("vocab.tsv"),
            pairs: dir.join("pairs.tsv"),
            random_triplets: dir.join("triplets.random.tsv"),
            hard_triplets: dir.join("triplets.hard.tsv"),
            checkpoints: dir.join("checkpoints"),
            embeddings: dir.join("embeddings.bin"),
            index: dir.join("index.bin"),
            testsets: dir.join("testsets"),
            reports: dir.join("reports"),
            diagnostics: None,
        }
    }

    pub fn teacher(&self) -> PathBuf {
        self.checkpoints.join("teacher.ckpt")
    }

    pub fn student_phase2(&self) -> PathBuf {
        self.checkpoints.join("student.phase2.ckpt")
    }

    pub fn student(&self) -> PathBuf {
        self.checkpoints.join("student.ckpt")
    }

    pub fn train_log(&self, phase: u8) -> PathBuf {
        self.reports.join(format!("train.phase{phase}.tsv"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TripletConfig {
    pub max_draws: usize,
}

impl Default for TripletConfig {
    fn default() -> Self {
        Self {
            max_draws: DEFAULT_MAX_DRAWS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndexConfig {
    pub mode: IndexMode,
    pub hnsw: HnswParams,
}

impl Default for IndexConfig {
    fn default() -> Self {
        Self {
            mode: IndexMode::Approximate,
            hnsw: HnswParams::default(),
        }
    }
}

/// Everything a pipeline run depends on. `train.seed` is replaced by the
/// top-level `seed` when stages run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub paths: Paths,
    pub toy: ToyConfig,
    pub pairs: PairConfig,
    pub triplets: TripletConfig,
    pub encoder: EncoderConfig,
    pub train: TrainConfig,
    /// Start the student trunk from the trained teacher's trunk.
    pub warm_start: bool,
    pub index: IndexConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            paths: Paths::default(),
            toy: ToyConfig::default(),
            pairs: PairConfig::default(),
            triplets: TripletConfig::default(),
            encoder: EncoderConfig::default(),
            train: TrainConfig::default(),
            warm_start: true,
            index: IndexConfig::default(),
        }
    }
}

pub const PRESETS: [&str; 4] = ["paper", "desk", "smoke", "phase3-low-lr"];

impl PipelineConfig {
    /// `paper` keeps the published sizes; `desk` and `smoke` shrink the
    /// trunk and epochs for a single CPU.
    pub fn preset(name: &str) -> Result<Self> {
        let mut c = Self {
            train: TrainConfig::preset(name)?,
            ..Self::default()
        };
        match name {
            "desk" => {
                c.encoder.hidden = 32;
            }
            "smoke" => {
                c.encoder.hidden = 8;
                c.encoder.heads = 2;
                c.toy.places = 400;
                c.toy.heldout = 50;
                c.pairs.quota = 200;
            }
            _ => {}
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.toy.validate()?;
        self.pairs.validate()?;
        self.encoder.validate()?;
        self.train_config().validate()?;
        self.index.hnsw.validate()?;
        if self.triplets.max_draws == 0 {
            return Err(Error::Config("triplets.max_draws must be positive".into()));
        }
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: self.seed,
            ..self.train.clone()
        }
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form,
    /// paths excluded.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serialises");
        if let Some(map) = v.as_object_mut() {
            map.remove("paths");
            if let Some(train) = map.get_mut("train").and_then(|t| t.as_object_mut()) {
                train.remove("seed");
            }
        }
        sha256_hex(v.to_string().as_bytes())[..16].to_string()
    }

    pub fn stamp(&self) -> Stamp {
        Stamp::new(self.hash(), self.seed)
    }
}
