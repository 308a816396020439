use serde::{Deserialize, Serialize};

use super::augment::NoiseConfig;
use crate::error::{Error, Result};

pub const PHASE3_LR: f64 = 1e-4;
pub const PHASE3_LR_LOW: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripletPhase {
    pub epochs: usize,
    pub lr: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistillPhase {
    pub epochs: usize,
    pub lr: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub seed: u64,
    pub batch_size: usize,
    pub weight_decay: f64,
    pub val_fraction: f64,
    pub lang_dropout: f64,
    pub noise: NoiseConfig,
    /// Apply noise to phase-3 inputs as well.
    pub phase3_noise: bool,
    /// Apply language dropout to phase-3 inputs.
    pub phase3_lang_dropout: bool,
    pub phase1: TripletPhase,
    pub phase2: DistillPhase,
    pub phase3: TripletPhase,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            batch_size: 128,
            weight_decay: 1e-5,
            val_fraction: 0.1,
            lang_dropout: 0.5,
            noise: NoiseConfig::default(),
            phase3_noise: false,
            phase3_lang_dropout: true,
            phase1: TripletPhase {
                epochs: 50,
                lr: 1e-3,
                margin: 0.3,
            },
            phase2: DistillPhase {
                epochs: 5,
                lr: 1e-3,
                alpha: 0.5,
            },
            phase3: TripletPhase {
                epochs: 30,
                lr: PHASE3_LR,
                margin: 0.2,
            },
        }
    }
}

impl TrainConfig {
    /// Named presets: `paper` (the defaults), `desk` (single-CPU toy run),
    /// `smoke` (seconds-long pipeline check) and `phase3-low-lr`.
    pub fn preset(name: &str) -> Result<Self> {
        let mut c = Self::default();
        match name {
            "paper" => {}
            "desk" => {
                c.phase1.epochs = 12;
                c.phase2.epochs = 8;
                c.phase3.epochs = 6;
                c.batch_size = 32;
            }
            "smoke" => {
                c.phase1.epochs = 2;
                c.phase2.epochs = 2;
                c.phase3.epochs = 2;
                c.batch_size = 16;
            }
            "phase3-low-lr" => c.phase3.lr = PHASE3_LR_LOW,
            other => return Err(Error::Config(format!("unknown training preset `{other}`"))),
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        let bad = |m: String| Err(Error::Config(m));
        if self.batch_size == 0 {
            return bad("batch_size must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.lang_dropout) {
            return bad(format!("lang_dropout must lie in [0, 1], got {}", self.lang_dropout));
        }
        if !(0.0..1.0).contains(&self.val_fraction) {
            return bad(format!("val_fraction must lie in [0, 1), got {}", self.val_fraction));
        }
        if !(0.0..=1.0).contains(&self.phase2.alpha) {
            return bad(format!("phase2.alpha must lie in [0, 1], got {}", self.phase2.alpha));
        }
        for (name, m) in [("phase1", self.phase1.margin), ("phase3", self.phase3.margin)] {
            if !(m > 0.0) {
                return bad(format!("{name}.margin must be positive, got {m}"));
            }
        }
        for (name, lr) in [("phase1", self.phase1.lr), ("phase2", self.phase2.lr), ("phase3", self.phase3.lr)] {
            if !(lr > 0.0 && lr.is_finite()) {
                return bad(format!("{name}.lr must be positive, got {lr}"));
            }
        }
        if self.weight_decay < 0.0 {
            return bad("weight_decay must be non-negative".into());
        }
        Ok(())
    }
}
