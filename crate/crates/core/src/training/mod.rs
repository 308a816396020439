//! Losses, augmentation, schedules and the three training phases.

mod augment;
mod config;
mod losses;
mod phases;
mod schedule;

pub use augment::{apply_noise, language_dropout, NoiseConfig, NoiseReport, NOISE_OPS};
pub use config::{DistillPhase, TrainConfig, TripletPhase, PHASE3_LR, PHASE3_LR_LOW};
pub use losses::{distill_loss, distill_loss_graph, triplet_loss, triplet_loss_graph};
pub use phases::{
    split_train_val, train_phase1, train_phase2, train_phase3, DistillSample, EpochLog, PhaseOutcome, LOG_HEADER,
};
pub use schedule::lr_schedule;
