//! Phonetic teacher and character student encoders sharing one trunk and
//! one 128-dimensional unit-norm output space.

mod checkpoint;
mod config;
mod model;

pub use checkpoint::{
    load_student, load_teacher, read_checkpoint, save_student, save_teacher, CheckpointHeader, CheckpointMeta,
    ModelKind, TensorInfo, CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
};
pub use config::{EncoderConfig, EMBED_DIM};
pub use model::{cosine, truncation_count, Student, StudentInput, Teacher};
