//! Cross-script phonetic toponym embeddings.
//!
//! A phonetic teacher encoder learns a metric space from articulatory
//! features; a character-level student is distilled into the same space
//! and serves queries in any supported script.
//!
//! Models are generic over the scalar type. The aliases below fix it to
//! `f32` (what the pipeline trains and ships) or `f64` (gradient checks).

pub mod artifact;
pub mod corpus;
pub mod encoder;
pub mod error;
pub mod evalkit;
pub mod index;
pub mod nn;
pub mod phonetics;
pub mod pipeline;
pub mod scalar;
pub mod script_kit;
pub mod toy;
pub mod training;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type TeacherF32 = encoder::Teacher<f32>;
pub type StudentF32 = encoder::Student<f32>;
pub type TeacherF64 = encoder::Teacher<f64>;
pub type StudentF64 = encoder::Student<f64>;
pub type ParamsF32 = nn::ParamSet<f32>;
pub type ParamsF64 = nn::ParamSet<f64>;
