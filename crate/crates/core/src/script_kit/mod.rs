//! Unicode script detection, per-script preprocessing and the
//! script-partitioned character vocabulary.

pub mod hangul;
mod preprocess;
mod romanise;
mod script;
mod vocab;

pub use preprocess::{preprocess, preprocess_with, Token, TokenSeq};
pub use romanise::{romanise, Romaniser, TRANSLIT_VERSION};
pub use script::{detect_script, script_of, ScriptId};
pub use vocab::{script_alphabet, VocabOptions, Vocabulary, PAD, UNK, VOCAB_VERSION};
