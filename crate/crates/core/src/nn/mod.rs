//! Minimal dense tensor machinery for the encoders: matrices, a
//! reverse-mode tape, named parameter sets and the AdamW optimiser.

mod graph;
mod matrix;
mod optim;
mod params;

pub use graph::{sigmoid, Graph, Var};
pub use matrix::{dot, Matrix};
pub use optim::AdamW;
pub use params::{Gradients, Param, ParamId, ParamSet};
