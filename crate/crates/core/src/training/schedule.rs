use crate::error::{Error, Result};

/// Cosine annealing: `base · (1 + cos(π · step / total)) / 2`.
pub fn lr_schedule(step: usize, total: usize, base: f64) -> Result<f64> {
    if total == 0 {
        return Err(Error::Config("learning-rate schedule needs at least one step".into()));
    }
    let step = step.min(total);
    Ok(base * (1.0 + (std::f64::consts::PI * step as f64 / total as f64).cos()) / 2.0)
}
