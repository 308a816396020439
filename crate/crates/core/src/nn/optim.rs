use super::params::{Gradients, ParamSet};
use crate::scalar::Scalar;

/// Adam with decoupled weight decay. Decay is applied only to parameters
/// flagged with `decay`.
#[derive(Debug, Clone)]
pub struct AdamW<S> {
    pub beta1: S,
    pub beta2: S,
    pub eps: S,
    pub weight_decay: S,
    step: u64,
    m: Vec<Vec<S>>,
    v: Vec<Vec<S>>,
}

impl<S: Scalar> AdamW<S> {
    pub fn new(params: &ParamSet<S>, weight_decay: S) -> Self {
        let zeros: Vec<Vec<S>> = params.iter().map(|p| vec![S::zero(); p.value.len()]).collect();
        Self {
            beta1: S::of(0.9),
            beta2: S::of(0.999),
            eps: S::of(1e-8),
            weight_decay,
            step: 0,
            m: zeros.clone(),
            v: zeros,
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    pub fn step(&mut self, params: &mut ParamSet<S>, grads: &Gradients<S>, lr: S) {
        self.step += 1;
        let t = self.step as i32;
        let bc1 = S::one() - self.beta1.powi(t);
        let bc2 = S::one() - self.beta2.powi(t);
        for (i, p) in params.iter_mut().enumerate() {
            let g = grads.by_index(i).as_slice();
            let (m, v) = (&mut self.m[i], &mut self.v[i]);
            let decay = if p.decay { lr * self.weight_decay } else { S::zero() };
            for (k, w) in p.value.as_mut_slice().iter_mut().enumerate() {
                m[k] = self.beta1 * m[k] + (S::one() - self.beta1) * g[k];
                v[k] = self.beta2 * v[k] + (S::one() - self.beta2) * g[k] * g[k];
                let m_hat = m[k] / bc1;
                let v_hat = v[k] / bc2;
                *w -= decay * *w;
                *w -= lr * m_hat / (v_hat.sqrt() + self.eps);
            }
        }
    }
}
