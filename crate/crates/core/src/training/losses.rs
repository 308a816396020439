use crate::nn::{Graph, Var};
use crate::scalar::Scalar;

fn distance<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<S>().sqrt()
}

/// `max(0, ‖a − p‖ − ‖a − n‖ + margin)`
pub fn triplet_loss<S: Scalar>(a: &[S], p: &[S], n: &[S], margin: S) -> S {
    (distance(a, p) - distance(a, n) + margin).max(S::zero())
}

/// `α · mean((s − t)²) + (1 − α) · (1 − cos(s, t))`
pub fn distill_loss<S: Scalar>(s: &[S], t: &[S], alpha: S) -> S {
    let n = S::of(s.len() as f64);
    let mse = s.iter().zip(t).map(|(&x, &y)| (x - y) * (x - y)).sum::<S>() / n;
    let dot: S = s.iter().zip(t).map(|(&x, &y)| x * y).sum();
    let norms = s.iter().map(|&x| x * x).sum::<S>().sqrt() * t.iter().map(|&x| x * x).sum::<S>().sqrt();
    let cos = if norms > S::zero() { dot / norms } else { S::zero() };
    alpha * mse + (S::one() - alpha) * (S::one() - cos)
}

/// Tape version of [`triplet_loss`] over three `1×d` embeddings.
pub fn triplet_loss_graph<S: Scalar>(g: &mut Graph<'_, S>, a: Var, p: Var, n: Var, margin: S) -> Var {
    let ap = g.sub(a, p);
    let an = g.sub(a, n);
    let d_ap = g.norm(ap);
    let d_an = g.norm(an);
    let gap = g.sub(d_ap, d_an);
    let shifted = g.add_const(gap, margin);
    g.relu(shifted)
}

/// Tape version of [`distill_loss`]; both inputs are unit rows, so the
/// cosine is their dot product.
pub fn distill_loss_graph<S: Scalar>(g: &mut Graph<'_, S>, s: Var, t: Var, alpha: S) -> Var {
    let diff = g.sub(s, t);
    let sq = g.mul(diff, diff);
    let mse = g.mean(sq);
    let cos = g.dot(s, t);
    let one_minus = g.scale(cos, -S::one());
    let one_minus = g.add_const(one_minus, S::one());
    let a = g.scale(mse, alpha);
    let b = g.scale(one_minus, S::one() - alpha);
    g.add(a, b)
}
