//! Reverse-mode differentiation over a tape of small dense matrices.
//!
//! A [`Graph`] borrows a [`ParamSet`] immutably; parameter leaves are read
//! in place and their gradients are accumulated straight into a
//! [`Gradients`] buffer on [`Graph::backward`]. Graphs are built per
//! example, so sequences are never padded.

use super::matrix::{matmul_acc, matmul_at_acc, matmul_bt_acc, Matrix};
use super::params::{Gradients, ParamId, ParamSet};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

enum Value<S> {
    Param(ParamId),
    Owned(Matrix<S>),
}

enum Op<S> {
    Leaf,
    MatMul(Var, Var),
    MatMulBt(Var, Var),
    AddBias(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Scale(Var, S),
    AddConst(Var),
    Sigmoid(Var),
    Tanh(Var),
    Relu(Var),
    SliceCols(Var, usize),
    SliceRows(Var, usize),
    ConcatCols(Vec<Var>),
    ConcatRows(Vec<Var>),
    SoftmaxRows(Var),
    L2NormalizeRows(Var),
    Gather(ParamId, Vec<usize>),
    Sum(Var),
    Norm(Var),
}

struct Node<S> {
    value: Value<S>,
    op: Op<S>,
}

pub struct Graph<'p, S: Scalar> {
    params: &'p ParamSet<S>,
    nodes: Vec<Node<S>>,
}

impl<'p, S: Scalar> Graph<'p, S> {
    pub fn new(params: &'p ParamSet<S>) -> Self {
        Self {
            params,
            nodes: Vec::with_capacity(256),
        }
    }

    pub fn value(&self, v: Var) -> &Matrix<S> {
        match &self.nodes[v.0].value {
            Value::Param(id) => self.params.get(*id),
            Value::Owned(m) => m,
        }
    }

    pub fn scalar(&self, v: Var) -> S {
        self.value(v).get(0, 0)
    }

    fn push(&mut self, value: Matrix<S>, op: Op<S>) -> Var {
        self.nodes.push(Node {
            value: Value::Owned(value),
            op,
        });
        Var(self.nodes.len() - 1)
    }

    pub fn param(&mut self, id: ParamId) -> Var {
        self.nodes.push(Node {
            value: Value::Param(id),
            op: Op::Leaf,
        });
        Var(self.nodes.len() - 1)
    }

    pub fn constant(&mut self, m: Matrix<S>) -> Var {
        self.push(m, Op::Leaf)
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let (av, bv) = (self.value(a), self.value(b));
        let mut out = Matrix::zeros(av.rows(), bv.cols());
        matmul_acc(av, bv, &mut out);
        self.push(out, Op::MatMul(a, b))
    }

    /// `a · bᵀ`
    pub fn matmul_bt(&mut self, a: Var, b: Var) -> Var {
        let (av, bv) = (self.value(a), self.value(b));
        let mut out = Matrix::zeros(av.rows(), bv.rows());
        matmul_bt_acc(av, bv, &mut out);
        self.push(out, Op::MatMulBt(a, b))
    }

    /// Adds a `1×n` bias to every row of `a`.
    pub fn add_bias(&mut self, a: Var, bias: Var) -> Var {
        let mut out = self.value(a).clone();
        let b = self.value(bias);
        debug_assert_eq!(b.rows(), 1);
        for r in 0..out.rows() {
            for (o, &x) in out.row_mut(r).iter_mut().zip(b.as_slice()) {
                *o += x;
            }
        }
        self.push(out, Op::AddBias(a, bias))
    }

    /// `a · w + b`
    pub fn affine(&mut self, a: Var, w: Var, b: Var) -> Var {
        let y = self.matmul(a, w);
        self.add_bias(y, b)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let mut out = self.value(a).clone();
        out.add_assign(self.value(b));
        self.push(out, Op::Add(a, b))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        let (av, bv) = (self.value(a), self.value(b));
        let data = av.as_slice().iter().zip(bv.as_slice()).map(|(&x, &y)| x - y).collect();
        let out = Matrix::from_vec(av.rows(), av.cols(), data);
        self.push(out, Op::Sub(a, b))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        let (av, bv) = (self.value(a), self.value(b));
        let data = av.as_slice().iter().zip(bv.as_slice()).map(|(&x, &y)| x * y).collect();
        let out = Matrix::from_vec(av.rows(), av.cols(), data);
        self.push(out, Op::Mul(a, b))
    }

    pub fn scale(&mut self, a: Var, s: S) -> Var {
        let out = self.value(a).map(|x| x * s);
        self.push(out, Op::Scale(a, s))
    }

    pub fn add_const(&mut self, a: Var, c: S) -> Var {
        let out = self.value(a).map(|x| x + c);
        self.push(out, Op::AddConst(a))
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let out = self.value(a).map(sigmoid);
        self.push(out, Op::Sigmoid(a))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let out = self.value(a).map(|x| x.tanh());
        self.push(out, Op::Tanh(a))
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let out = self.value(a).map(|x| x.max(S::zero()));
        self.push(out, Op::Relu(a))
    }

    pub fn slice_cols(&mut self, a: Var, start: usize, len: usize) -> Var {
        let av = self.value(a);
        let mut out = Matrix::zeros(av.rows(), len);
        for r in 0..av.rows() {
            out.row_mut(r).copy_from_slice(&av.row(r)[start..start + len]);
        }
        self.push(out, Op::SliceCols(a, start))
    }

    pub fn slice_rows(&mut self, a: Var, start: usize, len: usize) -> Var {
        let av = self.value(a);
        let cols = av.cols();
        let data = av.as_slice()[start * cols..(start + len) * cols].to_vec();
        self.push(Matrix::from_vec(len, cols, data), Op::SliceRows(a, start))
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Var {
        let rows = self.value(parts[0]).rows();
        let cols: usize = parts.iter().map(|&p| self.value(p).cols()).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut offset = 0;
        for &p in parts {
            let pv = self.value(p);
            debug_assert_eq!(pv.rows(), rows);
            for r in 0..rows {
                out.row_mut(r)[offset..offset + pv.cols()].copy_from_slice(pv.row(r));
            }
            offset += pv.cols();
        }
        self.push(out, Op::ConcatCols(parts.to_vec()))
    }

    pub fn concat_rows(&mut self, parts: &[Var]) -> Var {
        let cols = self.value(parts[0]).cols();
        let mut data = Vec::new();
        for &p in parts {
            let pv = self.value(p);
            debug_assert_eq!(pv.cols(), cols);
            data.extend_from_slice(pv.as_slice());
        }
        let rows = data.len() / cols.max(1);
        self.push(Matrix::from_vec(rows, cols, data), Op::ConcatRows(parts.to_vec()))
    }

    pub fn softmax_rows(&mut self, a: Var) -> Var {
        let mut out = self.value(a).clone();
        for r in 0..out.rows() {
            let row = out.row_mut(r);
            let max = row.iter().fold(S::neg_infinity(), |m, &x| m.max(x));
            let mut total = S::zero();
            for x in row.iter_mut() {
                *x = (*x - max).exp();
                total += *x;
            }
            for x in row.iter_mut() {
                *x /= total;
            }
        }
        self.push(out, Op::SoftmaxRows(a))
    }

    /// Scales every row to unit L2 norm; an all-zero row stays zero.
    pub fn l2_normalize_rows(&mut self, a: Var) -> Var {
        let mut out = self.value(a).clone();
        for r in 0..out.rows() {
            let row = out.row_mut(r);
            let norm = row.iter().map(|&x| x * x).sum::<S>().sqrt();
            if norm > S::zero() {
                row.iter_mut().for_each(|x| *x /= norm);
            }
        }
        self.push(out, Op::L2NormalizeRows(a))
    }

    /// Rows `ids` of an embedding table.
    pub fn gather(&mut self, table: ParamId, ids: &[usize]) -> Var {
        let t = self.params.get(table);
        let mut out = Matrix::zeros(ids.len(), t.cols());
        for (r, &id) in ids.iter().enumerate() {
            out.row_mut(r).copy_from_slice(t.row(id));
        }
        self.push(out, Op::Gather(table, ids.to_vec()))
    }

    pub fn sum(&mut self, a: Var) -> Var {
        let s = self.value(a).as_slice().iter().copied().sum();
        self.push(Matrix::scalar(s), Op::Sum(a))
    }

    pub fn mean(&mut self, a: Var) -> Var {
        let n = self.value(a).len();
        let s = self.sum(a);
        self.scale(s, S::one() / S::of(n as f64))
    }

    /// Sum of elementwise products, `1×1`.
    pub fn dot(&mut self, a: Var, b: Var) -> Var {
        let p = self.mul(a, b);
        self.sum(p)
    }

    /// Frobenius norm, `1×1`. The gradient at zero is taken as zero.
    pub fn norm(&mut self, a: Var) -> Var {
        let n = self.value(a).sum_squares().sqrt();
        self.push(Matrix::scalar(n), Op::Norm(a))
    }

    /// Accumulates `d root / d param` into `grads`. `root` must be `1×1`.
    pub fn backward(&self, root: Var, grads: &mut Gradients<S>) {
        self.backward_scaled(root, S::one(), grads);
    }

    pub fn backward_scaled(&self, root: Var, seed: S, grads: &mut Gradients<S>) {
        assert_eq!(self.value(root).shape(), (1, 1), "backward needs a scalar root");
        let mut adj: Vec<Option<Matrix<S>>> = Vec::new();
        adj.resize_with(root.0 + 1, || None);
        adj[root.0] = Some(Matrix::scalar(seed));

        for idx in (0..=root.0).rev() {
            let Some(g) = adj[idx].take() else { continue };
            let node = &self.nodes[idx];
            match &node.op {
                Op::Leaf => {
                    if let Value::Param(id) = node.value {
                        grads.get_mut(id).add_assign(&g);
                    }
                }
                Op::MatMul(a, b) => {
                    let (av, bv) = (self.value(*a), self.value(*b));
                    let ga = accumulate(&mut adj, *a, av.rows(), av.cols());
                    matmul_bt_acc(&g, bv, ga);
                    let gb = accumulate(&mut adj, *b, bv.rows(), bv.cols());
                    matmul_at_acc(av, &g, gb);
                }
                Op::MatMulBt(a, b) => {
                    let (av, bv) = (self.value(*a), self.value(*b));
                    let ga = accumulate(&mut adj, *a, av.rows(), av.cols());
                    matmul_acc(&g, bv, ga);
                    let gb = accumulate(&mut adj, *b, bv.rows(), bv.cols());
                    matmul_at_acc(&g, av, gb);
                }
                Op::AddBias(a, b) => {
                    let gb = accumulate(&mut adj, *b, 1, g.cols());
                    for r in 0..g.rows() {
                        for (o, &x) in gb.as_mut_slice().iter_mut().zip(g.row(r)) {
                            *o += x;
                        }
                    }
                    accumulate(&mut adj, *a, g.rows(), g.cols()).add_assign(&g);
                }
                Op::Add(a, b) => {
                    accumulate(&mut adj, *a, g.rows(), g.cols()).add_assign(&g);
                    accumulate(&mut adj, *b, g.rows(), g.cols()).add_assign(&g);
                }
                Op::Sub(a, b) => {
                    accumulate(&mut adj, *a, g.rows(), g.cols()).add_assign(&g);
                    let gb = accumulate(&mut adj, *b, g.rows(), g.cols());
                    for (o, &x) in gb.as_mut_slice().iter_mut().zip(g.as_slice()) {
                        *o -= x;
                    }
                }
                Op::Mul(a, b) => {
                    let (av, bv) = (self.value(*a), self.value(*b));
                    let ga = accumulate(&mut adj, *a, g.rows(), g.cols());
                    for ((o, &x), &y) in ga.as_mut_slice().iter_mut().zip(g.as_slice()).zip(bv.as_slice()) {
                        *o += x * y;
                    }
                    let gb = accumulate(&mut adj, *b, g.rows(), g.cols());
                    for ((o, &x), &y) in gb.as_mut_slice().iter_mut().zip(g.as_slice()).zip(av.as_slice()) {
                        *o += x * y;
                    }
                }
                Op::Scale(a, s) => {
                    let ga = accumulate(&mut adj, *a, g.rows(), g.cols());
                    for (o, &x) in ga.as_mut_slice().iter_mut().zip(g.as_slice()) {
                        *o += x * *s;
                    }
                }
                Op::AddConst(a) => {
                    accumulate(&mut adj, *a, g.rows(), g.cols()).add_assign(&g);
                }
                Op::Sigmoid(a) => {
                    let y = self.node_value(idx);
                    let ga = accumulate(&mut adj, *a, g.rows(), g.cols());
                    for ((o, &x), &yv) in ga.as_mut_slice().iter_mut().zip(g.as_slice()).zip(y.as_slice()) {
                        *o += x * yv * (S::one() - yv);
                    }
                }
                Op::Tanh(a) => {
                    let y = self.node_value(idx);
                    let ga = accumulate(&mut adj, *a, g.rows(), g.cols());
                    for ((o, &x), &yv) in ga.as_mut_slice().iter_mut().zip(g.as_slice()).zip(y.as_slice()) {
                        *o += x * (S::one() - yv * yv);
                    }
                }
                Op::Relu(a) => {
                    let av = self.value(*a);
                    let ga = accumulate(&mut adj, *a, g.rows(), g.cols());
                    for ((o, &x), &inp) in ga.as_mut_slice().iter_mut().zip(g.as_slice()).zip(av.as_slice()) {
                        if inp > S::zero() {
                            *o += x;
                        }
                    }
                }
                Op::SliceCols(a, start) => {
                    let (rows, cols) = self.value(*a).shape();
                    let ga = accumulate(&mut adj, *a, rows, cols);
                    for r in 0..rows {
                        for (o, &x) in ga.row_mut(r)[*start..*start + g.cols()].iter_mut().zip(g.row(r)) {
                            *o += x;
                        }
                    }
                }
                Op::SliceRows(a, start) => {
                    let (rows, cols) = self.value(*a).shape();
                    let ga = accumulate(&mut adj, *a, rows, cols);
                    let dst = &mut ga.as_mut_slice()[*start * cols..(*start + g.rows()) * cols];
                    for (o, &x) in dst.iter_mut().zip(g.as_slice()) {
                        *o += x;
                    }
                }
                Op::ConcatCols(parts) => {
                    let mut offset = 0;
                    for &p in parts {
                        let (rows, cols) = self.value(p).shape();
                        let gp = accumulate(&mut adj, p, rows, cols);
                        for r in 0..rows {
                            for (o, &x) in gp.row_mut(r).iter_mut().zip(&g.row(r)[offset..offset + cols]) {
                                *o += x;
                            }
                        }
                        offset += cols;
                    }
                }
                Op::ConcatRows(parts) => {
                    let mut offset = 0;
                    for &p in parts {
                        let (rows, cols) = self.value(p).shape();
                        let gp = accumulate(&mut adj, p, rows, cols);
                        let src = &g.as_slice()[offset * cols..(offset + rows) * cols];
                        for (o, &x) in gp.as_mut_slice().iter_mut().zip(src) {
                            *o += x;
                        }
                        offset += rows;
                    }
                }
                Op::SoftmaxRows(a) => {
                    let y = self.node_value(idx);
                    let ga = accumulate(&mut adj, *a, g.rows(), g.cols());
                    for r in 0..g.rows() {
                        let (yr, gr) = (y.row(r), g.row(r));
                        let inner: S = yr.iter().zip(gr).map(|(&a, &b)| a * b).sum();
                        for ((o, &yv), &gv) in ga.row_mut(r).iter_mut().zip(yr).zip(gr) {
                            *o += yv * (gv - inner);
                        }
                    }
                }
                Op::L2NormalizeRows(a) => {
                    let x = self.value(*a);
                    let y = self.node_value(idx);
                    let ga = accumulate(&mut adj, *a, g.rows(), g.cols());
                    for r in 0..g.rows() {
                        let norm = x.row(r).iter().map(|&v| v * v).sum::<S>().sqrt();
                        if norm == S::zero() {
                            continue;
                        }
                        let (yr, gr) = (y.row(r), g.row(r));
                        let inner: S = yr.iter().zip(gr).map(|(&a, &b)| a * b).sum();
                        for ((o, &yv), &gv) in ga.row_mut(r).iter_mut().zip(yr).zip(gr) {
                            *o += (gv - yv * inner) / norm;
                        }
                    }
                }
                Op::Gather(table, ids) => {
                    let gt = grads.get_mut(*table);
                    for (r, &id) in ids.iter().enumerate() {
                        for (o, &x) in gt.row_mut(id).iter_mut().zip(g.row(r)) {
                            *o += x;
                        }
                    }
                }
                Op::Sum(a) => {
                    let (rows, cols) = self.value(*a).shape();
                    let s = g.get(0, 0);
                    let ga = accumulate(&mut adj, *a, rows, cols);
                    ga.as_mut_slice().iter_mut().for_each(|o| *o += s);
                }
                Op::Norm(a) => {
                    let n = self.node_value(idx).get(0, 0);
                    if n == S::zero() {
                        continue;
                    }
                    let av = self.value(*a);
                    let s = g.get(0, 0) / n;
                    let ga = accumulate(&mut adj, *a, av.rows(), av.cols());
                    for (o, &x) in ga.as_mut_slice().iter_mut().zip(av.as_slice()) {
                        *o += s * x;
                    }
                }
            }
        }
    }

    fn node_value(&self, idx: usize) -> &Matrix<S> {
        self.value(Var(idx))
    }
}

fn accumulate<S: Scalar>(adj: &mut [Option<Matrix<S>>], v: Var, rows: usize, cols: usize) -> &mut Matrix<S> {
    adj[v.0].get_or_insert_with(|| Matrix::zeros(rows, cols))
}

#[inline]
pub fn sigmoid<S: Scalar>(x: S) -> S {
    if x >= S::zero() {
        S::one() / (S::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (S::one() + e)
    }
}
