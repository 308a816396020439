use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::store::{EmbeddingStore, Reader};
use super::dot;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HnswParams {
    /// Neighbour degree on upper layers; layer 0 allows twice as many.
    pub m: usize,
    pub ef_construction: usize,
    pub ef_search: usize,
    pub seed: u64,
}

impl Default for HnswParams {
    fn default() -> Self {
        Self {
            m: 16,
            ef_construction: 100,
            ef_search: 2048,
            seed: 42,
        }
    }
}

impl HnswParams {
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::Config("hnsw.m must be at least 2".into()));
        }
        if self.ef_construction == 0 || self.ef_search == 0 {
            return Err(Error::Config("hnsw ef values must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cand {
    pub dist: f32,
    pub node: u32,
}

impl Eq for Cand {}

impl Ord for Cand {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist.total_cmp(&other.dist).then(self.node.cmp(&other.node))
    }
}

impl PartialOrd for Cand {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Hierarchical navigable small-world graph over the rows of a store.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Hnsw {
    pub params: HnswParams,
    entry: u32,
    max_level: usize,
    /// `links[node][level]`
    links: Vec<Vec<Vec<u32>>>,
}

struct Marks {
    stamp: Vec<u32>,
    gen: u32,
}

impl Marks {
    fn next(&mut self) {
        self.gen = self.gen.wrapping_add(1);
        if self.gen == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.gen = 1;
        }
    }

    fn first_visit(&mut self, n: u32) -> bool {
        let s = &mut self.stamp[n as usize];
        let fresh = *s != self.gen;
        *s = self.gen;
        fresh
    }
}

fn distance(store: &EmbeddingStore, q: &[f32], node: u32) -> f32 {
    1.0 - dot(q, store.row(node as usize))
}

impl Hnsw {
    fn max_degree(&self, level: usize) -> usize {
        if level == 0 {
            2 * self.params.m
        } else {
            self.params.m
        }
    }

    pub fn build(store: &EmbeddingStore, params: HnswParams) -> Result<Self> {
        params.validate()?;
        if store.is_empty() {
            return Err(Error::EmptyStore);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let ml = 1.0 / (params.m as f64).ln();
        let mut h = Self {
            params,
            entry: 0,
            max_level: 0,
            links: Vec::with_capacity(store.len()),
        };
        let mut marks = Marks {
            stamp: vec![0; store.len()],
            gen: 0,
        };
        for node in 0..store.len() as u32 {
            let u: f64 = 1.0 - rng.gen::<f64>();
            let level = (-u.ln() * ml).floor() as usize;
            h.insert(store, node, level, &mut marks);
        }
        Ok(h)
    }

    fn insert(&mut self, store: &EmbeddingStore, node: u32, level: usize, marks: &mut Marks) {
        self.links.push(vec![Vec::new(); level + 1]);
        if node == 0 {
            self.max_level = level;
            return;
        }
        let q = store.row(node as usize);
        let mut eps = vec![Cand {
            dist: distance(store, q, self.entry),
            node: self.entry,
        }];
        for l in (level + 1..=self.max_level).rev() {
            eps = self.greedy(store, q, eps[0], l);
        }
        for l in (0..=level.min(self.max_level)).rev() {
            marks.next();
            let found = self.search_layer(store, q, &eps, self.params.ef_construction, l, &mut |n| marks.first_visit(n));
            let chosen = self.select(store, &found, self.params.m);
            for &nb in &chosen {
                let cap = self.max_degree(l);
                let list = &mut self.links[nb as usize][l];
                list.push(node);
                if list.len() > cap {
                    let anchor = store.row(nb as usize);
                    let mut cands: Vec<Cand> = list
                        .iter()
                        .map(|&n| Cand {
                            dist: distance(store, anchor, n),
                            node: n,
                        })
                        .collect();
                    cands.sort();
                    let kept = self.select(store, &cands, cap);
                    self.links[nb as usize][l] = kept;
                }
            }
            self.links[node as usize][l] = chosen;
            eps = found;
        }
        if level > self.max_level {
            self.max_level = level;
            self.entry = node;
        }
    }

    /// Single-best descent on an upper layer.
    fn greedy(&self, store: &EmbeddingStore, q: &[f32], start: Cand, level: usize) -> Vec<Cand> {
        let mut best = start;
        loop {
            let mut moved = false;
            for &n in &self.links[best.node as usize][level] {
                let c = Cand {
                    dist: distance(store, q, n),
                    node: n,
                };
                if c < best {
                    best = c;
                    moved = true;
                }
            }
            if !moved {
                return vec![best];
            }
        }
    }

    /// Beam search; result sorted nearest first.
    fn search_layer(
        &self,
        store: &EmbeddingStore,
        q: &[f32],
        eps: &[Cand],
        ef: usize,
        level: usize,
        first_visit: &mut dyn FnMut(u32) -> bool,
    ) -> Vec<Cand> {
        let mut frontier: BinaryHeap<Reverse<Cand>> = BinaryHeap::new();
        let mut found: BinaryHeap<Cand> = BinaryHeap::new();
        for &c in eps {
            if first_visit(c.node) {
                frontier.push(Reverse(c));
                found.push(c);
            }
        }
        while found.len() > ef {
            found.pop();
        }
        while let Some(Reverse(c)) = frontier.pop() {
            if found.len() >= ef && c > *found.peek().expect("non-empty") {
                break;
            }
            for &n in &self.links[c.node as usize][level] {
                if !first_visit(n) {
                    continue;
                }
                let cand = Cand {
                    dist: distance(store, q, n),
                    node: n,
                };
                if found.len() < ef || cand < *found.peek().expect("non-empty") {
                    frontier.push(Reverse(cand));
                    found.push(cand);
                    if found.len() > ef {
                        found.pop();
                    }
                }
            }
        }
        found.into_sorted_vec()
    }

    /// Diversity heuristic: keep a candidate only if it is closer to the
    /// base point than to every neighbour kept so far.
    fn select(&self, store: &EmbeddingStore, sorted: &[Cand], m: usize) -> Vec<u32> {
        let mut kept: Vec<Cand> = Vec::with_capacity(m);
        for &c in sorted {
            if kept.len() == m {
                break;
            }
            let v = store.row(c.node as usize);
            if kept.iter().all(|k| distance(store, v, k.node) > c.dist) {
                kept.push(c);
            }
        }
        kept.into_iter().map(|c| c.node).collect()
    }

    /// Up to `ef` nearest rows to `q`, nearest first.
    pub fn search(&self, store: &EmbeddingStore, q: &[f32], ef: usize) -> Vec<Cand> {
        let mut ep = Cand {
            dist: distance(store, q, self.entry),
            node: self.entry,
        };
        for l in (1..=self.max_level).rev() {
            ep = self.greedy(store, q, ep, l)[0];
        }
        let mut seen: HashSet<u32> = HashSet::with_capacity(ef * 4 * self.params.m);
        self.search_layer(store, q, &[ep], ef, 0, &mut |n| seen.insert(n))
    }

    pub fn write(&self, out: &mut Vec<u8>) {
        for v in [self.params.m as u64, self.params.ef_construction as u64, self.params.ef_search as u64, self.params.seed] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&self.entry.to_le_bytes());
        out.extend_from_slice(&(self.max_level as u32).to_le_bytes());
        for node in &self.links {
            out.push(node.len() as u8);
            for level in node {
                out.extend_from_slice(&(level.len() as u32).to_le_bytes());
                for n in level {
                    out.extend_from_slice(&n.to_le_bytes());
                }
            }
        }
    }

    pub fn read(r: &mut Reader<'_>, nodes: usize) -> Result<Self> {
        let params = HnswParams {
            m: r.u64()? as usize,
            ef_construction: r.u64()? as usize,
            ef_search: r.u64()? as usize,
            seed: r.u64()?,
        };
        params.validate()?;
        let entry = r.u32()?;
        let max_level = r.u32()? as usize;
        let mut links = Vec::with_capacity(nodes);
        for _ in 0..nodes {
            let levels = r.u8()? as usize;
            if levels == 0 {
                return Err(r.bad("node without layers"));
            }
            let mut node = Vec::with_capacity(levels);
            for _ in 0..levels {
                let n = r.u32()? as usize;
                if n > r.remaining() / 4 {
                    return Err(r.bad("neighbour list exceeds file size"));
                }
                let mut list = Vec::with_capacity(n);
                for _ in 0..n {
                    let nb = r.u32()?;
                    if nb as usize >= nodes {
                        return Err(r.bad("neighbour out of range"));
                    }
                    list.push(nb);
                }
                node.push(list);
            }
            links.push(node);
        }
        if entry as usize >= nodes || links[entry as usize].len() != max_level + 1 {
            return Err(r.bad("inconsistent entry point"));
        }
        Ok(Self {
            params,
            entry,
            max_level,
            links,
        })
    }
}
