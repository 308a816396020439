//! Embedding store with exact and HNSW top-k cosine retrieval.
//!
//! Index file layout (little endian): `b"TPIX"`, u32 version, u8 mode
//! (0 exact, 1 approximate), the embedding records as in the embedding
//! file, the HNSW graph for mode 1, and a SHA-256 trailer.

mod hnsw;
mod store;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use hnsw::HnswParams;
pub use store::{EmbeddingStore, EMBEDDINGS_MAGIC, EMBEDDINGS_VERSION, UNIT_TOLERANCE};

use crate::artifact::{read_bytes, write_atomic};
use crate::encoder::EMBED_DIM;
use crate::error::{Error, Result};
use hnsw::Hnsw;
use store::{seal, Reader};

pub const INDEX_MAGIC: &[u8; 4] = b"TPIX";
pub const INDEX_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexMode {
    Exact,
    Approximate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub id: u64,
    pub score: f32,
}

/// f32 dot product with a fixed summation order.
pub(crate) fn dot(a: &[f32], b: &[f32]) -> f32 {
    let mut acc = [0f32; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail: f32 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        let x: &[f32; 8] = x.try_into().expect("chunk of 8");
        let y: &[f32; 8] = y.try_into().expect("chunk of 8");
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// Descending score, ascending id.
fn rank(hits: &mut Vec<Hit>, k: usize) {
    hits.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.id.cmp(&b.id)));
    hits.truncate(k);
}

#[derive(Debug, Clone, PartialEq)]
pub struct Index {
    store: EmbeddingStore,
    graph: Option<Hnsw>,
}

impl Index {
    pub fn build(store: EmbeddingStore, mode: IndexMode, params: &HnswParams) -> Result<Self> {
        if store.is_empty() {
            return Err(Error::EmptyStore);
        }
        let graph = match mode {
            IndexMode::Exact => None,
            IndexMode::Approximate => Some(Hnsw::build(&store, params.clone())?),
        };
        Ok(Self { store, graph })
    }

    pub fn mode(&self) -> IndexMode {
        if self.graph.is_some() {
            IndexMode::Approximate
        } else {
            IndexMode::Exact
        }
    }

    pub fn store(&self) -> &EmbeddingStore {
        &self.store
    }

    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.is_empty()
    }

    /// Top `k` stored ids by cosine with `q`; fewer when the store is
    /// smaller than `k`.
    pub fn query(&self, q: &[f32], k: usize) -> Result<Vec<Hit>> {
        if q.len() != EMBED_DIM {
            return Err(Error::Dimensions(format!("query has {} components, expected {EMBED_DIM}", q.len())));
        }
        if k == 0 {
            return Ok(Vec::new());
        }
        let ids = self.store.ids();
        let mut hits: Vec<Hit> = match &self.graph {
            None => (0..self.store.len())
                .map(|r| Hit {
                    id: ids[r],
                    score: dot(q, self.store.row(r)),
                })
                .collect(),
            Some(g) => g
                .search(&self.store, q, g.params.ef_search.max(k))
                .into_iter()
                .map(|c| Hit {
                    id: ids[c.node as usize],
                    score: dot(q, self.store.row(c.node as usize)),
                })
                .collect(),
        };
        if hits.len() > k {
            let nth = |a: &Hit, b: &Hit| b.score.total_cmp(&a.score).then(a.id.cmp(&b.id));
            hits.select_nth_unstable_by(k - 1, nth);
            hits.truncate(k);
        }
        rank(&mut hits, k);
        Ok(hits)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(INDEX_MAGIC);
        out.extend_from_slice(&INDEX_VERSION.to_le_bytes());
        out.push(self.graph.is_some() as u8);
        self.store.write_records(&mut out);
        if let Some(g) = &self.graph {
            g.write(&mut out);
        }
        seal(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::open(bytes, "index", INDEX_MAGIC, INDEX_VERSION)?;
        let mode = r.u8()?;
        if mode > 1 {
            return Err(r.bad(format!("unknown mode {mode}")));
        }
        let store = EmbeddingStore::read_records(&mut r)?;
        if store.is_empty() {
            return Err(Error::EmptyStore);
        }
        let graph = if mode == 1 {
            Some(Hnsw::read(&mut r, store.len())?)
        } else {
            None
        };
        r.finish()?;
        Ok(Self { store, graph })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&read_bytes(path, "index")?)
    }
}

#[cfg(test)]
mod tests;
