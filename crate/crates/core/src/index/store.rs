//! Embedding file layout (little endian):
//!
//! ```text
//! b"TPEM"  u32 version  u32 dim  u64 count
//! u32 len  model hash (UTF-8)
//! u32 len  artifact stamp (UTF-8, may be empty)
//! count × (u64 id, dim × f32)
//! 32-byte SHA-256 of everything above
//! ```

use std::collections::HashMap;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::artifact::{read_bytes, write_atomic};
use crate::encoder::EMBED_DIM;
use crate::error::{Error, Result};

pub const EMBEDDINGS_MAGIC: &[u8; 4] = b"TPEM";
pub const EMBEDDINGS_VERSION: u32 = 1;
pub const UNIT_TOLERANCE: f32 = 1e-3;

/// Unit-norm vectors keyed by toponym id, in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingStore {
    /// Hash of the checkpoint that produced the vectors.
    pub model_hash: String,
    /// Rendered artifact stamp of the run that wrote the file.
    pub stamp: String,
    ids: Vec<u64>,
    data: Vec<f32>,
    rows: HashMap<u64, usize>,
}

impl EmbeddingStore {
    pub fn new(model_hash: impl Into<String>) -> Self {
        Self {
            model_hash: model_hash.into(),
            ..Self::default()
        }
    }

    pub fn insert(&mut self, id: u64, v: &[f32]) -> Result<()> {
        if v.len() != EMBED_DIM {
            return Err(Error::Dimensions(format!("embedding {id} has {} components, expected {EMBED_DIM}", v.len())));
        }
        let norm = v.iter().map(|x| x * x).sum::<f32>().sqrt();
        if !((norm - 1.0).abs() <= UNIT_TOLERANCE) {
            return Err(Error::NotUnitNorm { id, norm });
        }
        if self.rows.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        self.rows.insert(id, self.ids.len());
        self.ids.push(id);
        self.data.extend_from_slice(v);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    /// Vector at insertion position `row`.
    pub fn row(&self, row: usize) -> &[f32] {
        &self.data[row * EMBED_DIM..(row + 1) * EMBED_DIM]
    }

    pub fn get(&self, id: u64) -> Option<&[f32]> {
        self.rows.get(&id).map(|&r| self.row(r))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &[f32])> {
        self.ids.iter().enumerate().map(|(r, &id)| (id, self.row(r)))
    }

    pub(crate) fn write_records(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(EMBED_DIM as u32).to_le_bytes());
        out.extend_from_slice(&(self.len() as u64).to_le_bytes());
        put_str(out, &self.model_hash);
        put_str(out, &self.stamp);
        for (id, v) in self.iter() {
            out.extend_from_slice(&id.to_le_bytes());
            for x in v {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
    }

    pub(crate) fn read_records(r: &mut Reader<'_>) -> Result<Self> {
        let dim = r.u32()? as usize;
        if dim != EMBED_DIM {
            return Err(r.bad(format!("dimension {dim}, expected {EMBED_DIM}")));
        }
        let count = r.u64()? as usize;
        let model_hash = r.string()?;
        let stamp = r.string()?;
        if count.checked_mul(8 + 4 * dim).map_or(true, |need| need > r.remaining()) {
            return Err(r.bad("record count exceeds file size"));
        }
        let mut store = Self::new(model_hash);
        store.stamp = stamp;
        let mut v = vec![0f32; dim];
        for _ in 0..count {
            let id = r.u64()?;
            for x in &mut v {
                *x = r.f32()?;
            }
            store.insert(id, &v)?;
        }
        Ok(store)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(64 + self.len() * (8 + 4 * EMBED_DIM));
        out.extend_from_slice(EMBEDDINGS_MAGIC);
        out.extend_from_slice(&EMBEDDINGS_VERSION.to_le_bytes());
        self.write_records(&mut out);
        seal(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::open(bytes, "embeddings", EMBEDDINGS_MAGIC, EMBEDDINGS_VERSION)?;
        let store = Self::read_records(&mut r)?;
        r.finish()?;
        Ok(store)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&read_bytes(path, "embed")?)
    }
}

pub(crate) fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

/// Appends the SHA-256 trailer.
pub(crate) fn seal(mut out: Vec<u8>) -> Vec<u8> {
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

/// Bounds-checked little-endian cursor over a sealed file.
pub(crate) struct Reader<'a> {
    what: &'static str,
    body: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    /// Checks magic, version and trailer before any field is decoded.
    pub(crate) fn open(bytes: &'a [u8], what: &'static str, magic: &[u8; 4], version: u32) -> Result<Self> {
        if bytes.len() < 8 + 32 || &bytes[..4] != magic {
            return Err(Error::format(what, "bad magic"));
        }
        let found = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
        if found != version {
            return Err(Error::VersionMismatch {
                what,
                found,
                expected: version,
            });
        }
        let (body, trailer) = bytes.split_at(bytes.len() - 32);
        if Sha256::digest(body).as_slice() != trailer {
            return Err(Error::format(what, "checksum mismatch (file is corrupted or truncated)"));
        }
        Ok(Self { what, body, pos: 8 })
    }

    pub(crate) fn bad(&self, why: impl Into<String>) -> Error {
        Error::format(self.what, format!("at byte {}: {}", self.pos, why.into()))
    }

    pub(crate) fn remaining(&self) -> usize {
        self.body.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(self.bad("unexpected end of data"));
        }
        let s = &self.body[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    pub(crate) fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    pub(crate) fn string(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| self.bad("invalid UTF-8"))
    }

    pub(crate) fn finish(self) -> Result<()> {
        if self.remaining() != 0 {
            return Err(self.bad("trailing bytes"));
        }
        Ok(())
    }
}
