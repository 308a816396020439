//! Checkpoint file:
//!
//! ```text
//! b"TPCK" | u32 LE format version | u32 LE header length | JSON header | tensors
//! ```
//!
//! Tensors are raw little-endian `f32` in the order listed by the header's
//! `tensors` field. The params hash is the SHA-256 of the tensor bytes.

use serde::{Deserialize, Serialize};

use super::config::EncoderConfig;
use super::model::{Student, Teacher};
use crate::artifact::sha256_hex;
use crate::error::{Error, Result};
use crate::nn::{Matrix, ParamSet};
use crate::scalar::Scalar;

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"TPCK";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Teacher,
    Student,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorInfo {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub kind: ModelKind,
    pub encoder: EncoderConfig,
    /// Student only.
    pub languages: Vec<String>,
    pub vocab_size: usize,
    pub vocab_hash: Option<String>,
    pub seed: u64,
    pub phase: u8,
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_sim: Option<f64>,
    pub config_hash: String,
    pub code_version: String,
    pub params_hash: String,
    pub tensors: Vec<TensorInfo>,
}

/// Training provenance recorded alongside the tensors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CheckpointMeta {
    pub seed: u64,
    pub phase: u8,
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_sim: Option<f64>,
    pub config_hash: String,
    pub vocab_hash: Option<String>,
}

pub(crate) fn check_layout<S: Scalar>(expected: &ParamSet<S>, found: &ParamSet<S>) -> Result<()> {
    if expected.len() != found.len() {
        return Err(Error::format(
            "checkpoint",
            format!("expected {} tensors, found {}", expected.len(), found.len()),
        ));
    }
    for (e, f) in expected.iter().zip(found.iter()) {
        if e.name != f.name || e.value.shape() != f.value.shape() {
            return Err(Error::format(
                "checkpoint",
                format!("tensor {} {:?} does not match expected {} {:?}", f.name, f.value.shape(), e.name, e.value.shape()),
            ));
        }
    }
    Ok(())
}

fn encode<S: Scalar>(mut header: CheckpointHeader, params: &ParamSet<S>) -> Vec<u8> {
    let data = params.to_le_bytes();
    header.params_hash = sha256_hex(&data);
    header.tensors = params
        .iter()
        .map(|p| TensorInfo {
            name: p.name.clone(),
            rows: p.value.rows(),
            cols: p.value.cols(),
        })
        .collect();
    let json = serde_json::to_vec(&header).expect("header serialises");
    let mut out = Vec::with_capacity(12 + json.len() + data.len());
    out.extend_from_slice(CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    out.extend_from_slice(&data);
    out
}

fn header_of(kind: ModelKind, config: &EncoderConfig, languages: Vec<String>, vocab_size: usize, meta: &CheckpointMeta) -> CheckpointHeader {
    CheckpointHeader {
        kind,
        encoder: config.clone(),
        languages,
        vocab_size,
        vocab_hash: meta.vocab_hash.clone(),
        seed: meta.seed,
        phase: meta.phase,
        epoch: meta.epoch,
        train_loss: meta.train_loss,
        val_loss: meta.val_loss,
        val_sim: meta.val_sim,
        config_hash: meta.config_hash.clone(),
        code_version: crate::artifact::CODE_VERSION.to_string(),
        params_hash: String::new(),
        tensors: Vec::new(),
    }
}

pub fn save_teacher<S: Scalar>(t: &Teacher<S>, meta: &CheckpointMeta) -> Vec<u8> {
    encode(header_of(ModelKind::Teacher, &t.config, Vec::new(), 0, meta), &t.params)
}

pub fn save_student<S: Scalar>(s: &Student<S>, meta: &CheckpointMeta) -> Vec<u8> {
    encode(
        header_of(ModelKind::Student, &s.config, s.languages.clone(), s.vocab_size, meta),
        &s.params,
    )
}

/// Parses the header and tensors; the tensor bytes must hash to the
/// recorded params hash.
pub fn read_checkpoint<S: Scalar>(bytes: &[u8]) -> Result<(CheckpointHeader, ParamSet<S>)> {
    let bad = |why: &str| Error::format("checkpoint", why.to_string());
    if bytes.len() < 12 || &bytes[..4] != CHECKPOINT_MAGIC {
        return Err(bad("not a checkpoint file"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != CHECKPOINT_VERSION {
        return Err(Error::VersionMismatch {
            what: "checkpoint",
            found: version,
            expected: CHECKPOINT_VERSION,
        });
    }
    let hlen = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let body = bytes.get(12..12 + hlen).ok_or_else(|| bad("truncated header"))?;
    let header: CheckpointHeader = serde_json::from_slice(body)?;
    let data = &bytes[12 + hlen..];
    let expected: usize = header.tensors.iter().map(|t| t.rows * t.cols * 4).sum();
    if data.len() != expected {
        return Err(bad(&format!("expected {expected} tensor bytes, found {}", data.len())));
    }
    let found = sha256_hex(data);
    if found != header.params_hash {
        return Err(Error::HashMismatch {
            what: "checkpoint tensors",
            expected: header.params_hash.clone(),
            found,
        });
    }
    let mut params = ParamSet::new();
    let mut offset = 0;
    for t in &header.tensors {
        let n = t.rows * t.cols;
        let values = data[offset..offset + 4 * n]
            .chunks_exact(4)
            .map(|c| S::of(f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64))
            .collect();
        offset += 4 * n;
        let decay = !t.name.starts_with("emb.");
        params.push(t.name.clone(), Matrix::from_vec(t.rows, t.cols, values), decay);
    }
    Ok((header, params))
}

pub fn load_teacher<S: Scalar>(bytes: &[u8]) -> Result<(Teacher<S>, CheckpointHeader)> {
    let (header, params) = read_checkpoint::<S>(bytes)?;
    if header.kind != ModelKind::Teacher {
        return Err(Error::format("checkpoint", "expected a teacher checkpoint"));
    }
    Ok((Teacher::with_params(header.encoder.clone(), params)?, header))
}

pub fn load_student<S: Scalar>(bytes: &[u8]) -> Result<(Student<S>, CheckpointHeader)> {
    let (header, params) = read_checkpoint::<S>(bytes)?;
    if header.kind != ModelKind::Student {
        return Err(Error::format("checkpoint", "expected a student checkpoint"));
    }
    let s = Student::with_params(header.encoder.clone(), header.vocab_size, header.languages.clone(), params)?;
    Ok((s, header))
}
