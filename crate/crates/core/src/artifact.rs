//! Provenance stamps and file helpers shared by every artifact writer.

use std::fs;
use std::io::ErrorKind;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// `(config hash, seed, code version)` carried in every artifact header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stamp {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

impl Stamp {
    pub fn new(config_hash: impl Into<String>, seed: u64) -> Self {
        Self {
            config_hash: config_hash.into(),
            seed,
            version: CODE_VERSION.to_string(),
        }
    }

    pub fn render(&self) -> String {
        format!("config={} seed={} version={}", self.config_hash, self.seed, self.version)
    }

    /// Inverse of [`Stamp::render`]; extra words in `text` are ignored.
    pub fn parse(text: &str) -> Option<Self> {
        let mut config_hash = None;
        let mut seed = None;
        let mut version = None;
        for word in text.split_whitespace() {
            if let Some(v) = word.strip_prefix("config=") {
                config_hash = Some(v.to_string());
            } else if let Some(v) = word.strip_prefix("seed=") {
                seed = v.parse().ok();
            } else if let Some(v) = word.strip_prefix("version=") {
                version = Some(v.to_string());
            }
        }
        Some(Self {
            config_hash: config_hash?,
            seed: seed?,
            version: version?,
        })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads an artifact produced by an earlier pipeline stage. A missing file
/// is reported with the stage that creates it.
pub fn read_bytes(path: &Path, stage: &'static str) -> Result<Vec<u8>> {
    if path.as_os_str().is_empty() {
        return Err(Error::EmptyPath);
    }
    fs::read(path).map_err(|e| match e.kind() {
        ErrorKind::NotFound => Error::MissingArtifact {
            path: path.to_path_buf(),
            stage,
        },
        _ => Error::io(path, e),
    })
}

pub fn read_text(path: &Path, stage: &'static str) -> Result<String> {
    let bytes = read_bytes(path, stage)?;
    String::from_utf8(bytes).map_err(|_| Error::format("artifact", format!("{} is not UTF-8", path.display())))
}

/// Writes through a sibling temporary file and renames, so readers never
/// observe a half-written artifact.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if path.as_os_str().is_empty() {
        return Err(Error::EmptyPath);
    }
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Backslash-escapes `\\`, tab, newline and carriage return so a value
/// fits in one TSV field.
pub fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape_field(s: &str) -> Option<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            out.push(match chars.next()? {
                '\\' => '\\',
                't' => '\t',
                'n' => '\n',
                'r' => '\r',
                _ => return None,
            });
        } else {
            out.push(c);
        }
    }
    Some(out)
}

/// Splits `# <magic> v<version> <stamp>` off the first line of a text
/// artifact, checking magic and version; returns the stamp text and the
/// remaining lines.
pub fn split_header<'a>(text: &'a str, magic: &'static str, version: u32) -> Result<(&'a str, std::str::Lines<'a>)> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let rest = header
        .strip_prefix("# ")
        .and_then(|h| h.strip_prefix(magic))
        .and_then(|h| h.strip_prefix(" v"))
        .ok_or_else(|| Error::format(magic, "missing header line"))?;
    let (v, stamp) = rest.split_once(' ').unwrap_or((rest, ""));
    let found: u32 = v.parse().map_err(|_| Error::format(magic, "bad version in header"))?;
    if found != version {
        return Err(Error::VersionMismatch {
            what: magic,
            found,
            expected: version,
        });
    }
    Ok((stamp, lines))
}
