//! Config resolution: preset, then the TOML file, then `--set` overrides.

use std::path::Path;

use serde::Deserialize;
use toml::{Table, Value};
use toponym_core::pipeline::PipelineConfig;

pub const DEFAULT_PRESET: &str = "paper";

/// Parses `key.path=value`. The value is read as a TOML literal when it
/// parses as one and as a bare string otherwise.
pub fn parse_override(s: &str) -> Result<(Vec<String>, Value), String> {
    let (key, raw) = s.split_once('=').ok_or_else(|| format!("override `{s}` is not KEY=VALUE"))?;
    let key: Vec<String> = key.trim().split('.').map(|k| k.trim().to_string()).collect();
    if key.iter().any(|k| k.is_empty()) {
        return Err(format!("override `{s}` has an empty key segment"));
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    Ok((key, value))
}

fn set_path(table: &mut Table, key: &[String], value: Value) -> Result<(), String> {
    let (last, parents) = key.split_last().expect("keys are non-empty");
    let mut t = table;
    for k in parents {
        let entry = t.entry(k.clone()).or_insert_with(|| Value::Table(Table::new()));
        t = entry
            .as_table_mut()
            .ok_or_else(|| format!("`{k}` is not a table and cannot hold `{}`", key.join(".")))?;
    }
    t.insert(last.clone(), value);
    Ok(())
}

fn merge(base: &mut Table, over: Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

pub fn resolve(file: Option<&Path>, overrides: &[String]) -> Result<PipelineConfig, String> {
    let mut user = match file {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
            text.parse::<Table>().map_err(|e| format!("config {}: {e}", p.display()))?
        }
        None => Table::new(),
    };
    for o in overrides {
        let (key, value) = parse_override(o)?;
        set_path(&mut user, &key, value)?;
    }
    let preset = match user.remove("preset") {
        None => DEFAULT_PRESET.to_string(),
        Some(Value::String(s)) => s,
        Some(other) => return Err(format!("preset must be a string, got {other}")),
    };
    let base = PipelineConfig::preset(&preset).map_err(|e| e.to_string())?;
    let mut table = Table::try_from(&base).map_err(|e| format!("internal: {e}"))?;
    merge(&mut table, user);
    let cfg = PipelineConfig::deserialize(Value::Table(table)).map_err(|e| format!("config: {e}"))?;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

pub fn render(cfg: &PipelineConfig) -> String {
    toml::to_string_pretty(cfg).expect("config serialises")
}
