//! Config resolution: command-line flags override values from an optional
//! JSON config file, which override the environment/default values.
//! The fully resolved configuration is echoed into every output directory
//! as `meta.json` for provenance.

use std::path::Path;

use dpiov_core::{Error, Result};
use serde_json::Value;

/// Seed fallback read from `DPIOV_SEED` when neither flag nor file set one.
pub const SEED_ENV: &str = "DPIOV_SEED";

pub fn load_file_config(path: Option<&Path>) -> Result<Value> {
    match path {
        None => Ok(Value::Object(Default::default())),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            let v: Value = serde_json::from_str(&text)?;
            if !v.is_object() {
                return Err(Error::InvalidParameter(format!(
                    "config file {} must hold a JSON object",
                    p.display()
                )));
            }
            Ok(v)
        }
    }
}

pub fn env_seed() -> Option<u64> {
    std::env::var(SEED_ENV).ok().and_then(|s| s.parse().ok())
}

/// Resolve the seed with the documented precedence:
/// flag > config file > DPIOV_SEED > 0.
pub fn resolve_seed(flag: Option<u64>, file: &Value) -> u64 {
    flag.or_else(|| file_u64(file, "seed"))
        .or_else(env_seed)
        .unwrap_or(0)
}

pub fn file_u64(cfg: &Value, key: &str) -> Option<u64> {
    cfg.get(key)?.as_u64()
}

pub fn file_usize(cfg: &Value, key: &str) -> Option<usize> {
    cfg.get(key)?.as_u64().map(|v| v as usize)
}

pub fn file_f64(cfg: &Value, key: &str) -> Option<f64> {
    cfg.get(key)?.as_f64()
}

pub fn file_bool(cfg: &Value, key: &str) -> Option<bool> {
    cfg.get(key)?.as_bool()
}

pub fn file_string(cfg: &Value, key: &str) -> Option<String> {
    cfg.get(key)?.as_str().map(str::to_owned)
}

pub fn file_f64_list(cfg: &Value, key: &str) -> Option<Vec<f64>> {
    cfg.get(key)?
        .as_array()?
        .iter()
        .map(Value::as_f64)
        .collect()
}

pub fn file_string_list(cfg: &Value, key: &str) -> Option<Vec<String>> {
    cfg.get(key)?
        .as_array()?
        .iter()
        .map(|v| v.as_str().map(str::to_owned))
        .collect()
}

/// Short stable hash of the resolved config, embedded in artifact ids so
/// result rows can be traced back to the exact configuration.
pub fn config_hash(resolved: &Value) -> String {
    let text = serde_json::to_string(resolved).expect("config serializes");
    // FNV-1a, folded to 32 bits
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    format!("{:08x}", (h >> 32) as u32 ^ h as u32)
}

/// Write `meta.json`: the resolved config plus the artifact list.
pub fn write_meta(out_dir: &Path, resolved: &Value, artifacts: &[String]) -> Result<()> {
    let meta = serde_json::json!({
        "config": resolved,
        "config_hash": config_hash(resolved),
        "artifacts": artifacts,
    });
    std::fs::write(
        out_dir.join("meta.json"),
        serde_json::to_string_pretty(&meta)?,
    )?;
    Ok(())
}

/// Parse a comma-separated list of floats.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad number '{p}' in list '{s}'")))
        })
        .collect()
}

/// Parse a comma-separated list of strings.
pub fn parse_string_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(|p| p.trim().to_string())
        .filter(|p| !p.is_empty())
        .collect()
}
