use serde_json::{Map, Value};
use thiserror::Error;

use super::{ComplianceElement, LinearController, ModelError, SeaConfig};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("invalid value at `{path}`: {message}")]
    Invariant { path: String, message: String },
}

impl ConfigError {
    pub fn path(&self) -> Option<&str> {
        match self {
            ConfigError::Parse { .. } => None,
            ConfigError::Schema { path, .. } | ConfigError::Invariant { path, .. } => Some(path),
        }
    }
}

fn schema(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

/// Parse and validate a config document.
///
/// Every key except `label` is required and unknown keys are rejected, so
/// a typo cannot silently leave a gain at zero.
pub fn parse_config(text: &str) -> Result<SeaConfig, ConfigError> {
    let root: Value = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = as_object(&root, "$")?;
    check_keys(obj, "", &["m", "b", "d1", "d2", "ca", "cl", "label"])?;

    let label = match obj.get("label") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(schema("label", "expected a string")),
    };
    let config = SeaConfig {
        m: number(obj, "", "m")?,
        b: number(obj, "", "b")?,
        d1: compliance(obj, "d1")?,
        d2: compliance(obj, "d2")?,
        ca: controller(obj, "ca")?,
        cl: controller(obj, "cl")?,
        label,
    };
    config.validate().map_err(|e| match e {
        ModelError::Invariant { path, reason } => ConfigError::Invariant {
            path,
            message: reason,
        },
        other => ConfigError::Invariant {
            path: "$".into(),
            message: other.to_string(),
        },
    })?;
    Ok(config)
}

/// Pretty JSON in the same schema [`parse_config`] reads.
pub fn serialize_config(config: &SeaConfig) -> String {
    serde_json::to_string_pretty(config).expect("plain data serializes")
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, ConfigError> {
    v.as_object()
        .ok_or_else(|| schema(path, "expected an object"))
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn check_keys(obj: &Map<String, Value>, prefix: &str, allowed: &[&str]) -> Result<(), ConfigError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(schema(&join(prefix, k), "unknown key")),
        None => Ok(()),
    }
}

fn number(obj: &Map<String, Value>, prefix: &str, key: &str) -> Result<f64, ConfigError> {
    let path = join(prefix, key);
    match obj.get(key) {
        None => Err(schema(&path, "missing required field")),
        Some(v) => v.as_f64().ok_or_else(|| schema(&path, "expected a number")),
    }
}

fn child<'a>(
    obj: &'a Map<String, Value>,
    key: &str,
) -> Result<&'a Map<String, Value>, ConfigError> {
    match obj.get(key) {
        None => Err(schema(key, "missing required field")),
        Some(v) => as_object(v, key),
    }
}

fn compliance(obj: &Map<String, Value>, key: &str) -> Result<ComplianceElement, ConfigError> {
    let o = child(obj, key)?;
    check_keys(o, key, &["k", "c"])?;
    Ok(ComplianceElement {
        k: number(o, key, "k")?,
        c: number(o, key, "c")?,
    })
}

fn controller(obj: &Map<String, Value>, key: &str) -> Result<LinearController, ConfigError> {
    let o = child(obj, key)?;
    check_keys(o, key, &["kp", "kv", "ki"])?;
    Ok(LinearController {
        kp: number(o, key, "kp")?,
        kv: number(o, key, "kv")?,
        ki: number(o, key, "ki")?,
    })
}
