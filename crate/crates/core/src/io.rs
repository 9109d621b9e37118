//! Byte-stable JSON: object keys sorted, floats in shortest round-trip form,
//! two-space indentation and a trailing newline.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("serialization failed: {0}")]
    Serialize(String),
}

/// Pretty JSON with sorted keys. Going through `serde_json::Value` sorts
/// struct fields as well as map keys.
pub fn to_stable_json<T: Serialize>(value: &T) -> Result<String, IoError> {
    let v = serde_json::to_value(value).map_err(|e| IoError::Serialize(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| IoError::Serialize(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn from_json_str<T: DeserializeOwned>(s: &str, path: &Path) -> Result<T, IoError> {
    serde_json::from_str(s).map_err(|e| IoError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let s = fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_json_str(&s, path)
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    write_text(path, &to_stable_json(value)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}
