//! JSON files for permutations, block maps, families, descriptors, gate
//! sequences and certificates.
//!
//! Every artifact type carries its own serde format; loading validates the
//! same invariants as the constructors and reports the line and column of
//! the failure.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// Pretty-printed JSON with fields in declaration order.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Parse {
        location: "serialize".into(),
        message: e.to_string(),
    })
}

/// Parses `text`, naming the offending field path and, for syntax and type
/// errors, the line and column.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let mut location = format!("field `{path}`");
        if inner.line() > 0 {
            location = format!("line {}, column {}, {location}", inner.line(), inner.column());
        }
        Error::Parse {
            location,
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| Error::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    Ok(value)
}

pub fn save<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = to_json(value)?;
    fs::write(path, text + "\n").map_err(|e| Error::Parse {
        location: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse {
        location: path.display().to_string(),
        message: e.to_string(),
    })?;
    from_json(&text).map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}: {location}", path.display()),
            message,
        },
        e => e,
    })
}
