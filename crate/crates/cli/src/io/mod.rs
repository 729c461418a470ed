//! On-disk formats. JSON for manifests, predictions, reports and results;
//! CSV or a binary layout for feature matrices; binary for fitted models.

pub mod features;
pub mod manifest;
pub mod model;
pub mod predictions;
pub mod report;
pub mod results;

use std::fs;
use std::path::Path;

use crate::{CliError, Result};

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Serializes a value as pretty JSON with a trailing newline.
pub(crate) fn to_json_bytes<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable value");
    bytes.push(b'\n');
    bytes
}

pub(crate) fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, bytes: &[u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| CliError::format(path, e.to_string()))
}
