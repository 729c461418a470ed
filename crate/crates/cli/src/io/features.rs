//! Feature matrix files. Two interchangeable layouts:
//!
//! * CSV with header `id,f0,...,f{d-1}`; values use the shortest decimal form
//!   that parses back to the same bits.
//! * Binary: magic `DGF1`, u64 row count, u64 width, row-major values, then
//!   one id per line. All integers and floats little endian.
//!
//! Loading sniffs the magic; saving picks CSV for a `.csv` extension and the
//! binary layout otherwise.

use std::path::Path;

use driftgauge_core::FeatureMatrix;

use super::{read_bytes, write_bytes};
use crate::{CliError, Result};

const MAGIC: &[u8; 4] = b"DGF1";

pub fn load_features(path: &Path) -> Result<FeatureMatrix> {
    let bytes = read_bytes(path)?;
    if bytes.is_empty() {
        return Err(CliError::format(path, "empty feature file"));
    }
    if bytes.starts_with(MAGIC) {
        load_binary(path, &bytes)
    } else {
        load_csv(path, &bytes)
    }
}

pub fn save_features(path: &Path, m: &FeatureMatrix) -> Result<()> {
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        save_csv(path, m)
    } else {
        save_binary(path, m)
    }
}

fn load_csv(path: &Path, bytes: &[u8]) -> Result<FeatureMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(bytes);
    let headers = reader
        .headers()
        .map_err(|e| CliError::format(path, e.to_string()))?;
    if headers.is_empty() || &headers[0] != "id" {
        return Err(CliError::format(path, "first column header must be `id`"));
    }
    if headers.len() < 2 {
        return Err(CliError::format(path, "no feature columns"));
    }
    let d = headers.len() - 1;
    let mut ids = Vec::new();
    let mut data = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::format(path, e.to_string()))?;
        ids.push(record[0].to_string());
        for field in record.iter().skip(1) {
            let v: f64 = field
                .parse()
                .map_err(|_| CliError::format(path, format!("not a number: {field:?}")))?;
            data.push(v);
        }
    }
    Ok(FeatureMatrix::from_flat(ids, data, d)?)
}

fn save_csv(path: &Path, m: &FeatureMatrix) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = Vec::with_capacity(m.d() + 1);
    header.push("id".to_string());
    for j in 0..m.d() {
        header.push(format!("f{j}"));
    }
    writer
        .write_record(&header)
        .map_err(|e| CliError::format(path, e.to_string()))?;
    for (id, row) in m.ids().iter().zip(m.rows()) {
        let mut record = Vec::with_capacity(m.d() + 1);
        record.push(id.clone());
        for v in row {
            record.push(format!("{v}"));
        }
        writer
            .write_record(&record)
            .map_err(|e| CliError::format(path, e.to_string()))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::format(path, e.to_string()))?;
    write_bytes(path, &bytes)
}

fn load_binary(path: &Path, bytes: &[u8]) -> Result<FeatureMatrix> {
    let fail = |msg: &str| CliError::format(path, msg);
    if bytes.len() < 20 {
        return Err(fail("truncated header"));
    }
    let n = u64::from_le_bytes(bytes[4..12].try_into().unwrap()) as usize;
    let d = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
    let value_bytes = n
        .checked_mul(d)
        .and_then(|c| c.checked_mul(8))
        .ok_or_else(|| fail("row count overflow"))?;
    let ids_start = 20 + value_bytes;
    if bytes.len() < ids_start {
        return Err(fail("truncated values"));
    }
    let data: Vec<f64> = bytes[20..ids_start]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let tail = std::str::from_utf8(&bytes[ids_start..])
        .map_err(|_| fail("ids are not valid UTF-8"))?;
    let ids: Vec<String> = tail.split_terminator('\n').map(str::to_string).collect();
    if ids.len() != n {
        return Err(fail("id count does not match row count"));
    }
    Ok(FeatureMatrix::from_flat(ids, data, d)?)
}

fn save_binary(path: &Path, m: &FeatureMatrix) -> Result<()> {
    for id in m.ids() {
        if id.contains('\n') {
            return Err(CliError::format(
                path,
                format!("id {id:?} contains a newline"),
            ));
        }
    }
    let mut bytes = Vec::with_capacity(20 + m.values().len() * 8);
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&(m.n() as u64).to_le_bytes());
    bytes.extend_from_slice(&(m.d() as u64).to_le_bytes());
    for v in m.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    for id in m.ids() {
        bytes.extend_from_slice(id.as_bytes());
        bytes.push(b'\n');
    }
    write_bytes(path, &bytes)
}
