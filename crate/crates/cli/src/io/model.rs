//! Projection model files. Single binary layout: magic `DGP1`, u64 input
//! width, u64 component count, then f64 sections in order: mean (d values),
//! components (k*d values, row major), eigenvalues (k values), total variance
//! (1 value). Everything little endian.

use std::path::Path;

use driftgauge_core::reduce::PcaModel;

use super::{read_bytes, write_bytes};
use crate::{CliError, Result};

const MAGIC: &[u8; 4] = b"DGP1";

pub fn load_model(path: &Path) -> Result<PcaModel> {
    let bytes = read_bytes(path)?;
    let fail = |msg: &str| CliError::format(path, msg);
    if bytes.len() < 20 || &bytes[..4] != MAGIC {
        return Err(fail("not a projection model file"));
    }
    let d = u64::from_le_bytes(bytes[4..12].try_into().unwrap()) as usize;
    let k = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
    let floats = d
        .checked_add(1)
        .and_then(|c| k.checked_mul(d).map(|kd| c + kd))
        .and_then(|c| c.checked_add(k))
        .ok_or_else(|| fail("size overflow"))?;
    let expected = 20 + floats * 8;
    if bytes.len() != expected {
        return Err(fail("size does not match header"));
    }
    let mut vals = bytes[20..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let mean: Vec<f64> = vals.by_ref().take(d).collect();
    let components: Vec<f64> = vals.by_ref().take(k * d).collect();
    let eigenvalues: Vec<f64> = vals.by_ref().take(k).collect();
    let total_variance = vals.next().unwrap();
    Ok(PcaModel::from_parts(
        mean,
        components,
        eigenvalues,
        total_variance,
        d,
        k,
    )?)
}

pub fn save_model(path: &Path, model: &PcaModel) -> Result<()> {
    let floats = model.d() + model.k() * model.d() + model.k() + 1;
    let mut bytes = Vec::with_capacity(20 + floats * 8);
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&(model.d() as u64).to_le_bytes());
    bytes.extend_from_slice(&(model.k() as u64).to_le_bytes());
    let sections = [
        model.mean(),
        model.components(),
        model.eigenvalues(),
        &[model.total_variance()],
    ];
    for section in sections {
        for v in section {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    write_bytes(path, &bytes)
}
