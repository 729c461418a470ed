//! Dense row-major feature matrix keyed by item ids.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::Result;

/// `n` feature rows of fixed width `d`, aligned with `n` item ids.
///
/// All values are finite. Ids are carried along so that rows stay traceable
/// back to manifest items; they are not required to be unique here, because
/// pooled matrices legitimately repeat ids.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    ids: Vec<String>,
    data: Vec<f64>,
    d: usize,
}

impl FeatureMatrix {
    /// Builds a matrix from a flat row-major buffer. `data.len()` must equal
    /// `ids.len() * d`, `d >= 1`, and every value must be finite.
    pub fn from_flat(ids: Vec<String>, data: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(CoreError::InvalidParam {
                name: "d",
                reason: String::from("feature width must be >= 1"),
            });
        }
        if data.len() != ids.len() * d {
            return Err(CoreError::DimensionMismatch {
                expected: ids.len() * d,
                actual: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::NonFinite {
                what: "feature values",
            });
        }
        Ok(FeatureMatrix { ids, data, d })
    }

    /// Builds a matrix from per-row slices, all of equal width.
    pub fn from_rows(ids: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        if ids.len() != rows.len() {
            return Err(CoreError::DimensionMismatch {
                expected: ids.len(),
                actual: rows.len(),
            });
        }
        let d = rows.first().map(|r| r.len()).unwrap_or(1);
        let mut data = Vec::with_capacity(rows.len() * d);
        for row in rows {
            if row.len() != d {
                return Err(CoreError::DimensionMismatch {
                    expected: d,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(ids, data, d)
    }

    /// Number of rows.
    pub fn n(&self) -> usize {
        self.ids.len()
    }

    /// Row width.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    /// Flat row-major view of all values.
    pub fn values(&self) -> &[f64] {
        &self.data
    }

    /// New matrix holding the given rows of `self`, in index order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut ids = Vec::with_capacity(indices.len());
        let mut data = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            ids.push(self.ids[i].clone());
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            ids,
            data,
            d: self.d,
        }
    }

    /// Stacks `self` on top of `other`. Widths must match.
    pub fn vstack(&self, other: &FeatureMatrix) -> Result<Self> {
        if self.d != other.d {
            return Err(CoreError::DimensionMismatch {
                expected: self.d,
                actual: other.d,
            });
        }
        let mut ids = self.ids.clone();
        ids.extend(other.ids.iter().cloned());
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FeatureMatrix { ids, data, d: self.d })
    }
}
