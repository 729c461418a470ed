//! Dataset manifest types.
//!
//! A manifest is an ordered list of image items, each tagged with capture
//! conditions and zero or more labeled boxes. The in-memory representation is
//! format-agnostic; parsing and serialization live in the companion crate.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::Result;

/// Lighting condition under which an image was captured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeOfDay {
    Day,
    Night,
    DawnDusk,
    /// Attribute absent or unrecognized.
    Unknown,
}

/// Whether an item is an original capture or synthesized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Provenance {
    #[default]
    Real,
    Generated,
}

/// Axis-aligned box, `x1 <= x2`, `y1 <= y2`, all coordinates finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box2D {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl Box2D {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self> {
        if !(x1.is_finite() && y1.is_finite() && x2.is_finite() && y2.is_finite()) {
            return Err(CoreError::NonFinite {
                what: "box coordinates",
            });
        }
        if x1 > x2 || y1 > y2 {
            return Err(CoreError::InvalidParam {
                name: "box2d",
                reason: alloc::format!("requires x1 <= x2 and y1 <= y2, got ({x1},{y1},{x2},{y2})"),
            });
        }
        Ok(Box2D { x1, y1, x2, y2 })
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

/// One annotated object inside an item.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectLabel {
    /// Class name, never empty.
    pub category: String,
    pub box2d: Box2D,
}

impl ObjectLabel {
    pub fn new(category: impl Into<String>, box2d: Box2D) -> Result<Self> {
        let category = category.into();
        if category.is_empty() {
            return Err(CoreError::Empty {
                what: "label category",
            });
        }
        Ok(ObjectLabel { category, box2d })
    }
}

/// One image entry in a manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestItem {
    pub id: String,
    pub timeofday: TimeOfDay,
    pub provenance: Provenance,
    pub labels: Vec<ObjectLabel>,
}

impl ManifestItem {
    pub fn new(id: impl Into<String>, timeofday: TimeOfDay) -> Self {
        ManifestItem {
            id: id.into(),
            timeofday,
            provenance: Provenance::Real,
            labels: Vec::new(),
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn with_labels(mut self, labels: Vec<ObjectLabel>) -> Self {
        self.labels = labels;
        self
    }
}

/// Named, ordered collection of items with unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub name: String,
    items: Vec<ManifestItem>,
}

impl DatasetManifest {
    /// Builds a manifest, rejecting duplicate item ids. Item order is kept.
    pub fn new(name: impl Into<String>, items: Vec<ManifestItem>) -> Result<Self> {
        let mut seen = alloc::collections::BTreeSet::new();
        for item in &items {
            if !seen.insert(item.id.as_str()) {
                return Err(CoreError::DuplicateId {
                    id: item.id.clone(),
                });
            }
        }
        Ok(DatasetManifest {
            name: name.into(),
            items,
        })
    }

    pub fn items(&self) -> &[ManifestItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Items captured at night.
    pub fn count_night(&self) -> usize {
        self.items
            .iter()
            .filter(|i| i.timeofday == TimeOfDay::Night)
            .count()
    }

    /// Items captured in daytime.
    pub fn count_day(&self) -> usize {
        self.items
            .iter()
            .filter(|i| i.timeofday == TimeOfDay::Day)
            .count()
    }

    /// Consumes the manifest and returns its items.
    pub fn into_items(self) -> Vec<ManifestItem> {
        self.items
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_rejects_inverted_and_nonfinite() {
        assert!(Box2D::new(2.0, 0.0, 1.0, 1.0).is_err());
        assert!(Box2D::new(0.0, 0.0, 1.0, f64::NAN).is_err());
        assert!(Box2D::new(0.0, 0.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn box_area() {
        let b = Box2D::new(1.0, 1.0, 3.0, 3.0).unwrap();
        assert_eq!(b.area(), 4.0);
    }

    #[test]
    fn label_rejects_empty_category() {
        let b = Box2D::new(0.0, 0.0, 1.0, 1.0).unwrap();
        assert!(ObjectLabel::new("", b).is_err());
        assert!(ObjectLabel::new("car", b).is_ok());
    }

    #[test]
    fn manifest_rejects_duplicate_ids() {
        let items = alloc::vec![
            ManifestItem::new("a", TimeOfDay::Day),
            ManifestItem::new("a", TimeOfDay::Night),
        ];
        let err = DatasetManifest::new("d", items).unwrap_err();
        assert_eq!(
            err,
            CoreError::DuplicateId {
                id: String::from("a")
            }
        );
    }

    #[test]
    fn manifest_counts_by_timeofday() {
        let items = alloc::vec![
            ManifestItem::new("a", TimeOfDay::Day),
            ManifestItem::new("b", TimeOfDay::Night),
            ManifestItem::new("c", TimeOfDay::Night),
            ManifestItem::new("d", TimeOfDay::Unknown),
        ];
        let m = DatasetManifest::new("d", items).unwrap();
        assert_eq!(m.count_day(), 1);
        assert_eq!(m.count_night(), 2);
        assert_eq!(m.len(), 4);
    }
}
