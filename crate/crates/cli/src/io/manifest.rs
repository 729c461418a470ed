//! Manifest JSON, a minimal mirror of the BDD100K label format: an array of
//! `{"name", "attributes": {"timeofday"}, "labels": [{"category", "box2d"}],
//! "provenance"}` objects. Unknown fields are ignored on load. Labels without
//! a `box2d` (polygon annotations and the like) are skipped.

use std::path::Path;

use serde::{Deserialize, Serialize};

use driftgauge_core::rng::RngSeed;
use driftgauge_core::types::{
    Box2D, DatasetManifest, ManifestItem, ObjectLabel, Provenance, TimeOfDay,
};

use super::{parse_json, read_bytes, to_json_bytes, write_bytes};
use crate::{CliError, Result};

#[derive(Serialize, Deserialize)]
struct FileItem {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    attributes: Option<FileAttributes>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    labels: Vec<FileLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct FileAttributes {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    timeofday: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct FileLabel {
    category: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    box2d: Option<FileBox>,
}

#[derive(Serialize, Deserialize)]
struct FileBox {
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
}

fn timeofday_from(attributes: &Option<FileAttributes>) -> TimeOfDay {
    match attributes.as_ref().and_then(|a| a.timeofday.as_deref()) {
        Some("daytime") => TimeOfDay::Day,
        Some("night") => TimeOfDay::Night,
        Some("dawn/dusk") => TimeOfDay::DawnDusk,
        _ => TimeOfDay::Unknown,
    }
}

fn timeofday_to(tod: TimeOfDay) -> Option<FileAttributes> {
    let s = match tod {
        TimeOfDay::Day => "daytime",
        TimeOfDay::Night => "night",
        TimeOfDay::DawnDusk => "dawn/dusk",
        TimeOfDay::Unknown => return None,
    };
    Some(FileAttributes {
        timeofday: Some(s.to_string()),
    })
}

/// Loads a manifest file, giving the manifest the caller's `name`.
pub fn load_manifest(path: &Path, name: &str) -> Result<DatasetManifest> {
    let bytes = read_bytes(path)?;
    let raw: Vec<FileItem> = parse_json(path, &bytes)?;
    let mut items = Vec::with_capacity(raw.len());
    for entry in raw {
        let provenance = match entry.provenance.as_deref() {
            None | Some("real") => Provenance::Real,
            Some("generated") => Provenance::Generated,
            Some(other) => {
                return Err(CliError::format(
                    path,
                    format!("item {:?}: unrecognized provenance {other:?}", entry.name),
                ));
            }
        };
        let mut labels = Vec::new();
        for label in entry.labels {
            let Some(b) = label.box2d else { continue };
            let box2d = Box2D::new(b.x1, b.y1, b.x2, b.y2)?;
            labels.push(ObjectLabel::new(label.category, box2d)?);
        }
        items.push(
            ManifestItem::new(entry.name, timeofday_from(&entry.attributes))
                .with_provenance(provenance)
                .with_labels(labels),
        );
    }
    Ok(DatasetManifest::new(name, items)?)
}

/// Writes a manifest as deterministic JSON. The manifest name is not stored;
/// it is reattached by the caller of [`load_manifest`].
pub fn save_manifest(path: &Path, manifest: &DatasetManifest) -> Result<()> {
    let raw: Vec<FileItem> = manifest
        .items()
        .iter()
        .map(|item| FileItem {
            name: item.id.clone(),
            attributes: timeofday_to(item.timeofday),
            labels: item
                .labels
                .iter()
                .map(|l| FileLabel {
                    category: l.category.clone(),
                    box2d: Some(FileBox {
                        x1: l.box2d.x1,
                        y1: l.box2d.y1,
                        x2: l.box2d.x2,
                        y2: l.box2d.y2,
                    }),
                })
                .collect(),
            provenance: match item.provenance {
                Provenance::Real => None,
                Provenance::Generated => Some("generated".to_string()),
            },
        })
        .collect();
    write_bytes(path, &to_json_bytes(&raw))
}

/// Provenance sidecar written next to every ratio-set manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSidecar {
    pub label: String,
    pub n_day: usize,
    pub n_night: usize,
    pub seed: u64,
}

impl SplitSidecar {
    pub fn seed(&self) -> RngSeed {
        RngSeed(self.seed)
    }
}

pub fn save_split_sidecar(path: &Path, sidecar: &SplitSidecar) -> Result<()> {
    write_bytes(path, &to_json_bytes(sidecar))
}

pub fn load_split_sidecar(path: &Path) -> Result<SplitSidecar> {
    let bytes = read_bytes(path)?;
    parse_json(path, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use driftgauge_core::CoreError;
    use tempfile::tempdir;

    fn write(path: &Path, s: &str) {
        std::fs::write(path, s).unwrap();
    }

    #[test]
    fn parses_bdd_style_records_with_defaults() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("m.json");
        write(
            &p,
            r#"[
              {"name": "a", "attributes": {"timeofday": "daytime", "weather": "clear"},
               "labels": [{"category": "car", "box2d": {"x1": 1.0, "y1": 2.0, "x2": 3.0, "y2": 4.0}},
                          {"category": "lane"}]},
              {"name": "b", "attributes": {"timeofday": "night"}},
              {"name": "c"}
            ]"#,
        );
        let m = load_manifest(&p, "pool").unwrap();
        assert_eq!(m.name, "pool");
        assert_eq!(m.len(), 3);
        assert_eq!(m.items()[0].timeofday, TimeOfDay::Day);
        // the boxless lane label is dropped
        assert_eq!(m.items()[0].labels.len(), 1);
        assert_eq!(m.items()[1].timeofday, TimeOfDay::Night);
        assert_eq!(m.items()[2].timeofday, TimeOfDay::Unknown);
        assert_eq!(m.items()[0].provenance, Provenance::Real);
    }

    #[test]
    fn unrecognized_timeofday_defaults_to_unknown() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("m.json");
        write(&p, r#"[{"name": "a", "attributes": {"timeofday": "noon"}}]"#);
        let m = load_manifest(&p, "x").unwrap();
        assert_eq!(m.items()[0].timeofday, TimeOfDay::Unknown);
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("m.json");
        write(&p, r#"[{"name": "img1"}, {"name": "img1"}]"#);
        let err = load_manifest(&p, "x").unwrap_err();
        assert!(matches!(
            err,
            CliError::Core(CoreError::DuplicateId { .. })
        ));
    }

    #[test]
    fn missing_name_is_a_format_error() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("m.json");
        write(&p, r#"[{"attributes": {}}]"#);
        assert!(matches!(
            load_manifest(&p, "x").unwrap_err(),
            CliError::Format { .. }
        ));
    }

    #[test]
    fn bad_provenance_is_a_format_error() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("m.json");
        write(&p, r#"[{"name": "a", "provenance": "synthetic"}]"#);
        assert!(matches!(
            load_manifest(&p, "x").unwrap_err(),
            CliError::Format { .. }
        ));
    }

    #[test]
    fn round_trips_values_exactly() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("m.json");
        let items = vec![
            ManifestItem::new("a", TimeOfDay::Day).with_labels(vec![ObjectLabel::new(
                "car",
                Box2D::new(0.125, 0.25, 640.5, 360.75).unwrap(),
            )
            .unwrap()]),
            ManifestItem::new("b", TimeOfDay::Unknown),
            ManifestItem::new("gen/c", TimeOfDay::Night).with_provenance(Provenance::Generated),
            ManifestItem::new("d", TimeOfDay::DawnDusk),
        ];
        let m = DatasetManifest::new("set", items).unwrap();
        save_manifest(&p, &m).unwrap();
        let back = load_manifest(&p, "set").unwrap();
        assert_eq!(back, m);
        // a second save is byte identical
        let first = std::fs::read(&p).unwrap();
        save_manifest(&p, &back).unwrap();
        assert_eq!(first, std::fs::read(&p).unwrap());
    }

    #[test]
    fn sidecar_round_trips() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("set_a.split.json");
        let side = SplitSidecar {
            label: "Set A".into(),
            n_day: 40_000,
            n_night: 0,
            seed: 7,
        };
        save_split_sidecar(&p, &side).unwrap();
        assert_eq!(load_split_sidecar(&p).unwrap(), side);
    }
}
