//! Detection prediction files: a JSON array of objects with `image`,
//! `category`, `score` and a `box` holding corner coordinates. Order is
//! preserved on both load and save.

use std::path::Path;

use driftgauge_core::eval::Prediction;
use driftgauge_core::types::Box2D;
use serde::{Deserialize, Serialize};

use super::{parse_json, read_bytes, to_json_bytes, write_bytes};
use crate::{CliError, Result};

#[derive(Serialize, Deserialize)]
struct FilePrediction {
    image: String,
    category: String,
    score: f64,
    #[serde(rename = "box")]
    box2d: FileBox,
}

#[derive(Serialize, Deserialize)]
struct FileBox {
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
}

pub fn load_predictions(path: &Path) -> Result<Vec<Prediction>> {
    let bytes = read_bytes(path)?;
    let raw: Vec<FilePrediction> = parse_json(path, &bytes)?;
    raw.into_iter()
        .map(|p| {
            let b = Box2D::new(p.box2d.x1, p.box2d.y1, p.box2d.x2, p.box2d.y2)
                .map_err(|e| CliError::format(path, e.to_string()))?;
            Prediction::new(p.image, p.category, p.score, b)
                .map_err(|e| CliError::format(path, e.to_string()))
        })
        .collect()
}

pub fn save_predictions(path: &Path, preds: &[Prediction]) -> Result<()> {
    let raw: Vec<FilePrediction> = preds
        .iter()
        .map(|p| FilePrediction {
            image: p.image_id.clone(),
            category: p.category.clone(),
            score: p.score,
            box2d: FileBox {
                x1: p.box2d.x1,
                y1: p.box2d.y1,
                x2: p.box2d.x2,
                y2: p.box2d.y2,
            },
        })
        .collect();
    write_bytes(path, &to_json_bytes(&raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn b(x1: f64, y1: f64, x2: f64, y2: f64) -> Box2D {
        Box2D::new(x1, y1, x2, y2).unwrap()
    }

    #[test]
    fn round_trips_and_keeps_order() {
        let preds = vec![
            Prediction::new("img-2", "car", 0.75, b(0.0, 0.0, 10.0, 10.0)).unwrap(),
            Prediction::new("img-1", "person", 0.5, b(5.0, 5.0, 8.0, 9.0)).unwrap(),
            Prediction::new("img-1", "car", 1.0, b(1.5, 2.5, 3.5, 4.5)).unwrap(),
        ];
        let dir = tempdir().unwrap();
        let p = dir.path().join("preds.json");
        save_predictions(&p, &preds).unwrap();
        let back = load_predictions(&p).unwrap();
        assert_eq!(back, preds);
    }

    #[test]
    fn rejects_out_of_range_score() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("preds.json");
        std::fs::write(
            &p,
            r#"[{"image":"a","category":"car","score":1.5,"box":{"x1":0,"y1":0,"x2":1,"y2":1}}]"#,
        )
        .unwrap();
        assert!(load_predictions(&p).is_err());
    }

    #[test]
    fn rejects_inverted_box() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("preds.json");
        std::fs::write(
            &p,
            r#"[{"image":"a","category":"car","score":0.5,"box":{"x1":2,"y1":0,"x2":1,"y2":1}}]"#,
        )
        .unwrap();
        assert!(load_predictions(&p).is_err());
    }

    #[test]
    fn rejects_malformed_json() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("preds.json");
        std::fs::write(&p, "{not json").unwrap();
        assert!(load_predictions(&p).is_err());
    }
}
