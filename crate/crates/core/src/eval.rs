//! Detection quality scoring: per-class average precision and mAP at a fixed
//! IoU threshold.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::types::{Box2D, DatasetManifest};
use crate::Result;

/// Matching threshold used when none is given.
pub const DEFAULT_IOU_THRESHOLD: f64 = 0.5;

/// One detector output for one image.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub image_id: String,
    pub category: String,
    /// Confidence in `[0, 1]`.
    pub score: f64,
    pub box2d: Box2D,
}

impl Prediction {
    pub fn new(
        image_id: impl Into<String>,
        category: impl Into<String>,
        score: f64,
        box2d: Box2D,
    ) -> Result<Self> {
        if !score.is_finite() || !(0.0..=1.0).contains(&score) {
            return Err(CoreError::InvalidParam {
                name: "score",
                reason: alloc::format!("must lie in [0, 1], got {score}"),
            });
        }
        let category = category.into();
        if category.is_empty() {
            return Err(CoreError::Empty {
                what: "prediction category",
            });
        }
        Ok(Prediction {
            image_id: image_id.into(),
            category,
            score,
            box2d,
        })
    }
}

/// Scores for one evaluation run.
///
/// `map50` is the mean of `per_class_ap` over classes with at least one
/// ground-truth instance; classes appearing only in predictions are absent.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub map50: f64,
    pub per_class_ap: BTreeMap<String, f64>,
    pub gt_counts: BTreeMap<String, usize>,
}

/// Intersection-over-union of two boxes. Zero when the union has no area.
pub fn iou(a: &Box2D, b: &Box2D) -> f64 {
    let ix = (a.x2.min(b.x2) - a.x1.max(b.x1)).max(0.0);
    let iy = (a.y2.min(b.y2) - a.y1.max(b.y1)).max(0.0);
    let inter = ix * iy;
    let union = a.area() + b.area() - inter;
    if union > 0.0 {
        inter / union
    } else {
        0.0
    }
}

/// Evaluates predictions against ground truth at one IoU threshold.
///
/// Per class, predictions are sorted by descending score with ties broken by
/// image id and then box coordinates, so the ordering is total and the result
/// does not depend on input order. Each prediction greedily takes the
/// unmatched ground-truth box of highest IoU at or above the threshold within
/// its own image; every ground-truth box is consumable once. AP is the area
/// under the precision envelope over recall.
pub fn evaluate(
    gt: &DatasetManifest,
    preds: &[Prediction],
    iou_threshold: f64,
) -> Result<EvalResult> {
    if !iou_threshold.is_finite() || iou_threshold <= 0.0 || iou_threshold >= 1.0 {
        return Err(CoreError::InvalidParam {
            name: "iou_threshold",
            reason: alloc::format!("must lie strictly inside (0, 1), got {iou_threshold}"),
        });
    }
    for p in preds {
        if !p.score.is_finite() || !(0.0..=1.0).contains(&p.score) {
            return Err(CoreError::InvalidParam {
                name: "score",
                reason: alloc::format!("must lie in [0, 1], got {}", p.score),
            });
        }
    }

    // ground truth boxes grouped by class then image, each with a used flag
    type SlotsByClassAndImage<'a> = BTreeMap<&'a str, BTreeMap<&'a str, Vec<(Box2D, bool)>>>;
    let mut gt_boxes: SlotsByClassAndImage = BTreeMap::new();
    let mut gt_counts: BTreeMap<String, usize> = BTreeMap::new();
    for item in gt.items() {
        for label in &item.labels {
            gt_boxes
                .entry(label.category.as_str())
                .or_default()
                .entry(item.id.as_str())
                .or_default()
                .push((label.box2d, false));
            *gt_counts.entry(label.category.clone()).or_insert(0) += 1;
        }
    }

    let known: alloc::collections::BTreeSet<&str> =
        gt.items().iter().map(|i| i.id.as_str()).collect();
    for p in preds {
        if !known.contains(p.image_id.as_str()) {
            return Err(CoreError::UnknownImage {
                id: p.image_id.clone(),
            });
        }
    }

    let mut per_class_ap: BTreeMap<String, f64> = BTreeMap::new();
    for (class, &n_gt) in &gt_counts {
        let mut class_preds: Vec<&Prediction> =
            preds.iter().filter(|p| &p.category == class).collect();
        class_preds.sort_unstable_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| a.image_id.cmp(&b.image_id))
                .then_with(|| a.box2d.x1.total_cmp(&b.box2d.x1))
                .then_with(|| a.box2d.y1.total_cmp(&b.box2d.y1))
                .then_with(|| a.box2d.x2.total_cmp(&b.box2d.x2))
                .then_with(|| a.box2d.y2.total_cmp(&b.box2d.y2))
        });

        let images = gt_boxes.get_mut(class.as_str()).expect("class has gt");
        let mut is_tp = Vec::with_capacity(class_preds.len());
        for p in &class_preds {
            let mut best: Option<(usize, f64)> = None;
            if let Some(slots) = images.get_mut(p.image_id.as_str()) {
                for (i, (g, used)) in slots.iter().enumerate() {
                    if *used {
                        continue;
                    }
                    let v = iou(&p.box2d, g);
                    // strict > keeps the first box on ties
                    if v >= iou_threshold && best.is_none_or(|(_, bv)| v > bv) {
                        best = Some((i, v));
                    }
                }
                if let Some((i, _)) = best {
                    slots[i].1 = true;
                }
            }
            is_tp.push(best.is_some());
        }
        per_class_ap.insert(class.clone(), average_precision(&is_tp, n_gt));
    }

    let map50 = if per_class_ap.is_empty() {
        0.0
    } else {
        per_class_ap.values().sum::<f64>() / per_class_ap.len() as f64
    };
    Ok(EvalResult {
        map50,
        per_class_ap,
        gt_counts,
    })
}

/// Area under the precision envelope for one class.
///
/// `is_tp` follows the sorted prediction order. The envelope replaces each
/// precision with the maximum precision at any equal or higher recall, then
/// the area is summed over recall increments.
fn average_precision(is_tp: &[bool], n_gt: usize) -> f64 {
    if n_gt == 0 {
        return 0.0;
    }
    let mut recall = Vec::with_capacity(is_tp.len());
    let mut envelope = Vec::with_capacity(is_tp.len());
    let mut tp = 0usize;
    for (k, &hit) in is_tp.iter().enumerate() {
        if hit {
            tp += 1;
        }
        recall.push(tp as f64 / n_gt as f64);
        envelope.push(tp as f64 / (k + 1) as f64);
    }
    for k in (0..envelope.len().saturating_sub(1)).rev() {
        if envelope[k + 1] > envelope[k] {
            envelope[k] = envelope[k + 1];
        }
    }
    let mut area = 0.0;
    let mut prev = 0.0;
    for (r, p) in recall.iter().zip(&envelope) {
        area += (r - prev) * p;
        prev = *r;
    }
    area
}
