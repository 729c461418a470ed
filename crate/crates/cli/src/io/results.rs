//! Evaluation and label-shift result files.
//!
//! Evaluation: JSON `{map50, per_class: {name: ap}, gt_counts: {name: n}}`.
//! Label shift: JSON `{source, target, counts: [{category, source, target}],
//! statistic, degrees_of_freedom, p_value}` with counts in lexicographic
//! category order.
//!
//! Loading checks internal consistency (class key sets agree, map50 is the
//! mean of its per-class values, degrees of freedom match the table width).

use std::collections::BTreeMap;
use std::path::Path;

use driftgauge_core::eval::EvalResult;
use driftgauge_core::protocol::{CategoryCount, LabelShiftResult};
use serde::{Deserialize, Serialize};

use super::{parse_json, read_bytes, to_json_bytes, write_bytes};
use crate::{CliError, Result};

#[derive(Serialize, Deserialize)]
struct FileEval {
    map50: f64,
    per_class: BTreeMap<String, f64>,
    gt_counts: BTreeMap<String, usize>,
}

pub fn save_eval(path: &Path, result: &EvalResult) -> Result<()> {
    let file = FileEval {
        map50: result.map50,
        per_class: result.per_class_ap.clone(),
        gt_counts: result.gt_counts.clone(),
    };
    write_bytes(path, &to_json_bytes(&file))
}

pub fn load_eval(path: &Path) -> Result<EvalResult> {
    let bytes = read_bytes(path)?;
    let file: FileEval = parse_json(path, &bytes)?;
    let fail = |msg: String| CliError::format(path, msg);

    if !file.per_class.keys().eq(file.gt_counts.keys()) {
        return Err(fail(
            "per_class and gt_counts must cover the same classes".to_string(),
        ));
    }
    for (class, &ap) in &file.per_class {
        if !(ap.is_finite() && (0.0..=1.0).contains(&ap)) {
            return Err(fail(format!("class `{class}`: AP {ap} outside [0, 1]")));
        }
    }
    for (class, &n) in &file.gt_counts {
        if n == 0 {
            return Err(fail(format!(
                "class `{class}` has zero ground-truth instances"
            )));
        }
    }
    let expected = if file.per_class.is_empty() {
        0.0
    } else {
        file.per_class.values().sum::<f64>() / file.per_class.len() as f64
    };
    if (file.map50 - expected).abs() > 1e-9 {
        return Err(fail(format!(
            "map50 {} is not the mean of per_class (recomputed {expected})",
            file.map50
        )));
    }
    Ok(EvalResult {
        map50: file.map50,
        per_class_ap: file.per_class,
        gt_counts: file.gt_counts,
    })
}

/// A label-shift result plus the manifest names it compared.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelShiftDoc {
    pub source_name: String,
    pub target_name: String,
    pub result: LabelShiftResult,
}

#[derive(Serialize, Deserialize)]
struct FileLabelShift {
    source: String,
    target: String,
    counts: Vec<FileCount>,
    statistic: f64,
    degrees_of_freedom: usize,
    p_value: f64,
}

#[derive(Serialize, Deserialize)]
struct FileCount {
    category: String,
    source: u64,
    target: u64,
}

pub fn save_label_shift(path: &Path, doc: &LabelShiftDoc) -> Result<()> {
    let file = FileLabelShift {
        source: doc.source_name.clone(),
        target: doc.target_name.clone(),
        counts: doc
            .result
            .counts
            .iter()
            .map(|c| FileCount {
                category: c.category.clone(),
                source: c.source,
                target: c.target,
            })
            .collect(),
        statistic: doc.result.statistic,
        degrees_of_freedom: doc.result.degrees_of_freedom,
        p_value: doc.result.p_value,
    };
    write_bytes(path, &to_json_bytes(&file))
}

pub fn load_label_shift(path: &Path) -> Result<LabelShiftDoc> {
    let bytes = read_bytes(path)?;
    let file: FileLabelShift = parse_json(path, &bytes)?;
    let fail = |msg: String| CliError::format(path, msg);

    if file.counts.is_empty() {
        return Err(fail("no category counts".to_string()));
    }
    for pair in file.counts.windows(2) {
        if pair[0].category >= pair[1].category {
            return Err(fail(
                "categories must be strictly increasing lexicographically".to_string(),
            ));
        }
    }
    for c in &file.counts {
        if c.source + c.target == 0 {
            return Err(fail(format!("category `{}` has zero total", c.category)));
        }
    }
    if file.degrees_of_freedom != file.counts.len() - 1 {
        return Err(fail(format!(
            "degrees_of_freedom {} does not match {} categories",
            file.degrees_of_freedom,
            file.counts.len()
        )));
    }
    if !(file.statistic.is_finite() && file.statistic >= 0.0) {
        return Err(fail(format!("bad statistic {}", file.statistic)));
    }
    if !(file.p_value.is_finite() && (0.0..=1.0).contains(&file.p_value)) {
        return Err(fail(format!("p-value {} outside [0, 1]", file.p_value)));
    }
    Ok(LabelShiftDoc {
        source_name: file.source,
        target_name: file.target,
        result: LabelShiftResult {
            counts: file
                .counts
                .into_iter()
                .map(|c| CategoryCount {
                    category: c.category,
                    source: c.source,
                    target: c.target,
                })
                .collect(),
            statistic: file.statistic,
            degrees_of_freedom: file.degrees_of_freedom,
            p_value: file.p_value,
        },
    })
}
