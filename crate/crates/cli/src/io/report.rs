//! Shift report files. JSON with the exact field set
//! `{source, target, config:{reducer, k, sample_size, repetitions, alpha,
//! estimator, n_permutations, bandwidth_rule, seed}, repetitions:[{statistic,
//! p_value, bandwidth_sq}], mean_statistic, mean_p, verdict}`.
//!
//! Loading re-derives per-repetition seeds from the config seed and checks
//! the internal invariants (means match their repetitions, verdict matches
//! mean_p vs alpha, p-values lie in the permutation range), so a loaded
//! report is exactly what the detector would have produced.

use std::path::Path;

use driftgauge_core::mmd::{Estimator, KernelConfig, MmdResult};
use driftgauge_core::protocol::{repetition_seed, verdict_for, DetectionConfig, ShiftReport, Verdict};
use driftgauge_core::reduce::ReducerKind;
use driftgauge_core::RngSeed;
use serde::{Deserialize, Serialize};

use super::{parse_json, read_bytes, to_json_bytes, write_bytes};
use crate::render::verdict_label;
use crate::{CliError, Result};

#[derive(Serialize, Deserialize)]
struct FileReport {
    source: String,
    target: String,
    config: FileConfig,
    repetitions: Vec<FileRepetition>,
    mean_statistic: f64,
    mean_p: f64,
    verdict: String,
}

#[derive(Serialize, Deserialize)]
struct FileConfig {
    reducer: String,
    k: Option<usize>,
    sample_size: usize,
    repetitions: usize,
    alpha: f64,
    estimator: String,
    n_permutations: usize,
    bandwidth_rule: String,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct FileRepetition {
    statistic: f64,
    p_value: f64,
    bandwidth_sq: f64,
}

pub(crate) fn estimator_str(e: Estimator) -> &'static str {
    match e {
        Estimator::Biased => "biased",
        Estimator::Unbiased => "unbiased",
    }
}

pub(crate) fn bandwidth_rule_str(k: &KernelConfig) -> String {
    match k {
        KernelConfig::MedianHeuristic => "median_heuristic".to_string(),
        KernelConfig::BandwidthSq(v) => format!("fixed:{v}"),
    }
}

pub fn save_report(path: &Path, report: &ShiftReport) -> Result<()> {
    let cfg = &report.config;
    let (reducer, k) = match cfg.reducer {
        ReducerKind::Pca { components } => ("pca", Some(components)),
        ReducerKind::Identity => ("identity", None),
        ReducerKind::ExternalScores => ("external_scores", None),
    };
    let file = FileReport {
        source: report.source_name.clone(),
        target: report.target_name.clone(),
        config: FileConfig {
            reducer: reducer.to_string(),
            k,
            sample_size: cfg.sample_size,
            repetitions: cfg.repetitions,
            alpha: cfg.alpha,
            estimator: estimator_str(cfg.estimator).to_string(),
            n_permutations: cfg.n_permutations,
            bandwidth_rule: bandwidth_rule_str(&cfg.kernel),
            seed: cfg.seed.0,
        },
        repetitions: report
            .per_repetition
            .iter()
            .map(|r| FileRepetition {
                statistic: r.statistic,
                p_value: r.p_value.unwrap_or(1.0),
                bandwidth_sq: r.bandwidth_sq,
            })
            .collect(),
        mean_statistic: report.mean_statistic,
        mean_p: report.mean_p,
        verdict: verdict_label(report.verdict).to_string(),
    };
    write_bytes(path, &to_json_bytes(&file))
}

pub fn load_report(path: &Path) -> Result<ShiftReport> {
    let bytes = read_bytes(path)?;
    let file: FileReport = parse_json(path, &bytes)?;
    let fail = |msg: String| CliError::format(path, msg);

    let reducer = match (file.config.reducer.as_str(), file.config.k) {
        ("pca", Some(components)) => ReducerKind::Pca { components },
        ("pca", None) => return Err(fail("reducer `pca` requires `k`".to_string())),
        ("identity", None) => ReducerKind::Identity,
        ("external_scores", None) => ReducerKind::ExternalScores,
        ("identity", Some(_)) | ("external_scores", Some(_)) => {
            return Err(fail(format!(
                "reducer `{}` must have `k` null",
                file.config.reducer
            )))
        }
        (other, _) => return Err(fail(format!("unknown reducer `{other}`"))),
    };
    let estimator = match file.config.estimator.as_str() {
        "biased" => Estimator::Biased,
        "unbiased" => Estimator::Unbiased,
        other => return Err(fail(format!("unknown estimator `{other}`"))),
    };
    let kernel = if file.config.bandwidth_rule == "median_heuristic" {
        KernelConfig::MedianHeuristic
    } else if let Some(raw) = file.config.bandwidth_rule.strip_prefix("fixed:") {
        let v: f64 = raw
            .parse()
            .map_err(|_| fail(format!("bad fixed bandwidth `{raw}`")))?;
        if !(v.is_finite() && v > 0.0) {
            return Err(fail(format!("fixed bandwidth must be positive, got {v}")));
        }
        KernelConfig::BandwidthSq(v)
    } else {
        return Err(fail(format!(
            "unknown bandwidth_rule `{}`",
            file.config.bandwidth_rule
        )));
    };
    let verdict = match file.verdict.as_str() {
        "shift_detected" => Verdict::ShiftDetected,
        "no_shift_detected" => Verdict::NoShiftDetected,
        other => return Err(fail(format!("unknown verdict `{other}`"))),
    };

    if file.repetitions.len() != file.config.repetitions {
        return Err(fail(format!(
            "config says {} repetitions but {} are recorded",
            file.config.repetitions,
            file.repetitions.len()
        )));
    }
    if file.repetitions.is_empty() {
        return Err(fail("no repetitions recorded".to_string()));
    }

    let seed = RngSeed(file.config.seed);
    let config = DetectionConfig {
        reducer,
        sample_size: file.config.sample_size,
        repetitions: file.config.repetitions,
        alpha: file.config.alpha,
        kernel,
        estimator,
        n_permutations: file.config.n_permutations,
        seed,
    };

    let p_floor = 1.0 / (file.config.n_permutations as f64 + 1.0);
    let mut per_repetition = Vec::with_capacity(file.repetitions.len());
    for (idx, rep) in file.repetitions.iter().enumerate() {
        if !(rep.p_value >= p_floor && rep.p_value <= 1.0) {
            return Err(fail(format!(
                "repetition {idx}: p-value {} outside [{p_floor}, 1]",
                rep.p_value
            )));
        }
        if !rep.statistic.is_finite() || !(rep.bandwidth_sq.is_finite() && rep.bandwidth_sq > 0.0) {
            return Err(fail(format!("repetition {idx}: non-finite values")));
        }
        per_repetition.push(MmdResult {
            statistic: rep.statistic,
            estimator,
            bandwidth_sq: rep.bandwidth_sq,
            p_value: Some(rep.p_value),
            n_permutations: file.config.n_permutations,
            seed: repetition_seed(seed, idx + 1),
        });
    }

    let reps = per_repetition.len() as f64;
    let mean_statistic = per_repetition.iter().map(|r| r.statistic).sum::<f64>() / reps;
    let mean_p = per_repetition
        .iter()
        .map(|r| r.p_value.unwrap())
        .sum::<f64>()
        / reps;
    if (mean_statistic - file.mean_statistic).abs() > 1e-9 {
        return Err(fail(format!(
            "mean_statistic {} does not match its repetitions (recomputed {mean_statistic})",
            file.mean_statistic
        )));
    }
    if (mean_p - file.mean_p).abs() > 1e-9 {
        return Err(fail(format!(
            "mean_p {} does not match its repetitions (recomputed {mean_p})",
            file.mean_p
        )));
    }
    if verdict != verdict_for(file.mean_p, file.config.alpha) {
        return Err(fail(format!(
            "verdict `{}` contradicts mean_p {} at alpha {}",
            file.verdict, file.mean_p, file.config.alpha
        )));
    }

    Ok(ShiftReport {
        source_name: file.source,
        target_name: file.target,
        config,
        per_repetition,
        mean_statistic: file.mean_statistic,
        mean_p: file.mean_p,
        verdict,
    })
}
