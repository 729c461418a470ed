//! Shift detection protocols built on the MMD permutation test.
//!
//! Covariate shift: fit the reducer once on the pooled full data, then run
//! `repetitions` independent rounds, each drawing `sample_size` rows per side
//! and scoring them with a permutation test. The verdict compares the mean
//! p-value against `alpha`. Repetition `r` (1-based) derives everything from
//! `seed XOR r`, with separate substreams for the source draw, the target
//! draw and the permutation shuffles, so both sides subsample independently
//! even when they alias the same matrix.
//!
//! Label shift: Pearson chi-square on the 2 x C contingency table of label
//! counts per category.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::matrix::FeatureMatrix;
use crate::mmd::{permutation_test, Estimator, KernelConfig, MmdResult};
use crate::reduce::{pca_fit, pca_transform, ReducerKind, DEFAULT_COMPONENTS};
use crate::rng::{subsample, RngSeed};
use crate::stats::chi_square_sf;
use crate::types::DatasetManifest;
use crate::Result;

/// Substream tags for one repetition; see module docs.
const STREAM_SOURCE: u64 = 0;
const STREAM_TARGET: u64 = 1;
const STREAM_PERMUTATION: u64 = 2;

/// Full configuration of a covariate shift run.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionConfig {
    pub reducer: ReducerKind,
    /// Rows drawn per side per repetition. Must be >= 2 and no larger than
    /// either input.
    pub sample_size: usize,
    pub repetitions: usize,
    /// Decision threshold on the mean p-value, in (0, 1).
    pub alpha: f64,
    pub kernel: KernelConfig,
    pub estimator: Estimator,
    pub n_permutations: usize,
    pub seed: RngSeed,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            reducer: ReducerKind::Pca {
                components: DEFAULT_COMPONENTS,
            },
            sample_size: 1000,
            repetitions: 30,
            alpha: 0.05,
            kernel: KernelConfig::MedianHeuristic,
            estimator: Estimator::Biased,
            n_permutations: 199,
            seed: RngSeed(0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ShiftDetected,
    NoShiftDetected,
}

/// Verdict rule shared by every consumer: shift iff `mean_p < alpha`.
pub fn verdict_for(mean_p: f64, alpha: f64) -> Verdict {
    if mean_p < alpha {
        Verdict::ShiftDetected
    } else {
        Verdict::NoShiftDetected
    }
}

/// Seed handed to the permutation test of repetition `r` (1-based).
///
/// Exposed so persisted reports can reconstruct per-repetition results
/// exactly as [`detect_covariate_shift`] produced them.
pub fn repetition_seed(seed: RngSeed, r: usize) -> RngSeed {
    seed.xor(r as u64).derive(STREAM_PERMUTATION)
}

/// Everything a covariate shift run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftReport {
    pub source_name: String,
    pub target_name: String,
    pub config: DetectionConfig,
    pub per_repetition: Vec<MmdResult>,
    pub mean_statistic: f64,
    pub mean_p: f64,
    pub verdict: Verdict,
}

/// Runs the repeated-subsampling MMD protocol of `source` against `target`.
pub fn detect_covariate_shift(
    source: &FeatureMatrix,
    source_name: &str,
    target: &FeatureMatrix,
    target_name: &str,
    cfg: &DetectionConfig,
) -> Result<ShiftReport> {
    if source.is_empty() {
        return Err(CoreError::Empty { what: "source" });
    }
    if target.is_empty() {
        return Err(CoreError::Empty { what: "target" });
    }
    if source.d() != target.d() {
        return Err(CoreError::DimensionMismatch {
            expected: source.d(),
            actual: target.d(),
        });
    }
    if cfg.sample_size < 2 {
        return Err(CoreError::InvalidParam {
            name: "sample_size",
            reason: alloc::format!("must be >= 2, got {}", cfg.sample_size),
        });
    }
    let smallest = source.n().min(target.n());
    if cfg.sample_size > smallest {
        return Err(CoreError::Insufficient {
            what: String::from("rows for subsampling"),
            needed: cfg.sample_size,
            available: smallest,
        });
    }
    if cfg.repetitions == 0 {
        return Err(CoreError::InvalidParam {
            name: "repetitions",
            reason: String::from("must be >= 1"),
        });
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(CoreError::InvalidParam {
            name: "alpha",
            reason: alloc::format!("must lie in (0, 1), got {}", cfg.alpha),
        });
    }

    let (reduced_source, reduced_target) = match cfg.reducer {
        ReducerKind::Pca { components } => {
            let pooled = source.vstack(target)?;
            let model = pca_fit(&pooled, components)?;
            (
                pca_transform(&model, source)?,
                pca_transform(&model, target)?,
            )
        }
        ReducerKind::Identity | ReducerKind::ExternalScores => {
            (source.clone(), target.clone())
        }
    };

    let mut per_repetition = Vec::with_capacity(cfg.repetitions);
    for r in 1..=cfg.repetitions {
        let rep_seed = cfg.seed.xor(r as u64);
        let sub_source = subsample(&reduced_source, cfg.sample_size, rep_seed.derive(STREAM_SOURCE))?;
        let sub_target = subsample(&reduced_target, cfg.sample_size, rep_seed.derive(STREAM_TARGET))?;
        let result = permutation_test(
            &sub_source,
            &sub_target,
            &cfg.kernel,
            cfg.estimator,
            cfg.n_permutations,
            repetition_seed(cfg.seed, r),
        )?;
        per_repetition.push(result);
    }

    let reps = per_repetition.len() as f64;
    let mean_statistic = per_repetition.iter().map(|r| r.statistic).sum::<f64>() / reps;
    let mean_p = per_repetition
        .iter()
        .map(|r| r.p_value.unwrap_or(1.0))
        .sum::<f64>()
        / reps;
    let verdict = verdict_for(mean_p, cfg.alpha);

    Ok(ShiftReport {
        source_name: String::from(source_name),
        target_name: String::from(target_name),
        config: cfg.clone(),
        per_repetition,
        mean_statistic,
        mean_p,
        verdict,
    })
}

/// Per-category label totals for the two sides of a comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryCount {
    pub category: String,
    pub source: u64,
    pub target: u64,
}

/// Chi-square label distribution comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelShiftResult {
    /// Counts in lexicographic category order; every row has a nonzero total.
    pub counts: Vec<CategoryCount>,
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Pearson chi-square test of the label category distributions of two
/// manifests. Categories form the union of both sides; a side with no
/// labels at all is an error.
pub fn detect_label_shift(
    source: &DatasetManifest,
    target: &DatasetManifest,
) -> Result<LabelShiftResult> {
    let mut table: alloc::collections::BTreeMap<&str, (u64, u64)> = alloc::collections::BTreeMap::new();
    for item in source.items() {
        for label in &item.labels {
            table.entry(label.category.as_str()).or_insert((0, 0)).0 += 1;
        }
    }
    for item in target.items() {
        for label in &item.labels {
            table.entry(label.category.as_str()).or_insert((0, 0)).1 += 1;
        }
    }

    let source_total: u64 = table.values().map(|v| v.0).sum();
    let target_total: u64 = table.values().map(|v| v.1).sum();
    if source_total == 0 {
        return Err(CoreError::EmptySide { side: "source" });
    }
    if target_total == 0 {
        return Err(CoreError::EmptySide { side: "target" });
    }

    // zero-total categories cannot occur from the union above, but the
    // contingency math assumes them gone, so filter anyway
    let counts: Vec<CategoryCount> = table
        .into_iter()
        .filter(|(_, (s, t))| s + t > 0)
        .map(|(category, (source, target))| CategoryCount {
            category: String::from(category),
            source,
            target,
        })
        .collect();

    let grand = (source_total + target_total) as f64;
    let row_source = source_total as f64;
    let row_target = target_total as f64;
    let mut statistic = 0.0;
    for c in &counts {
        let col = (c.source + c.target) as f64;
        for (observed, row_total) in [(c.source as f64, row_source), (c.target as f64, row_target)] {
            let expected = row_total * col / grand;
            if expected > 0.0 {
                let diff = observed - expected;
                statistic += diff * diff / expected;
            }
        }
    }
    let degrees_of_freedom = counts.len() - 1;
    let p_value = chi_square_sf(statistic, degrees_of_freedom);

    Ok(LabelShiftResult {
        counts,
        statistic,
        degrees_of_freedom,
        p_value,
    })
}

/// Direction of change between two shift reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftChange {
    /// Statistic strictly fell and p strictly rose.
    Reduced,
    /// Statistic strictly rose and p strictly fell.
    Increased,
    /// Both quantities identical.
    Unchanged,
    /// The two quantities moved inconsistently.
    Mixed,
}

/// Outcome of [`compare_shift`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftComparison {
    pub statistic_decreased: bool,
    pub p_increased: bool,
    /// `after.mean_statistic - before.mean_statistic`.
    pub delta_statistic: f64,
    /// `after.mean_p - before.mean_p`.
    pub delta_p: f64,
    pub change: ShiftChange,
}

/// Compares two reports that measured different sources against the same
/// target, e.g. a baseline training set and its augmented variant.
pub fn compare_shift(before: &ShiftReport, after: &ShiftReport) -> Result<ShiftComparison> {
    if before.target_name != after.target_name {
        return Err(CoreError::TargetMismatch {
            before: before.target_name.clone(),
            after: after.target_name.clone(),
        });
    }
    let delta_statistic = after.mean_statistic - before.mean_statistic;
    let delta_p = after.mean_p - before.mean_p;
    let statistic_decreased = delta_statistic < 0.0;
    let p_increased = delta_p > 0.0;
    let change = if statistic_decreased && p_increased {
        ShiftChange::Reduced
    } else if delta_statistic > 0.0 && delta_p < 0.0 {
        ShiftChange::Increased
    } else if delta_statistic == 0.0 && delta_p == 0.0 {
        ShiftChange::Unchanged
    } else {
        ShiftChange::Mixed
    };
    Ok(ShiftComparison {
        statistic_decreased,
        p_increased,
        delta_statistic,
        delta_p,
        change,
    })
}
