//! Flag definitions and per-command drivers. Every command echoes one
//! `config:` line with its fully resolved settings before doing any work, so
//! output always records its own provenance. Randomized commands derive all
//! draws from the global `--seed`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use driftgauge_core::eval::evaluate;
use driftgauge_core::mmd::{Estimator, KernelConfig};
use driftgauge_core::partition::{build_ratio_set, RatioSpec};
use driftgauge_core::protocol::{
    compare_shift, detect_covariate_shift, detect_label_shift, DetectionConfig, Verdict,
};
use driftgauge_core::reduce::{pca_fit, pca_transform, ReducerKind, DEFAULT_COMPONENTS};
use driftgauge_core::synth::{gen_features, gen_manifest, SynthSpec};
use driftgauge_core::types::{DatasetManifest, Provenance};
use driftgauge_core::{CoreError, RngSeed};

use crate::io::features::{load_features, save_features};
use crate::io::manifest::{load_manifest, save_manifest, save_split_sidecar, SplitSidecar};
use crate::io::model::{load_model, save_model};
use crate::io::predictions::load_predictions;
use crate::io::report::{bandwidth_rule_str, estimator_str, load_report, save_report};
use crate::io::results::{load_eval, save_eval, save_label_shift, LabelShiftDoc};
use crate::io::write_bytes;
use crate::render::{change_label, render, verdict_label, MapRow, OutputFormat, ReportView};
use crate::{CliError, Result, EXIT_OK, EXIT_SHIFT};

/// Data shift detection and dataset balancing toolkit.
#[derive(Debug, Parser)]
#[command(name = "driftgauge", version, about)]
pub struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Primary output file; required by commands that write one.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Rendering format for the report command.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a day/night ratio training set from a manifest pool.
    Partition(PartitionArgs),
    /// Generate synthetic features or manifests.
    #[command(subcommand)]
    Synth(SynthCmd),
    /// Fit or apply a linear projection model.
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// Test two feature files for covariate shift.
    Detect(DetectArgs),
    /// Compare the label distributions of two manifests.
    LabelShift(LabelShiftArgs),
    /// Score detection predictions against ground truth (mAP).
    Eval(EvalArgs),
    /// Render one or two shift reports plus optional mAP rows.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    /// Manifest JSON holding the candidate pool.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Named day/night ratio (setA through setE).
    #[arg(long, value_enum, conflicts_with_all = ["day", "night"])]
    pub preset: Option<Preset>,
    /// Day item count for a custom ratio.
    #[arg(long, requires = "night")]
    pub day: Option<usize>,
    /// Night item count for a custom ratio.
    #[arg(long, requires = "day")]
    pub night: Option<usize>,
}

/// The five standard training ratios, from all-day to balanced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    #[value(name = "setA")]
    SetA,
    #[value(name = "setB")]
    SetB,
    #[value(name = "setC")]
    SetC,
    #[value(name = "setD")]
    SetD,
    #[value(name = "setE")]
    SetE,
}

impl Preset {
    fn spec(self) -> (&'static str, usize, usize) {
        match self {
            Preset::SetA => ("Set A", 40_000, 0),
            Preset::SetB => ("Set B", 35_000, 5_000),
            Preset::SetC => ("Set C", 30_000, 10_000),
            Preset::SetD => ("Set D", 25_000, 15_000),
            Preset::SetE => ("Set E", 20_000, 20_000),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum SynthCmd {
    /// Two Gaussian feature clouds, the second mean-shifted by --delta.
    Features(SynthFeaturesArgs),
    /// A manifest with controllable day/night mix and label distribution.
    Manifest(SynthManifestArgs),
}

#[derive(Debug, Args)]
pub struct SynthFeaturesArgs {
    /// Rows per cloud.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Feature dimension.
    #[arg(long, default_value_t = 32)]
    pub d: usize,
    /// Per-coordinate mean offset of the target cloud.
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    /// Where the source cloud is written.
    #[arg(long)]
    pub source_out: PathBuf,
    /// Where the target cloud is written.
    #[arg(long)]
    pub target_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthManifestArgs {
    /// Item count.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Fraction of day items; the rest are night.
    #[arg(long, default_value_t = 0.5)]
    pub day_fraction: f64,
    /// Comma-separated class=prob pairs, e.g. car=0.7,person=0.3.
    #[arg(long)]
    pub label_probs: Option<String>,
    /// Provenance recorded on every item.
    #[arg(long, value_enum, default_value_t = ProvenanceArg::Real)]
    pub provenance: ProvenanceArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProvenanceArg {
    Real,
    Generated,
}

#[derive(Debug, Subcommand)]
pub enum ReduceCmd {
    /// Fit a projection model on a feature file.
    Fit(ReduceFitArgs),
    /// Project a feature file through a fitted model.
    Apply(ReduceApplyArgs),
}

#[derive(Debug, Args)]
pub struct ReduceFitArgs {
    /// Feature file to fit on.
    #[arg(long)]
    pub features: PathBuf,
    /// Components to keep; defaults to min(32, d).
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReduceApplyArgs {
    /// Fitted model file.
    #[arg(long)]
    pub model: PathBuf,
    /// Feature file to project.
    #[arg(long)]
    pub features: PathBuf,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Source-side feature file.
    #[arg(long)]
    pub source: PathBuf,
    /// Target-side feature file.
    #[arg(long)]
    pub target: PathBuf,
    /// Display name of the source; defaults to the file stem.
    #[arg(long)]
    pub source_name: Option<String>,
    /// Display name of the target; defaults to the file stem.
    #[arg(long)]
    pub target_name: Option<String>,
    /// Dimensionality reduction applied before testing.
    #[arg(long, value_enum, default_value_t = ReducerArg::Pca)]
    pub reducer: ReducerArg,
    /// PCA components; defaults to min(32, d). Only valid with --reducer pca.
    #[arg(long)]
    pub pca_k: Option<usize>,
    /// Rows drawn per side per repetition.
    #[arg(long, default_value_t = 1000)]
    pub sample_size: usize,
    /// Independent subsampling rounds to average over.
    #[arg(long, default_value_t = 30)]
    pub repetitions: usize,
    /// Decision threshold on the mean p-value.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// MMD^2 estimator.
    #[arg(long, value_enum, default_value_t = EstimatorArg::Biased)]
    pub estimator: EstimatorArg,
    /// Permutations per test.
    #[arg(long, default_value_t = 199)]
    pub permutations: usize,
    /// Fixed squared kernel bandwidth; median heuristic when absent.
    #[arg(long)]
    pub bandwidth_sq: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReducerArg {
    Pca,
    Identity,
    /// Features are already model scores; no reduction.
    ExternalScores,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Biased,
    Unbiased,
}

#[derive(Debug, Args)]
pub struct LabelShiftArgs {
    /// Source-side manifest.
    #[arg(long)]
    pub source: PathBuf,
    /// Target-side manifest.
    #[arg(long)]
    pub target: PathBuf,
    /// Significance level for the exit code.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Ground-truth manifest.
    #[arg(long)]
    pub gt: PathBuf,
    /// Prediction JSON file.
    #[arg(long)]
    pub predictions: PathBuf,
    /// IoU threshold for a match.
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Shift report JSON (the baseline side of a comparison).
    #[arg(long)]
    pub before: PathBuf,
    /// Second shift report measuring the same target.
    #[arg(long)]
    pub after: Option<PathBuf>,
    /// mAP table row as label=eval.json or label=before.json:after.json;
    /// repeatable.
    #[arg(long = "map-row")]
    pub map_row: Vec<String>,
}

struct Ctx {
    seed: RngSeed,
    output: Option<PathBuf>,
    format: OutputFormat,
}

pub fn run(cli: Cli) -> Result<i32> {
    let ctx = Ctx {
        seed: RngSeed(cli.seed),
        output: cli.output,
        format: cli.format,
    };
    match cli.command {
        Command::Partition(args) => cmd_partition(&ctx, &args),
        Command::Synth(SynthCmd::Features(args)) => cmd_synth_features(&ctx, &args),
        Command::Synth(SynthCmd::Manifest(args)) => cmd_synth_manifest(&ctx, &args),
        Command::Reduce(ReduceCmd::Fit(args)) => cmd_reduce_fit(&ctx, &args),
        Command::Reduce(ReduceCmd::Apply(args)) => cmd_reduce_apply(&ctx, &args),
        Command::Detect(args) => cmd_detect(&ctx, &args),
        Command::LabelShift(args) => cmd_label_shift(&ctx, &args),
        Command::Eval(args) => cmd_eval(&ctx, &args),
        Command::Report(args) => cmd_report(&ctx, &args),
    }
}

fn require_output(ctx: &Ctx) -> Result<&Path> {
    ctx.output
        .as_deref()
        .ok_or_else(|| CliError::Usage("this command writes a file; pass --output".to_string()))
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn format_label(f: OutputFormat) -> &'static str {
    match f {
        OutputFormat::Text => "text",
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    }
}

fn cmd_partition(ctx: &Ctx, args: &PartitionArgs) -> Result<i32> {
    let (label, n_day, n_night) = match (args.preset, args.day, args.night) {
        (Some(p), None, None) => {
            let (label, d, n) = p.spec();
            (label.to_string(), d, n)
        }
        (None, Some(d), Some(n)) => (format!("{d}D/{n}N"), d, n),
        _ => {
            return Err(CliError::Usage(
                "pass --preset or both --day and --night".to_string(),
            ))
        }
    };
    if n_day + n_night == 0 {
        return Err(CliError::Usage(
            "--day 0 --night 0 selects nothing".to_string(),
        ));
    }
    let out = require_output(ctx)?;
    let sidecar_path = out.with_extension("split.json");
    println!(
        "config: partition manifest={} label={:?} day={} night={} seed={} output={} sidecar={}",
        args.manifest.display(),
        label,
        n_day,
        n_night,
        ctx.seed.0,
        out.display(),
        sidecar_path.display()
    );
    let pool = load_manifest(&args.manifest, &file_stem(&args.manifest))?;
    let spec = RatioSpec {
        label: label.clone(),
        n_day,
        n_night,
    };
    // the partition contract reserves exit code 2 for too-small pools
    let subset = build_ratio_set(&pool, &spec, ctx.seed).map_err(|e| match e {
        CoreError::Insufficient { .. } => CliError::Usage(e.to_string()),
        other => CliError::Core(other),
    })?;
    save_manifest(out, &subset)?;
    save_split_sidecar(
        &sidecar_path,
        &SplitSidecar {
            label,
            n_day,
            n_night,
            seed: ctx.seed.0,
        },
    )?;
    Ok(EXIT_OK)
}

fn cmd_synth_features(ctx: &Ctx, args: &SynthFeaturesArgs) -> Result<i32> {
    println!(
        "config: synth features n={} d={} delta={} seed={} source_out={} target_out={}",
        args.n,
        args.d,
        args.delta,
        ctx.seed.0,
        args.source_out.display(),
        args.target_out.display()
    );
    let spec = SynthSpec {
        n: args.n,
        d: args.d,
        shift_delta: args.delta,
        seed: ctx.seed,
        ..SynthSpec::default()
    };
    let (source, target) = gen_features(&spec)?;
    save_features(&args.source_out, &source)?;
    save_features(&args.target_out, &target)?;
    Ok(EXIT_OK)
}

fn parse_label_probs(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut probs = BTreeMap::new();
    for part in text.split(',') {
        let (class, prob) = part.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("bad label prob {part:?}, expected class=prob"))
        })?;
        let p: f64 = prob
            .parse()
            .map_err(|_| CliError::Usage(format!("bad probability {prob:?}")))?;
        if probs.insert(class.trim().to_string(), p).is_some() {
            return Err(CliError::Usage(format!("class {class:?} listed twice")));
        }
    }
    Ok(probs)
}

fn cmd_synth_manifest(ctx: &Ctx, args: &SynthManifestArgs) -> Result<i32> {
    let out = require_output(ctx)?;
    let label_probs = args.label_probs.as_deref().map(parse_label_probs).transpose()?;
    println!(
        "config: synth manifest n={} day_fraction={} label_probs={} provenance={} seed={} output={}",
        args.n,
        args.day_fraction,
        args.label_probs.as_deref().unwrap_or("none"),
        match args.provenance {
            ProvenanceArg::Real => "real",
            ProvenanceArg::Generated => "generated",
        },
        ctx.seed.0,
        out.display()
    );
    let spec = SynthSpec {
        n: args.n,
        day_fraction: args.day_fraction,
        label_probs,
        seed: ctx.seed,
        ..SynthSpec::default()
    };
    let manifest = gen_manifest(&spec)?;
    let manifest = match args.provenance {
        ProvenanceArg::Real => manifest,
        ProvenanceArg::Generated => {
            let name = manifest.name.clone();
            let items = manifest
                .into_items()
                .into_iter()
                .map(|item| item.with_provenance(Provenance::Generated))
                .collect();
            DatasetManifest::new(name, items).expect("retagging keeps ids unique")
        }
    };
    save_manifest(out, &manifest)?;
    Ok(EXIT_OK)
}

fn cmd_reduce_fit(ctx: &Ctx, args: &ReduceFitArgs) -> Result<i32> {
    let out = require_output(ctx)?;
    let features = load_features(&args.features)?;
    let k = args.k.unwrap_or(DEFAULT_COMPONENTS.min(features.d()));
    println!(
        "config: reduce fit features={} k={} output={}",
        args.features.display(),
        k,
        out.display()
    );
    let model = pca_fit(&features, k)?;
    save_model(out, &model)?;
    Ok(EXIT_OK)
}

fn cmd_reduce_apply(ctx: &Ctx, args: &ReduceApplyArgs) -> Result<i32> {
    let out = require_output(ctx)?;
    println!(
        "config: reduce apply model={} features={} output={}",
        args.model.display(),
        args.features.display(),
        out.display()
    );
    let model = load_model(&args.model)?;
    let features = load_features(&args.features)?;
    let reduced = pca_transform(&model, &features)?;
    save_features(out, &reduced)?;
    Ok(EXIT_OK)
}

fn cmd_detect(ctx: &Ctx, args: &DetectArgs) -> Result<i32> {
    let out = require_output(ctx)?;
    if args.pca_k.is_some() && args.reducer != ReducerArg::Pca {
        return Err(CliError::Usage(
            "--pca-k only applies to --reducer pca".to_string(),
        ));
    }
    let source = load_features(&args.source)?;
    let target = load_features(&args.target)?;
    let source_name = args
        .source_name
        .clone()
        .unwrap_or_else(|| file_stem(&args.source));
    let target_name = args
        .target_name
        .clone()
        .unwrap_or_else(|| file_stem(&args.target));
    let reducer = match args.reducer {
        ReducerArg::Pca => ReducerKind::Pca {
            components: args.pca_k.unwrap_or(DEFAULT_COMPONENTS.min(source.d())),
        },
        ReducerArg::Identity => ReducerKind::Identity,
        ReducerArg::ExternalScores => ReducerKind::ExternalScores,
    };
    let cfg = DetectionConfig {
        reducer,
        sample_size: args.sample_size,
        repetitions: args.repetitions,
        alpha: args.alpha,
        kernel: args
            .bandwidth_sq
            .map(KernelConfig::BandwidthSq)
            .unwrap_or(KernelConfig::MedianHeuristic),
        estimator: match args.estimator {
            EstimatorArg::Biased => Estimator::Biased,
            EstimatorArg::Unbiased => Estimator::Unbiased,
        },
        n_permutations: args.permutations,
        seed: ctx.seed,
    };
    let k_str = match cfg.reducer {
        ReducerKind::Pca { components } => components.to_string(),
        _ => "none".to_string(),
    };
    println!(
        "config: detect source={} target={} source_name={:?} target_name={:?} reducer={} k={} \
         sample_size={} repetitions={} alpha={} estimator={} permutations={} bandwidth={} seed={} output={}",
        args.source.display(),
        args.target.display(),
        source_name,
        target_name,
        match args.reducer {
            ReducerArg::Pca => "pca",
            ReducerArg::Identity => "identity",
            ReducerArg::ExternalScores => "external_scores",
        },
        k_str,
        cfg.sample_size,
        cfg.repetitions,
        cfg.alpha,
        estimator_str(cfg.estimator),
        cfg.n_permutations,
        bandwidth_rule_str(&cfg.kernel),
        ctx.seed.0,
        out.display()
    );
    let report = detect_covariate_shift(&source, &source_name, &target, &target_name, &cfg)?;
    save_report(out, &report)?;
    println!(
        "verdict: {} (mean_p {:.4}, mean_statistic {:.6})",
        verdict_label(report.verdict),
        report.mean_p,
        report.mean_statistic
    );
    Ok(if report.verdict == Verdict::ShiftDetected {
        EXIT_SHIFT
    } else {
        EXIT_OK
    })
}

fn cmd_label_shift(ctx: &Ctx, args: &LabelShiftArgs) -> Result<i32> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::Usage(format!(
            "--alpha must lie in (0, 1), got {}",
            args.alpha
        )));
    }
    println!(
        "config: label-shift source={} target={} alpha={} output={}",
        args.source.display(),
        args.target.display(),
        args.alpha,
        ctx.output
            .as_deref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "none".to_string())
    );
    let source = load_manifest(&args.source, &file_stem(&args.source))?;
    let target = load_manifest(&args.target, &file_stem(&args.target))?;
    let result = detect_label_shift(&source, &target)?;
    if let Some(out) = &ctx.output {
        save_label_shift(
            out,
            &LabelShiftDoc {
                source_name: source.name.clone(),
                target_name: target.name.clone(),
                result: result.clone(),
            },
        )?;
    }
    println!(
        "label shift: statistic {:.6}, degrees of freedom {}, p {:.6}",
        result.statistic, result.degrees_of_freedom, result.p_value
    );
    Ok(if result.p_value < args.alpha {
        EXIT_SHIFT
    } else {
        EXIT_OK
    })
}

fn cmd_eval(ctx: &Ctx, args: &EvalArgs) -> Result<i32> {
    let out = require_output(ctx)?;
    println!(
        "config: eval gt={} predictions={} threshold={} output={}",
        args.gt.display(),
        args.predictions.display(),
        args.threshold,
        out.display()
    );
    let gt = load_manifest(&args.gt, &file_stem(&args.gt))?;
    let preds = load_predictions(&args.predictions)?;
    let result = evaluate(&gt, &preds, args.threshold)?;
    save_eval(out, &result)?;
    println!("mAP@{} = {:.4}", args.threshold, result.map50);
    Ok(EXIT_OK)
}

fn parse_map_row(spec: &str) -> Result<MapRow> {
    let (label, paths) = spec.split_once('=').ok_or_else(|| {
        CliError::Usage(format!(
            "bad --map-row {spec:?}, expected label=eval.json[:after.json]"
        ))
    })?;
    let (before_path, after_path) = match paths.split_once(':') {
        Some((b, a)) => (b, Some(a)),
        None => (paths, None),
    };
    let before = load_eval(Path::new(before_path))?.map50;
    let after = after_path
        .map(|p| load_eval(Path::new(p)).map(|r| r.map50))
        .transpose()?;
    Ok(MapRow {
        label: label.to_string(),
        before,
        after,
    })
}

fn cmd_report(ctx: &Ctx, args: &ReportArgs) -> Result<i32> {
    println!(
        "config: report before={} after={} map_rows={} format={} output={}",
        args.before.display(),
        args.after
            .as_deref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "none".to_string()),
        args.map_row.len(),
        format_label(ctx.format),
        ctx.output
            .as_deref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "stdout".to_string())
    );
    let before = load_report(&args.before)?;
    let map_rows = args
        .map_row
        .iter()
        .map(|s| parse_map_row(s))
        .collect::<Result<Vec<_>>>()?;
    let view = match &args.after {
        Some(path) => {
            let after = load_report(path)?;
            let comparison = compare_shift(&before, &after)?;
            println!(
                "change: {} (delta_statistic {:.6}, delta_p {:.4})",
                change_label(comparison.change),
                comparison.delta_statistic,
                comparison.delta_p
            );
            ReportView::pair(&before, &after, comparison.change, map_rows)
        }
        None => ReportView::single(&before, map_rows),
    };
    let rendered = render(&view, ctx.format);
    match &ctx.output {
        Some(path) => write_bytes(path, rendered.as_bytes())?,
        None => print!("{rendered}"),
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn presets_match_the_standard_table() {
        assert_eq!(Preset::SetA.spec(), ("Set A", 40_000, 0));
        assert_eq!(Preset::SetB.spec(), ("Set B", 35_000, 5_000));
        assert_eq!(Preset::SetC.spec(), ("Set C", 30_000, 10_000));
        assert_eq!(Preset::SetD.spec(), ("Set D", 25_000, 15_000));
        assert_eq!(Preset::SetE.spec(), ("Set E", 20_000, 20_000));
    }

    #[test]
    fn preset_flags_parse_by_their_table_names() {
        let cli = Cli::try_parse_from([
            "driftgauge",
            "partition",
            "--manifest",
            "pool.json",
            "--preset",
            "setC",
            "--output",
            "out.json",
        ])
        .unwrap();
        match cli.command {
            Command::Partition(args) => assert_eq!(args.preset, Some(Preset::SetC)),
            _ => panic!("wrong command"),
        }
    }

    #[test]
    fn preset_conflicts_with_explicit_counts() {
        let err = Cli::try_parse_from([
            "driftgauge",
            "partition",
            "--manifest",
            "pool.json",
            "--preset",
            "setA",
            "--day",
            "5",
            "--night",
            "5",
        ]);
        assert!(err.is_err());
        let err = Cli::try_parse_from([
            "driftgauge",
            "partition",
            "--manifest",
            "pool.json",
            "--day",
            "5",
        ]);
        assert!(err.is_err());
    }

    #[test]
    fn label_probs_parse_and_reject() {
        let probs = parse_label_probs("car=0.7, person=0.3").unwrap();
        assert_eq!(probs["car"], 0.7);
        assert_eq!(probs["person"], 0.3);
        assert!(parse_label_probs("car").is_err());
        assert!(parse_label_probs("car=x").is_err());
        assert!(parse_label_probs("car=0.5,car=0.5").is_err());
    }

    #[test]
    fn map_row_specs_split_correctly() {
        let err = parse_map_row("no-equals").unwrap_err();
        assert!(matches!(err, CliError::Usage(_)));
    }
}
