//! Rendering of comparison reports in three formats: a human-readable text
//! block, a flat CSV table and a JSON document. Text and CSV show the
//! table-style values (p-values to two decimals, mAP as percent to one
//! decimal); JSON carries the raw numbers.

use clap::ValueEnum;
use driftgauge_core::protocol::{ShiftChange, ShiftReport, Verdict};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

/// One side of a rendered shift comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftLine {
    pub source: String,
    pub mean_p: f64,
    pub mean_statistic: f64,
    pub verdict: Verdict,
}

impl ShiftLine {
    fn of(report: &ShiftReport) -> Self {
        ShiftLine {
            source: report.source_name.clone(),
            mean_p: report.mean_p,
            mean_statistic: report.mean_statistic,
            verdict: report.verdict,
        }
    }
}

/// One row of the mAP table; values are fractions in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapRow {
    pub label: String,
    pub before: f64,
    pub after: Option<f64>,
}

/// Everything the report command renders.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportView {
    pub target: String,
    pub before: ShiftLine,
    pub after: Option<ShiftLine>,
    /// Present exactly when `after` is.
    pub change: Option<ShiftChange>,
    pub map_rows: Vec<MapRow>,
}

impl ReportView {
    pub fn single(report: &ShiftReport, map_rows: Vec<MapRow>) -> Self {
        ReportView {
            target: report.target_name.clone(),
            before: ShiftLine::of(report),
            after: None,
            change: None,
            map_rows,
        }
    }

    pub fn pair(
        before: &ShiftReport,
        after: &ShiftReport,
        change: ShiftChange,
        map_rows: Vec<MapRow>,
    ) -> Self {
        debug_assert_eq!(before.target_name, after.target_name);
        ReportView {
            target: before.target_name.clone(),
            before: ShiftLine::of(before),
            after: Some(ShiftLine::of(after)),
            change: Some(change),
            map_rows,
        }
    }
}

pub fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::ShiftDetected => "shift_detected",
        Verdict::NoShiftDetected => "no_shift_detected",
    }
}

pub fn change_label(c: ShiftChange) -> &'static str {
    match c {
        ShiftChange::Reduced => "reduced",
        ShiftChange::Increased => "increased",
        ShiftChange::Unchanged => "unchanged",
        ShiftChange::Mixed => "mixed",
    }
}

fn p_str(v: f64) -> String {
    format!("{v:.2}")
}

fn stat_str(v: f64) -> String {
    format!("{v:.6}")
}

fn pct_str(v: f64) -> String {
    format!("{:.1}", v * 100.0)
}

pub fn render(view: &ReportView, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => render_text(view),
        OutputFormat::Csv => render_csv(view),
        OutputFormat::Json => render_json(view),
    }
}

fn pair_or_single(before: String, after: Option<String>) -> String {
    match after {
        Some(after) => format!("{before} / {after}"),
        None => before,
    }
}

fn render_text(view: &ReportView) -> String {
    let mut out = String::new();
    let a = view.after.as_ref();
    out.push_str("shift report\n");
    out.push_str(&format!(
        "  source: {}\n",
        pair_or_single(view.before.source.clone(), a.map(|l| l.source.clone()))
    ));
    out.push_str(&format!("  target: {}\n", view.target));
    out.push_str(&format!(
        "  mean p-value: {}\n",
        pair_or_single(p_str(view.before.mean_p), a.map(|l| p_str(l.mean_p)))
    ));
    out.push_str(&format!(
        "  mean statistic: {}\n",
        pair_or_single(
            stat_str(view.before.mean_statistic),
            a.map(|l| stat_str(l.mean_statistic))
        )
    ));
    out.push_str(&format!(
        "  verdict: {}\n",
        pair_or_single(
            verdict_label(view.before.verdict).to_string(),
            a.map(|l| verdict_label(l.verdict).to_string())
        )
    ));
    if let Some(change) = view.change {
        out.push_str(&format!("  change: {}\n", change_label(change)));
    }
    if !view.map_rows.is_empty() {
        out.push_str("\nmAP@0.5 (%)\n");
        for row in &view.map_rows {
            match row.after {
                Some(after) => out.push_str(&format!(
                    "  {}: {} \u{2192} {}\n",
                    row.label,
                    pct_str(row.before),
                    pct_str(after)
                )),
                None => out.push_str(&format!("  {}: {}\n", row.label, pct_str(row.before))),
            }
        }
    }
    out
}

fn render_csv(view: &ReportView) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let a = view.after.as_ref();
    let blank = String::new();
    let mut row = |section: &str, label: &str, before: String, after: String| {
        w.write_record([section, label, &before, &after])
            .expect("csv rows have a fixed width");
    };
    row("section", "label", "before".into(), "after".into());
    row(
        "shift",
        "source",
        view.before.source.clone(),
        a.map(|l| l.source.clone()).unwrap_or_default(),
    );
    row("shift", "target", view.target.clone(), blank.clone());
    row(
        "shift",
        "mean_p",
        p_str(view.before.mean_p),
        a.map(|l| p_str(l.mean_p)).unwrap_or_default(),
    );
    row(
        "shift",
        "mean_statistic",
        stat_str(view.before.mean_statistic),
        a.map(|l| stat_str(l.mean_statistic)).unwrap_or_default(),
    );
    row(
        "shift",
        "verdict",
        verdict_label(view.before.verdict).into(),
        a.map(|l| verdict_label(l.verdict).to_string())
            .unwrap_or_default(),
    );
    if let Some(change) = view.change {
        row("shift", "change", change_label(change).into(), blank);
    }
    for r in &view.map_rows {
        row(
            "map",
            &r.label,
            pct_str(r.before),
            r.after.map(pct_str).unwrap_or_default(),
        );
    }
    let bytes = w.into_inner().expect("writing to memory cannot fail");
    String::from_utf8(bytes).expect("csv output is UTF-8")
}

#[derive(Serialize)]
struct JsonOut<'a> {
    shift: JsonShift<'a>,
    map: Vec<JsonMap<'a>>,
}

#[derive(Serialize)]
struct JsonShift<'a> {
    source: Vec<&'a str>,
    target: &'a str,
    mean_p: Vec<f64>,
    mean_statistic: Vec<f64>,
    verdict: Vec<&'static str>,
    change: Option<&'static str>,
}

#[derive(Serialize)]
struct JsonMap<'a> {
    label: &'a str,
    before: f64,
    after: Option<f64>,
}

fn render_json(view: &ReportView) -> String {
    let a = view.after.as_ref();
    let mut source = vec![view.before.source.as_str()];
    let mut mean_p = vec![view.before.mean_p];
    let mut mean_statistic = vec![view.before.mean_statistic];
    let mut verdict = vec![verdict_label(view.before.verdict)];
    if let Some(l) = a {
        source.push(l.source.as_str());
        mean_p.push(l.mean_p);
        mean_statistic.push(l.mean_statistic);
        verdict.push(verdict_label(l.verdict));
    }
    let out = JsonOut {
        shift: JsonShift {
            source,
            target: &view.target,
            mean_p,
            mean_statistic,
            verdict,
            change: view.change.map(change_label),
        },
        map: view
            .map_rows
            .iter()
            .map(|r| JsonMap {
                label: &r.label,
                before: r.before,
                after: r.after,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&out).expect("report view serializes");
    text.push('\n');
    text
}
