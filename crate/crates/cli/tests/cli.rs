//! End-to-end checks of the binary: exit codes, stdout contracts and error
//! handling. Exit codes are a stable contract: 0 success / no shift, 1 I/O
//! or data errors, 2 usage errors or insufficient pools, 3 shift detected.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_driftgauge"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

/// Writes a prediction file echoing every ground-truth box at score 0.9.
fn echo_predictions(dir: &Path, manifest: &str, out: &str) {
    let items: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.join(manifest)).unwrap()).unwrap();
    let mut preds = Vec::new();
    for item in items.as_array().unwrap() {
        for label in item["labels"].as_array().map(|l| l.as_slice()).unwrap_or(&[]) {
            preds.push(serde_json::json!({
                "image": item["name"],
                "category": label["category"],
                "score": 0.9,
                "box": label["box2d"],
            }));
        }
    }
    fs::write(dir.join(out), serde_json::to_vec(&preds).unwrap()).unwrap();
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    let cases: &[&[&str]] = &[
        &["partition", "--manifest", "x.json", "--day", "0", "--night", "0", "--output", "o.json"],
        &["partition", "--manifest", "x.json", "--preset", "setA"],
        &["partition", "--manifest", "x.json"],
        &["eval", "--gt", "a.json", "--predictions", "b.json"],
        &["detect", "--source", "a", "--target", "b", "--reducer", "identity", "--pca-k", "3", "--output", "r.json"],
        &["nonsense"],
        &[],
    ];
    for args in cases {
        let out = run_in(d, args);
        assert_eq!(code(&out), 2, "args {args:?}: {}", stderr(&out));
    }
}

#[test]
fn io_and_data_errors_exit_1() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("garbage.json"), "{not json").unwrap();
    let cases: &[&[&str]] = &[
        &["detect", "--source", "missing.dgf", "--target", "missing.dgf", "--output", "r.json"],
        &["label-shift", "--source", "missing.json", "--target", "missing.json"],
        &["report", "--before", "garbage.json"],
        &["reduce", "fit", "--features", "garbage.json", "--output", "m.dgp"],
    ];
    for args in cases {
        let out = run_in(d, args);
        assert_eq!(code(&out), 1, "args {args:?}: {}", stderr(&out));
    }
}

#[test]
fn detect_exit_codes_follow_the_verdict() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    let synth = run_in(
        d,
        &["synth", "features", "--n", "120", "--d", "4", "--delta", "3",
          "--source-out", "src.dgf", "--target-out", "tgt.dgf", "--seed", "5"],
    );
    assert_eq!(code(&synth), 0, "{}", stderr(&synth));

    let shifted = run_in(
        d,
        &["detect", "--source", "src.dgf", "--target", "tgt.dgf", "--sample-size", "40",
          "--repetitions", "3", "--permutations", "99", "--output", "r1.json"],
    );
    assert_eq!(code(&shifted), 3, "{}", stderr(&shifted));
    assert!(stdout(&shifted).contains("verdict: shift_detected"));

    let same = run_in(
        d,
        &["detect", "--source", "src.dgf", "--target", "src.dgf", "--sample-size", "40",
          "--repetitions", "3", "--permutations", "99", "--output", "r2.json"],
    );
    assert_eq!(code(&same), 0, "{}", stderr(&same));
    assert!(stdout(&same).contains("verdict: no_shift_detected"));
}

#[test]
fn eval_prints_the_pinned_map_line() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    let synth = run_in(
        d,
        &["synth", "manifest", "--n", "40", "--label-probs", "car=1.0",
          "--output", "gt.json", "--seed", "2"],
    );
    assert_eq!(code(&synth), 0, "{}", stderr(&synth));
    echo_predictions(d, "gt.json", "preds.json");

    let perfect = run_in(
        d,
        &["eval", "--gt", "gt.json", "--predictions", "preds.json", "--output", "eval.json"],
    );
    assert_eq!(code(&perfect), 0, "{}", stderr(&perfect));
    assert!(stdout(&perfect).contains("mAP@0.5 = 1.0000"), "{}", stdout(&perfect));

    fs::write(d.join("none.json"), "[]").unwrap();
    let empty = run_in(
        d,
        &["eval", "--gt", "gt.json", "--predictions", "none.json", "--output", "eval0.json"],
    );
    assert_eq!(code(&empty), 0, "{}", stderr(&empty));
    assert!(stdout(&empty).contains("mAP@0.5 = 0.0000"), "{}", stdout(&empty));
}

#[test]
fn report_rejects_mismatched_targets() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    let mut doc: serde_json::Value =
        serde_json::from_slice(&fs::read(fixture("report_aug.json")).unwrap()).unwrap();
    doc["target"] = "other_split".into();
    fs::write(d.join("other.json"), serde_json::to_vec(&doc).unwrap()).unwrap();

    let out = run_in(
        d,
        &["report", "--before", &fixture("report_base.json"), "--after", "other.json"],
    );
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    assert!(stderr(&out).contains("target"));
}

#[test]
fn every_command_echoes_its_config() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    let out = run_in(
        d,
        &["synth", "features", "--n", "10", "--d", "2",
          "--source-out", "a.dgf", "--target-out", "b.dgf"],
    );
    assert!(stdout(&out).starts_with("config: synth features "));
    let out = run_in(d, &["report", "--before", &fixture("report_base.json")]);
    assert!(stdout(&out).starts_with("config: report "));
}

#[test]
fn label_shift_flags_disjoint_categories() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    for (name, probs, seed) in [("a.json", "car=1.0", "3"), ("b.json", "person=1.0", "4")] {
        let out = run_in(
            d,
            &["synth", "manifest", "--n", "60", "--label-probs", probs,
              "--output", name, "--seed", seed],
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let out = run_in(
        d,
        &["label-shift", "--source", "a.json", "--target", "b.json", "--output", "ls.json"],
    );
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let doc: serde_json::Value =
        serde_json::from_slice(&fs::read(d.join("ls.json")).unwrap()).unwrap();
    // fully disjoint categories of equal size: statistic equals the total count
    assert!((doc["statistic"].as_f64().unwrap() - 120.0).abs() < 1e-9);
    assert!(doc["p_value"].as_f64().unwrap() < 1e-6);

    let same = run_in(
        d,
        &["label-shift", "--source", "a.json", "--target", "a.json"],
    );
    assert_eq!(code(&same), 0, "{}", stderr(&same));
}

#[test]
fn detect_report_file_reloads_as_saved() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    run_in(
        d,
        &["synth", "features", "--n", "80", "--d", "3", "--delta", "1",
          "--source-out", "s.dgf", "--target-out", "t.dgf", "--seed", "8"],
    );
    let out = run_in(
        d,
        &["detect", "--source", "s.dgf", "--target", "t.dgf", "--sample-size", "25",
          "--repetitions", "4", "--permutations", "49", "--reducer", "identity",
          "--seed", "21", "--output", "report.json"],
    );
    assert!(code(&out) == 0 || code(&out) == 3, "{}", stderr(&out));
    let report = driftgauge::io::report::load_report(&d.join("report.json")).unwrap();
    assert_eq!(report.source_name, "s");
    assert_eq!(report.target_name, "t");
    assert_eq!(report.config.repetitions, 4);
    assert_eq!(report.per_repetition.len(), 4);
}
