//! End-to-end checks of the command-line surface: exit codes, output
//! bytes, and the documented file formats.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn oodeval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oodeval"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(path: &Path, content: &str) {
    fs::write(path, content).unwrap();
}

#[test]
fn selftest_passes_and_prints_one_line_per_row() {
    let out = oodeval(&["selftest"]);
    assert!(out.status.success(), "{out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    // nine model rows plus six detector cells
    assert_eq!(lines.len(), 15, "{stdout}");
    assert!(lines.iter().all(|l| l.starts_with("PASS")), "{stdout}");
    assert!(
        stdout.contains("odin/svhn") && stdout.contains("recomputed"),
        "inconsistent cell must carry its note: {stdout}"
    );
}

#[test]
fn eval_json_report_on_labeled_file() {
    let dir = tempfile::tempdir().unwrap();
    let scores = dir.path().join("scores.csv");
    write(
        &scores,
        "score,label\n0.1,id\n0.2,id\n0.8,ood\n0.9,OOD\n",
    );
    let out = oodeval(&[
        "eval",
        "--id",
        scores.to_str().unwrap(),
        "--ood",
        scores.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["auroc"], 1.0);
    assert_eq!(report["convention"], "ood_positive");
    let policies: Vec<&str> = report["thresholded"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["policy"]["kind"].as_str().unwrap())
        .collect();
    assert_eq!(policies, ["at_test", "at_tnr"]);
}

#[test]
fn eval_markdown_contains_percent_table() {
    let dir = tempfile::tempdir().unwrap();
    let id = dir.path().join("id.csv");
    let ood = dir.path().join("ood.csv");
    write(&id, "0.1\n0.2\n");
    write(&ood, "0.8\n0.9\n");
    let out = oodeval(&[
        "eval",
        "--id",
        id.to_str().unwrap(),
        "--ood",
        ood.to_str().unwrap(),
        "--format",
        "markdown",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("| AUROC ↑ | 100.00 |"), "{text}");
    assert!(text.contains("**AUTC**"), "{text}");
}

#[test]
fn bench_writes_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let synth = |preset: &str, seed: &str, sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = oodeval(&[
            "synth",
            "--preset",
            preset,
            "--n",
            "5000",
            "--seed",
            seed,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{out:?}");
        out_dir
    };
    let base = synth("heavy-overlap", "1", "base");
    let t1 = synth("well-separated", "2", "t1");
    let t2 = synth("id-uniform", "3", "t2");

    let run = |sub: &str| {
        let report_dir = dir.path().join(sub);
        let out = oodeval(&[
            "bench",
            "--id",
            base.join("id.csv").to_str().unwrap(),
            "--val",
            base.join("ood.csv").to_str().unwrap(),
            "--ood",
            t1.join("ood.csv").to_str().unwrap(),
            "--ood",
            t2.join("ood.csv").to_str().unwrap(),
            "--out",
            report_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{out:?}");
        (
            fs::read(report_dir.join("report.json")).unwrap(),
            fs::read(report_dir.join("report.md")).unwrap(),
        )
    };
    let (json1, md1) = run("r1");
    let (json2, md2) = run("r2");
    assert_eq!(json1, json2, "bench JSON must be byte-identical");
    assert_eq!(md1, md2, "bench markdown must be byte-identical");

    let report: serde_json::Value = serde_json::from_slice(&json1).unwrap();
    assert_eq!(report["per_dataset"].as_array().unwrap().len(), 2);
    assert_eq!(report["id_name"], "id");
    // AUFPR constant across datasets
    let aufprs: Vec<f64> = report["per_dataset"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["aufpr"].as_f64().unwrap())
        .collect();
    assert_eq!(aufprs[0], aufprs[1]);
}

#[test]
fn bench_honors_config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let id = dir.path().join("id.csv");
    let val = dir.path().join("val.csv");
    let t1 = dir.path().join("t1.csv");
    write(&id, "1.0\n2.0\n3.0\n");
    write(&val, "8.0\n9.0\n");
    write(&t1, "7.0\n9.5\n");
    let config = dir.path().join("run.json");
    write(
        &config,
        &format!(
            "{{\"id_file\": {:?}, \"val_file\": {:?}, \"test_files\": [{:?}], \
             \"bounds\": [0, 10], \"integration\": \"exact_step\"}}",
            id.to_str().unwrap(),
            val.to_str().unwrap(),
            t1.to_str().unwrap()
        ),
    );
    let out = oodeval(&["bench", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["settings"]["integration"], "exact_step");

    // flag overrides the config's integration
    let out = oodeval(&[
        "bench",
        "--config",
        config.to_str().unwrap(),
        "--integration",
        "trapezoid",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["settings"]["integration"], "trapezoid");
}

#[test]
fn curves_exports_expected_files() {
    let dir = tempfile::tempdir().unwrap();
    let id = dir.path().join("id.csv");
    let ood = dir.path().join("ood.csv");
    write(&id, "0\n");
    write(&ood, "1\n");
    let curves = dir.path().join("curves");
    let out = oodeval(&[
        "curves",
        "--id",
        id.to_str().unwrap(),
        "--ood",
        ood.to_str().unwrap(),
        "--out",
        curves.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let tc = fs::read_to_string(curves.join("threshold_curve.csv")).unwrap();
    assert_eq!(tc, "threshold,fpr,fnr\n0,0,0\n1,0,1\n");
    for file in [
        "roc_curve.csv",
        "pr_curve_out.csv",
        "pr_curve_in.csv",
        "histogram.csv",
    ] {
        assert!(curves.join(file).exists(), "{file} missing");
    }
    let roc = fs::read_to_string(curves.join("roc_curve.csv")).unwrap();
    assert!(roc.starts_with("fpr,tpr\n0,0\n"));
    assert!(roc.trim_end().ends_with("1,1"));
}

#[test]
fn synth_spec_file_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    write(
        &spec,
        "{\"components\": [{\"kind\": \"truncated_gaussian\", \"mean\": 0.4, \
         \"stddev\": 0.05, \"weight\": 1.0}]}",
    );
    let sample = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = oodeval(&[
            "synth",
            "--spec",
            spec.to_str().unwrap(),
            "--n",
            "100",
            "--seed",
            "7",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{out:?}");
        fs::read(out_dir.join("scores.csv")).unwrap()
    };
    assert_eq!(sample("a"), sample("b"), "same seed, same bytes");
}

#[test]
fn error_paths_exit_nonzero_with_one_line_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    write(&bad, "0.1\nnot-a-number\n");
    let ok = dir.path().join("ok.csv");
    write(&ok, "0.5\n");

    let cases: Vec<Vec<&str>> = vec![
        // unparseable score file
        vec!["eval", "--id", bad.to_str().unwrap(), "--ood", ok.to_str().unwrap()],
        // missing file
        vec!["eval", "--id", "/nonexistent.csv", "--ood", ok.to_str().unwrap()],
        // unknown preset
        vec!["synth", "--preset", "nope", "--out", dir.path().to_str().unwrap()],
        // bench without test sets
        vec![
            "bench",
            "--id",
            ok.to_str().unwrap(),
            "--val",
            ok.to_str().unwrap(),
        ],
        // degenerate bounds
        vec![
            "eval",
            "--id",
            ok.to_str().unwrap(),
            "--ood",
            ok.to_str().unwrap(),
            "--bounds",
            "5,5",
        ],
    ];
    for args in cases {
        let out = oodeval(&args);
        assert!(!out.status.success(), "expected failure: {args:?}");
        let stderr = String::from_utf8(out.stderr).unwrap();
        let diagnostic: Vec<&str> = stderr.lines().filter(|l| l.starts_with("error:")).collect();
        assert_eq!(diagnostic.len(), 1, "one-line diagnostic expected: {stderr}");
    }
}

#[test]
fn scores_out_of_range_suggests_normalization() {
    let dir = tempfile::tempdir().unwrap();
    let id = dir.path().join("id.csv");
    let ood = dir.path().join("ood.csv");
    write(&id, "1.0\n5.0\n");
    write(&ood, "9.0\n");
    let out = oodeval(&[
        "eval",
        "--id",
        id.to_str().unwrap(),
        "--ood",
        ood.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("normalize"), "{stderr}");

    // with bounds the same input evaluates fine
    let out = oodeval(&[
        "eval",
        "--id",
        id.to_str().unwrap(),
        "--ood",
        ood.to_str().unwrap(),
        "--bounds",
        "0,10",
    ]);
    assert!(out.status.success(), "{out:?}");
}

#[test]
fn jsonl_input_works_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let scores = dir.path().join("scores.jsonl");
    write(
        &scores,
        "{\"score\": 0.1, \"label\": \"id\"}\n{\"score\": 0.9, \"label\": \"ood\"}\n",
    );
    let out = oodeval(&[
        "eval",
        "--id",
        scores.to_str().unwrap(),
        "--ood",
        scores.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["auroc"], 1.0);
}
