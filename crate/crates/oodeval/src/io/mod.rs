//! Score-file formats, curve export for external plotting, report
//! rendering, and the run configuration consumed by the CLI.
//!
//! The tool emits plot-ready CSV data rather than images, which keeps
//! outputs byte-for-byte testable. All serialized metrics are fractions
//! in `[0, 1]`; per-cent formatting happens only in the markdown renderer.

pub mod fixture;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::autc::Integration;
use crate::classic::{pr_curve, roc_curve, PrPositive};
use crate::error::{EvalError, Result};
use crate::protocol::{BenchmarkReport, MetricReport};
use crate::scores::{Convention, DecisionRule, Kind, ScoreSet};
use crate::sweep::{threshold_curve, GridOrigin, ThresholdGrid};

/// Supported score-file layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreFileFormat {
    /// One finite decimal per line; optional `score` header.
    CsvSingleColumn,
    /// Header `score,label` with label `id` or `ood` (case-insensitive).
    CsvScoreLabel,
    /// One JSON object per line with a numeric `score` and an optional
    /// string `label`.
    Jsonl,
}

/// Picks a format from the file extension and first line: `.jsonl` /
/// `.ndjson` parse as JSON lines, a `score,label` header selects the
/// labeled layout, anything else is a single column.
pub fn detect_format(path: &Path) -> Result<ScoreFileFormat> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl") | Some("ndjson") => return Ok(ScoreFileFormat::Jsonl),
        _ => {}
    }
    let content = fs::read_to_string(path)?;
    let first = content.lines().next().unwrap_or("");
    if normalized_header(first) == Some(("score".into(), "label".into())) {
        Ok(ScoreFileFormat::CsvScoreLabel)
    } else {
        Ok(ScoreFileFormat::CsvSingleColumn)
    }
}

fn normalized_header(line: &str) -> Option<(String, String)> {
    let mut parts = line.split(',').map(|s| s.trim().to_ascii_lowercase());
    match (parts.next(), parts.next(), parts.next()) {
        (Some(a), Some(b), None) => Some((a, b)),
        _ => None,
    }
}

/// Scores recovered from one file, split by label when present.
#[derive(Debug, Clone)]
pub struct ParsedScores {
    pub id: Option<ScoreSet>,
    pub ood: Option<ScoreSet>,
}

impl ParsedScores {
    /// The single set of an unlabeled file (or a labeled file that only
    /// contained one class).
    pub fn into_single(self) -> Result<ScoreSet> {
        match (self.id, self.ood) {
            (Some(s), None) | (None, Some(s)) => Ok(s),
            (Some(_), Some(_)) => Err(EvalError::Parse {
                line: 0,
                reason: "expected a single-class score file but found both labels".into(),
            }),
            (None, None) => Err(EvalError::EmptyInput),
        }
    }
}

fn parse_score(raw: &str, line: usize) -> Result<f64> {
    let value: f64 = raw.trim().parse().map_err(|_| EvalError::Parse {
        line,
        reason: format!("not a number: '{}'", raw.trim()),
    })?;
    Ok(value)
}

fn parse_label(raw: &str, line: usize) -> Result<Kind> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "id" => Ok(Kind::Id),
        "ood" => Ok(Kind::Ood),
        other => Err(EvalError::Parse {
            line,
            reason: format!("label must be 'id' or 'ood', got '{other}'"),
        }),
    }
}

/// Parses a score file into one or two [`ScoreSet`]s.
///
/// Unlabeled rows take `fallback_kind`; a missing fallback on an
/// unlabeled row is a parse error. Set names derive from the file stem,
/// with a `:id` / `:ood` suffix when one file provides both classes.
pub fn parse_score_file(
    path: &Path,
    format: ScoreFileFormat,
    fallback_kind: Option<Kind>,
) -> Result<ParsedScores> {
    let content = fs::read_to_string(path)?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("scores")
        .to_string();

    let mut id_scores = Vec::new();
    let mut ood_scores = Vec::new();
    let mut push = |kind: Kind, value: f64, line: usize| -> Result<()> {
        if !value.is_finite() {
            return Err(EvalError::NonFiniteScore {
                index: id_scores.len() + ood_scores.len(),
            });
        }
        let _ = line;
        match kind {
            Kind::Id => id_scores.push(value),
            Kind::Ood => ood_scores.push(value),
        }
        Ok(())
    };

    match format {
        ScoreFileFormat::CsvSingleColumn => {
            let mut lines = content.lines().enumerate().peekable();
            if let Some((_, first)) = lines.peek() {
                if first.trim().eq_ignore_ascii_case("score") {
                    lines.next();
                }
            }
            for (i, line) in lines {
                let line_no = i + 1;
                if line.trim().is_empty() {
                    continue;
                }
                let kind = fallback_kind.ok_or(EvalError::Parse {
                    line: line_no,
                    reason: "single-column file needs an explicit id/ood kind".into(),
                })?;
                push(kind, parse_score(line, line_no)?, line_no)?;
            }
        }
        ScoreFileFormat::CsvScoreLabel => {
            let mut lines = content.lines().enumerate();
            match lines.next() {
                Some((_, header))
                    if normalized_header(header)
                        .is_some_and(|(a, b)| a == "score" && b == "label") => {}
                _ => {
                    return Err(EvalError::Parse {
                        line: 1,
                        reason: "expected header 'score,label'".into(),
                    })
                }
            }
            for (i, line) in lines {
                let line_no = i + 1;
                if line.trim().is_empty() {
                    continue;
                }
                let mut cols = line.splitn(2, ',');
                let score = parse_score(cols.next().unwrap_or(""), line_no)?;
                let label = cols.next().ok_or(EvalError::Parse {
                    line: line_no,
                    reason: "missing label column".into(),
                })?;
                push(parse_label(label, line_no)?, score, line_no)?;
            }
        }
        ScoreFileFormat::Jsonl => {
            for (i, line) in content.lines().enumerate() {
                let line_no = i + 1;
                if line.trim().is_empty() {
                    continue;
                }
                let value: serde_json::Value =
                    serde_json::from_str(line).map_err(|e| EvalError::Parse {
                        line: line_no,
                        reason: format!("invalid JSON: {e}"),
                    })?;
                let score = value
                    .get("score")
                    .and_then(|v| v.as_f64())
                    .ok_or(EvalError::Parse {
                        line: line_no,
                        reason: "object needs a numeric 'score' field".into(),
                    })?;
                let kind = match value.get("label") {
                    Some(serde_json::Value::String(s)) => parse_label(s, line_no)?,
                    Some(_) => {
                        return Err(EvalError::Parse {
                            line: line_no,
                            reason: "'label' must be a string".into(),
                        })
                    }
                    None => fallback_kind.ok_or(EvalError::Parse {
                        line: line_no,
                        reason: "row has no 'label' and no fallback kind was given".into(),
                    })?,
                };
                push(kind, score, line_no)?;
            }
        }
    }

    let both = !id_scores.is_empty() && !ood_scores.is_empty();
    let named = |suffix: &str| {
        if both {
            format!("{stem}:{suffix}")
        } else {
            stem.clone()
        }
    };
    let id = if id_scores.is_empty() {
        None
    } else {
        Some(ScoreSet::new(named("id"), Kind::Id, id_scores)?)
    };
    let ood = if ood_scores.is_empty() {
        None
    } else {
        Some(ScoreSet::new(named("ood"), Kind::Ood, ood_scores)?)
    };
    if id.is_none() && ood.is_none() {
        return Err(EvalError::EmptyInput);
    }
    Ok(ParsedScores { id, ood })
}

/// Writes a single-column score CSV (header `score`), shortest
/// round-trip float formatting.
pub fn write_scores_csv(path: &Path, scores: &ScoreSet) -> Result<()> {
    let mut out = String::from("score\n");
    for s in scores.scores() {
        writeln!(out, "{s}").expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

fn write_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> Result<()> {
    let mut out = String::with_capacity(rows.len() * 16 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            write!(out, "{v}").expect("string write");
            first = false;
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Equal-width histogram densities over `[0, 1]`; each class integrates
/// to 1. Rows are `(bin_left, bin_right, id_density, ood_density)`.
fn histogram_rows(id: &ScoreSet, ood: &ScoreSet, bins: usize) -> Vec<Vec<f64>> {
    let b = bins as f64;
    let count = |set: &ScoreSet| {
        let mut c = vec![0usize; bins];
        for &s in set.scores() {
            let k = ((s * b) as usize).min(bins - 1);
            c[k] += 1;
        }
        c
    };
    let id_counts = count(id);
    let ood_counts = count(ood);
    (0..bins)
        .map(|k| {
            vec![
                k as f64 / b,
                (k + 1) as f64 / b,
                id_counts[k] as f64 * b / id.len() as f64,
                ood_counts[k] as f64 * b / ood.len() as f64,
            ]
        })
        .collect()
}

/// Default bin count for exported histograms.
pub const DEFAULT_HISTOGRAM_BINS: usize = 20;

/// Writes the plot-ready CSVs for one pair into `out_dir`:
/// `threshold_curve.csv`, `roc_curve.csv`, `pr_curve_out.csv`,
/// `pr_curve_in.csv`, and `histogram.csv`. Output bytes are a pure
/// function of the inputs.
pub fn export_curves(
    id: &ScoreSet,
    ood: &ScoreSet,
    out_dir: &Path,
    bins: usize,
    rule: DecisionRule,
    convention: Convention,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    let grid = ThresholdGrid::from_pair(id, ood, GridOrigin::UniqueScores);
    let curve = threshold_curve(id, ood, &grid, rule, convention);
    let rows: Vec<Vec<f64>> = grid
        .thresholds()
        .iter()
        .enumerate()
        .map(|(i, &t)| vec![t, curve.fpr()[i], curve.fnr()[i]])
        .collect();
    let path = out_dir.join("threshold_curve.csv");
    write_csv(&path, "threshold,fpr,fnr", &rows)?;
    written.push(path);

    let roc = roc_curve(id, ood);
    let rows: Vec<Vec<f64>> = roc.points().iter().map(|&(x, y)| vec![x, y]).collect();
    let path = out_dir.join("roc_curve.csv");
    write_csv(&path, "fpr,tpr", &rows)?;
    written.push(path);

    for (positive, file) in [
        (PrPositive::Out, "pr_curve_out.csv"),
        (PrPositive::In, "pr_curve_in.csv"),
    ] {
        let pr = pr_curve(id, ood, positive);
        let rows: Vec<Vec<f64>> = pr.points().iter().map(|&(r, p)| vec![r, p]).collect();
        let path = out_dir.join(file);
        write_csv(&path, "recall,precision", &rows)?;
        written.push(path);
    }

    let path = out_dir.join("histogram.csv");
    write_csv(
        &path,
        "bin_left,bin_right,id_density,ood_density",
        &histogram_rows(id, ood, bins),
    )?;
    written.push(path);

    Ok(written)
}

/// Output encoding of rendered reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Markdown,
}

fn pct(v: f64) -> String {
    format!("{:.2}", v * 100.0)
}

/// Renders a benchmark report. JSON is schema-stable and keeps fractions;
/// markdown mirrors a per-dataset results table with percentages at two
/// decimals, printing dataset-constant rows (AUFPR, global-threshold FPR)
/// once.
pub fn render_report(report: &BenchmarkReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Markdown => render_benchmark_markdown(report),
    }
}

fn span_row(values: &[String], constant: bool, datasets: usize) -> String {
    if constant {
        let mut row = format!(" {} (all){}", values[0], " |".repeat(datasets - 1));
        row.push(' ');
        row
    } else {
        format!(" {} ", values.join(" | "))
    }
}

fn render_benchmark_markdown(report: &BenchmarkReport) -> String {
    let mut out = String::new();
    let datasets = report.per_dataset.len();
    writeln!(
        out,
        "# OOD detection benchmark — ID: {}, validation OOD: {}",
        report.id_name, report.val_name
    )
    .unwrap();
    writeln!(out).unwrap();
    let s = &report.settings;
    writeln!(
        out,
        "Settings: convention={:?}, rule={:?}, integration={:?}, weight_fpr={}, tnr_level={}",
        s.convention, s.rule, s.integration, s.weight_fpr, report.tnr_level
    )
    .unwrap();
    let globals: Vec<String> = report
        .global_thresholds
        .iter()
        .map(|g| format!("{} = {}", g.policy.label(), g.threshold))
        .collect();
    writeln!(out, "Global thresholds: {}", globals.join(", ")).unwrap();
    writeln!(out).unwrap();

    writeln!(
        out,
        "| metric | {} |",
        report
            .per_dataset
            .iter()
            .map(|r| r.pair_name.as_str())
            .collect::<Vec<_>>()
            .join(" | ")
    )
    .unwrap();
    writeln!(out, "|---|{}", "---:|".repeat(datasets)).unwrap();

    type Getter<'a> = &'a dyn Fn(&MetricReport) -> f64;
    let col = |f: Getter| -> Vec<String> {
        report.per_dataset.iter().map(|r| pct(f(r))).collect()
    };
    let all_equal = |f: Getter| -> bool {
        report
            .per_dataset
            .windows(2)
            .all(|w| f(&w[0]) == f(&w[1]))
    };

    let plain_rows: [(&str, Getter); 6] = [
        ("AUROC ↑", &|r| r.auroc),
        ("AUPR-in ↑", &|r| r.aupr_in),
        ("AUPR-out ↑", &|r| r.aupr_out),
        ("FPR95 ↓", &|r| r.fpr95),
        ("FNR95 ↓", &|r| r.fnr95),
        ("detection error ↓", &|r| r.detection_error),
    ];
    for (label, f) in plain_rows {
        writeln!(out, "| {label} |{}|", span_row(&col(f), false, datasets)).unwrap();
    }
    // AUFPR depends only on the ID scores, so it spans the datasets.
    writeln!(
        out,
        "| AUFPR ↓ |{}|",
        span_row(&col(&|r| r.aufpr), all_equal(&|r| r.aufpr), datasets)
    )
    .unwrap();
    writeln!(out, "| AUFNR ↓ |{}|", span_row(&col(&|r| r.aufnr), false, datasets)).unwrap();
    let autc_cells: Vec<String> = report
        .per_dataset
        .iter()
        .map(|r| format!("**{}**", pct(r.autc)))
        .collect();
    writeln!(out, "| **AUTC** ↓ | {} |", autc_cells.join(" | ")).unwrap();

    // one threshold/FPR/FNR block per policy, in the order they appear
    let n_policies = report
        .per_dataset
        .first()
        .map_or(0, |r| r.thresholded.len());
    for p in 0..n_policies {
        let label = report.per_dataset[0].thresholded[p].policy.label();
        let thresholds: Vec<String> = report
            .per_dataset
            .iter()
            .map(|r| format!("{}", r.thresholded[p].threshold))
            .collect();
        let t_equal = report
            .per_dataset
            .windows(2)
            .all(|w| w[0].thresholded[p].threshold == w[1].thresholded[p].threshold);
        writeln!(
            out,
            "| {label} threshold |{}|",
            span_row(&thresholds, t_equal, datasets)
        )
        .unwrap();
        let fprs: Vec<String> = report
            .per_dataset
            .iter()
            .map(|r| pct(r.thresholded[p].fpr))
            .collect();
        let fpr_equal = report
            .per_dataset
            .windows(2)
            .all(|w| w[0].thresholded[p].fpr == w[1].thresholded[p].fpr);
        writeln!(out, "| {label} FPR ↓ |{}|", span_row(&fprs, fpr_equal, datasets)).unwrap();
        let fnrs: Vec<String> = report
            .per_dataset
            .iter()
            .map(|r| pct(r.thresholded[p].fnr))
            .collect();
        writeln!(out, "| {label} FNR ↓ |{}|", span_row(&fnrs, false, datasets)).unwrap();
    }
    out
}

/// Renders a single-pair report.
pub fn render_metric_report(report: &MetricReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Markdown => {
            let mut out = String::new();
            writeln!(out, "# OOD detection report — {}", report.pair_name).unwrap();
            writeln!(out).unwrap();
            writeln!(
                out,
                "Settings: convention={:?}, rule={:?}, integration={:?}, weight_fpr={}",
                report.convention, report.rule, report.integration, report.weight_fpr
            )
            .unwrap();
            writeln!(out).unwrap();
            writeln!(out, "| metric | value |").unwrap();
            writeln!(out, "|---|---:|").unwrap();
            let rows = [
                ("AUROC ↑", report.auroc),
                ("AUPR-in ↑", report.aupr_in),
                ("AUPR-out ↑", report.aupr_out),
                ("FPR95 ↓", report.fpr95),
                ("FNR95 ↓", report.fnr95),
                ("detection error ↓", report.detection_error),
                ("AUFPR ↓", report.aufpr),
                ("AUFNR ↓", report.aufnr),
            ];
            for (label, v) in rows {
                writeln!(out, "| {label} | {} |", pct(v)).unwrap();
            }
            writeln!(out, "| **AUTC** ↓ | **{}** |", pct(report.autc)).unwrap();
            for t in &report.thresholded {
                writeln!(
                    out,
                    "| {} (t={}) FPR / FNR ↓ | {} / {} |",
                    t.policy.label(),
                    t.threshold,
                    pct(t.fpr),
                    pct(t.fnr)
                )
                .unwrap();
            }
            out
        }
    }
}

/// Run configuration for the `bench` subcommand. Flags override any field
/// also present in the config file; the effective settings are echoed
/// into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub id_file: Option<PathBuf>,
    pub val_file: Option<PathBuf>,
    pub test_files: Vec<PathBuf>,
    pub convention: Convention,
    pub rule: DecisionRule,
    pub integration: Integration,
    pub weight_fpr: f64,
    pub tnr_level: f64,
    /// `[lo, hi]` normalization bounds applied to every input set.
    pub bounds: Option<(f64, f64)>,
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            id_file: None,
            val_file: None,
            test_files: Vec::new(),
            convention: Convention::default(),
            rule: DecisionRule::default(),
            integration: Integration::default(),
            weight_fpr: 0.5,
            tnr_level: 0.95,
            bounds: None,
            out_dir: None,
            seed: 0,
        }
    }
}

/// Loads a JSON [`RunConfig`], rejecting unknown fields.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let content = fs::read_to_string(path)?;
    serde_json::from_str(&content).map_err(|e| EvalError::Parse {
        line: e.line(),
        reason: format!("config: {e}"),
    })
}
