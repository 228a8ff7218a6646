//! Command-line front end: `eval`, `bench`, `curves`, `synth`, `selftest`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use oodeval::io::{
    detect_format, export_curves, fixture, load_config, parse_score_file, render_metric_report,
    render_report, write_scores_csv, ReportFormat, RunConfig, DEFAULT_HISTOGRAM_BINS,
};
use oodeval::protocol::{run_benchmark, select_threshold, EvalSettings, ThresholdPolicy};
use oodeval::scores::{Bounds, Convention, DecisionRule, Kind, ScoreSet};
use oodeval::synth::{preset_pair_by_name, sample_scores, SynthSpec};
use oodeval::Integration;

#[derive(Parser)]
#[command(
    name = "oodeval",
    version,
    about = "Threshold-aware evaluation of out-of-distribution detectors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one ID-vs-OOD pair and print a metric report
    Eval(EvalArgs),
    /// Evaluate one ID set against several OOD sets under global thresholds
    Bench(BenchArgs),
    /// Export plot-ready curve CSVs (threshold, ROC, PR, histogram)
    Curves(CurvesArgs),
    /// Sample synthetic score files from a preset or a mixture spec
    Synth(SynthArgs),
    /// Re-derive the embedded reference values and report pass/fail
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    OodPositive,
    IdPositive,
}

impl From<ConventionArg> for Convention {
    fn from(v: ConventionArg) -> Self {
        match v {
            ConventionArg::OodPositive => Convention::OodPositive,
            ConventionArg::IdPositive => Convention::IdPositive,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    /// flag positive iff score > threshold
    Gt,
    /// flag positive iff score >= threshold
    Ge,
}

impl From<RuleArg> for DecisionRule {
    fn from(v: RuleArg) -> Self {
        match v {
            RuleArg::Gt => DecisionRule::StrictGreater,
            RuleArg::Ge => DecisionRule::GreaterOrEqual,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum IntegrationArg {
    Trapezoid,
    Exact,
}

impl From<IntegrationArg> for Integration {
    fn from(v: IntegrationArg) -> Self {
        match v {
            IntegrationArg::Trapezoid => Integration::Trapezoid,
            IntegrationArg::Exact => Integration::ExactStep,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Markdown,
}

impl From<FormatArg> for ReportFormat {
    fn from(v: FormatArg) -> Self {
        match v {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Markdown => ReportFormat::Markdown,
        }
    }
}

fn parse_bounds(raw: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 2 {
        return Err("expected 'lo,hi'".into());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| "lo is not a number")?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| "hi is not a number")?;
    Ok((lo, hi))
}

/// Metric settings shared by the evaluating subcommands. Unset flags fall
/// back to the config file (bench) and then to the defaults.
#[derive(Args)]
struct MetricFlags {
    /// Positive class for confusion-based metrics
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
    /// Comparator flagging a score as positive
    #[arg(long, value_enum)]
    rule: Option<RuleArg>,
    /// Quadrature for the AUTC areas
    #[arg(long, value_enum)]
    integration: Option<IntegrationArg>,
    /// FPR weight in the AUTC combination (FNR gets 1 - w)
    #[arg(long, value_name = "F")]
    weight_fpr: Option<f64>,
    /// TNR level of the global @TNR threshold policy
    #[arg(long, value_name = "F")]
    tnr_level: Option<f64>,
    /// Normalization bounds applied to every input set
    #[arg(long, value_name = "LO,HI", value_parser = parse_bounds)]
    bounds: Option<(f64, f64)>,
}

impl MetricFlags {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = self.convention {
            cfg.convention = v.into();
        }
        if let Some(v) = self.rule {
            cfg.rule = v.into();
        }
        if let Some(v) = self.integration {
            cfg.integration = v.into();
        }
        if let Some(v) = self.weight_fpr {
            cfg.weight_fpr = v;
        }
        if let Some(v) = self.tnr_level {
            cfg.tnr_level = v;
        }
        if let Some(v) = self.bounds {
            cfg.bounds = Some(v);
        }
    }
}

fn settings_of(cfg: &RunConfig) -> EvalSettings {
    EvalSettings {
        convention: cfg.convention,
        rule: cfg.rule,
        integration: cfg.integration,
        weight_fpr: cfg.weight_fpr,
    }
}

#[derive(Args)]
struct EvalArgs {
    /// ID score file
    #[arg(long, value_name = "FILE")]
    id: PathBuf,
    /// OOD score file
    #[arg(long, value_name = "FILE")]
    ood: PathBuf,
    /// Validation OOD score file (enables the @val threshold)
    #[arg(long, value_name = "FILE")]
    val: Option<PathBuf>,
    #[command(flatten)]
    metrics: MetricFlags,
    /// Report encoding
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Write the report into this directory instead of stdout
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON run config; flags override its fields
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// ID score file
    #[arg(long, value_name = "FILE")]
    id: Option<PathBuf>,
    /// Validation OOD score file (tunes the @val global threshold)
    #[arg(long, value_name = "FILE")]
    val: Option<PathBuf>,
    /// Test OOD score files (repeatable)
    #[arg(long = "ood", value_name = "FILE")]
    oods: Vec<PathBuf>,
    #[command(flatten)]
    metrics: MetricFlags,
    /// Report encoding for stdout output
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Write report.json and report.md into this directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurvesArgs {
    /// ID score file
    #[arg(long, value_name = "FILE")]
    id: PathBuf,
    /// OOD score file
    #[arg(long, value_name = "FILE")]
    ood: PathBuf,
    #[command(flatten)]
    metrics: MetricFlags,
    /// Output directory for the CSV files
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Built-in spec pair (well-separated, adjacent-peaks, heavy-overlap,
    /// id-uniform, moderate-separation); writes id.csv and ood.csv
    #[arg(long, conflicts_with = "spec")]
    preset: Option<String>,
    /// JSON mixture spec file; writes scores.csv
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
    /// Samples per score set
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Generator seed (the OOD side of a preset uses seed + 1)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

/// Loads one score file as the wanted kind; unlabeled rows take that kind,
/// labeled files must contain rows of it.
fn load_set(path: &Path, want: Kind, bounds: Option<(f64, f64)>) -> Result<ScoreSet> {
    let format = detect_format(path)?;
    let parsed = parse_score_file(path, format, Some(want))
        .with_context(|| format!("reading {}", path.display()))?;
    let set = match want {
        Kind::Id => parsed.id,
        Kind::Ood => parsed.ood,
    }
    .ok_or_else(|| {
        anyhow!(
            "{} contains no {} scores",
            path.display(),
            match want {
                Kind::Id => "id",
                Kind::Ood => "ood",
            }
        )
    })?;
    match bounds {
        Some((lo, hi)) => Ok(set.normalized(Bounds::new(lo, hi)?)),
        None => Ok(set),
    }
}

fn write_or_print(out: &Option<PathBuf>, file: &str, content: &str) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(file), content)?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let mut cfg = RunConfig::default();
    args.metrics.apply(&mut cfg);
    let settings = settings_of(&cfg);

    let id = load_set(&args.id, Kind::Id, cfg.bounds)?;
    let ood = load_set(&args.ood, Kind::Ood, cfg.bounds)?;
    // catch unnormalized scores before threshold selection can trip over them
    id.require_unit_interval()?;
    ood.require_unit_interval()?;

    let mut resolved = vec![(
        ThresholdPolicy::AtTest,
        select_threshold(ThresholdPolicy::AtTest, &id, None, Some(&ood), cfg.rule)?,
    )];
    let tnr_policy = ThresholdPolicy::AtTnr {
        level: cfg.tnr_level,
    };
    resolved.push((
        tnr_policy,
        select_threshold(tnr_policy, &id, None, None, cfg.rule)?,
    ));
    if let Some(val_path) = &args.val {
        let val = load_set(val_path, Kind::Ood, cfg.bounds)?;
        resolved.push((
            ThresholdPolicy::AtVal,
            select_threshold(ThresholdPolicy::AtVal, &id, Some(&val), None, cfg.rule)?,
        ));
    }

    let report = oodeval::evaluate_pair(&id, &ood, &resolved, &settings)?;
    let rendered = render_metric_report(&report, args.format.into());
    let file = match args.format {
        FormatArg::Json => "report.json",
        FormatArg::Markdown => "report.md",
    };
    write_or_print(&args.out, file, &rendered)
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path).with_context(|| format!("loading {}", path.display()))?,
        None => RunConfig::default(),
    };
    if let Some(p) = &args.id {
        cfg.id_file = Some(p.clone());
    }
    if let Some(p) = &args.val {
        cfg.val_file = Some(p.clone());
    }
    if !args.oods.is_empty() {
        cfg.test_files = args.oods.clone();
    }
    if let Some(p) = &args.out {
        cfg.out_dir = Some(p.clone());
    }
    args.metrics.apply(&mut cfg);

    let id_file = cfg.id_file.as_ref().ok_or_else(|| anyhow!("--id (or config id_file) is required"))?;
    let val_file = cfg
        .val_file
        .as_ref()
        .ok_or_else(|| anyhow!("--val (or config val_file) is required"))?;
    if cfg.test_files.is_empty() {
        bail!("at least one --ood test file (or config test_files) is required");
    }

    let id = load_set(id_file, Kind::Id, cfg.bounds)?;
    let val = load_set(val_file, Kind::Ood, cfg.bounds)?;
    let tests: Vec<ScoreSet> = cfg
        .test_files
        .iter()
        .map(|p| load_set(p, Kind::Ood, cfg.bounds))
        .collect::<Result<_>>()?;

    let report = run_benchmark(&id, &val, &tests, cfg.tnr_level, &settings_of(&cfg))?;
    match &cfg.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(
                dir.join("report.json"),
                render_report(&report, ReportFormat::Json),
            )?;
            std::fs::write(
                dir.join("report.md"),
                render_report(&report, ReportFormat::Markdown),
            )?;
        }
        None => print!("{}", render_report(&report, args.format.into())),
    }
    Ok(())
}

fn cmd_curves(args: CurvesArgs) -> Result<()> {
    let mut cfg = RunConfig::default();
    args.metrics.apply(&mut cfg);
    let id = load_set(&args.id, Kind::Id, cfg.bounds)?;
    let ood = load_set(&args.ood, Kind::Ood, cfg.bounds)?;
    let written = export_curves(
        &id,
        &ood,
        &args.out,
        DEFAULT_HISTOGRAM_BINS,
        cfg.rule,
        cfg.convention,
    )?;
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out)?;
    match (&args.preset, &args.spec) {
        (Some(name), None) => {
            let (id_spec, ood_spec) = preset_pair_by_name(name)?;
            let id = sample_scores(&id_spec, args.n, args.seed, format!("{name}-id"), Kind::Id)?;
            let ood = sample_scores(
                &ood_spec,
                args.n,
                args.seed + 1,
                format!("{name}-ood"),
                Kind::Ood,
            )?;
            write_scores_csv(&args.out.join("id.csv"), &id)?;
            write_scores_csv(&args.out.join("ood.csv"), &ood)?;
            eprintln!("wrote {}/id.csv and {}/ood.csv", args.out.display(), args.out.display());
        }
        (None, Some(spec_path)) => {
            let content = std::fs::read_to_string(spec_path)
                .with_context(|| format!("reading {}", spec_path.display()))?;
            let spec: SynthSpec = serde_json::from_str(&content)
                .with_context(|| format!("parsing {}", spec_path.display()))?;
            let set = sample_scores(&spec, args.n, args.seed, "synth", Kind::Id)?;
            write_scores_csv(&args.out.join("scores.csv"), &set)?;
            eprintln!("wrote {}/scores.csv", args.out.display());
        }
        _ => bail!("pass exactly one of --preset or --spec"),
    }
    Ok(())
}

fn cmd_selftest() -> Result<()> {
    let mut failures = 0;
    for line in fixture::run_selftest() {
        let status = if line.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {label}: autc={computed:.6} expected={expected:.6} |delta|={delta:.2e} tol={tol:.0e}{note}",
            label = line.label,
            computed = line.computed_autc,
            expected = line.expected_autc,
            delta = line.delta,
            tol = line.tolerance,
            note = line
                .note
                .as_deref()
                .map(|n| format!(" ({n})"))
                .unwrap_or_default(),
        );
        if !line.pass {
            failures += 1;
        }
    }
    if failures > 0 {
        bail!("{failures} reference rows failed the combination identity");
    }
    Ok(())
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Eval(args) => cmd_eval(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Curves(args) => cmd_curves(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Selftest => cmd_selftest(),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
