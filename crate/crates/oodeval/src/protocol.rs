//! The evaluation protocol: threshold-selection policies, per-pair metric
//! reports, and the multi-dataset benchmark with one global threshold.
//!
//! Benchmarks mirror deployment: the decision threshold must be chosen
//! once, without access to the test OOD datasets. Two global policies are
//! supported — a TNR level on the ID scores alone, and the crossing point
//! on a held-out validation OOD set — plus the per-dataset crossing point
//! (`@test`) reported as an idealized reference.

use serde::{Deserialize, Serialize};

use crate::autc::{autc_sorted, crossing_threshold, AutcResult, Integration};
use crate::classic::{
    aupr_sorted, auroc_sorted, detection_error_on, rate_at_level_on, PrInterpolation, PrPositive,
    RateQuery,
};
use crate::error::{EvalError, Result};
use crate::scores::{Convention, DecisionRule, ScoreSet};
use crate::sweep::{curve_on_grid, SortedPair};

/// How the decision threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThresholdPolicy {
    /// Crossing point of the test pair itself. Tailored to each OOD
    /// dataset, so only meaningful as an idealized reference.
    AtTest,
    /// Smallest threshold with TNR >= level, from ID scores only.
    AtTnr { level: f64 },
    /// Crossing point of the ID-vs-validation-OOD pair.
    AtVal,
    /// Caller-supplied constant.
    Fixed { threshold: f64 },
}

impl ThresholdPolicy {
    /// Checks the policy's parameter ranges.
    pub fn validate(&self) -> Result<()> {
        match *self {
            ThresholdPolicy::AtTnr { level } if !(0.0..1.0).contains(&level) || level == 0.0 => {
                Err(EvalError::InvalidArgument {
                    reason: format!("TNR level must lie in (0, 1), got {level}"),
                })
            }
            ThresholdPolicy::Fixed { threshold } if !(0.0..=1.0).contains(&threshold) => {
                Err(EvalError::InvalidArgument {
                    reason: format!("fixed threshold must lie in [0, 1], got {threshold}"),
                })
            }
            _ => Ok(()),
        }
    }

    /// Compact label used in rendered reports, e.g. `@95TNR`.
    pub fn label(&self) -> String {
        match *self {
            ThresholdPolicy::AtTest => "@test".into(),
            ThresholdPolicy::AtTnr { level } => {
                let pct = level * 100.0;
                if (pct - pct.round()).abs() < 1e-9 {
                    format!("@{}TNR", pct.round() as i64)
                } else {
                    format!("@{pct}TNR")
                }
            }
            ThresholdPolicy::AtVal => "@val".into(),
            ThresholdPolicy::Fixed { threshold } => format!("@fixed({threshold})"),
        }
    }
}

/// Resolves a policy to a concrete threshold.
///
/// `@test` needs the test pair, `@val` the validation pair, `@tnr` only
/// the ID scores. Crossing-point policies reuse the crossing tie-break
/// (smallest rate gap, then smallest max rate, then smallest threshold).
pub fn select_threshold(
    policy: ThresholdPolicy,
    id: &ScoreSet,
    val_ood: Option<&ScoreSet>,
    test_ood: Option<&ScoreSet>,
    rule: DecisionRule,
) -> Result<f64> {
    policy.validate()?;
    let crossing_of = |ood: &ScoreSet| {
        let pair = SortedPair::new(id, ood);
        let grid = pair.union_grid();
        let curve = curve_on_grid(&pair, &grid, rule, Convention::OodPositive);
        crossing_threshold(&curve).threshold
    };
    match policy {
        ThresholdPolicy::Fixed { threshold } => Ok(threshold),
        ThresholdPolicy::AtTest => {
            let ood = test_ood.ok_or(EvalError::MissingDataset {
                what: "@test policy requires a test OOD score set",
            })?;
            Ok(crossing_of(ood))
        }
        ThresholdPolicy::AtVal => {
            let ood = val_ood.ok_or(EvalError::MissingDataset {
                what: "@val policy requires a validation OOD score set",
            })?;
            Ok(crossing_of(ood))
        }
        ThresholdPolicy::AtTnr { level } => {
            // smallest grid threshold with TNR >= level; TNR depends only
            // on the ID scores
            let grid = crate::sweep::ThresholdGrid::from_single(id);
            let n = id.len() as f64;
            let sorted = {
                let mut v = id.scores().to_vec();
                v.sort_unstable_by(f64::total_cmp);
                v
            };
            for &t in grid.thresholds() {
                let kept = match rule {
                    DecisionRule::StrictGreater => sorted.partition_point(|&s| s <= t),
                    DecisionRule::GreaterOrEqual => sorted.partition_point(|&s| s < t),
                };
                if kept as f64 / n >= level {
                    return Ok(t);
                }
            }
            // TNR reaches 1 at t = 1 under the strict rule, so this is
            // only reachable with >= and scores pinned at 1.
            Err(EvalError::ConstraintUnreachable {
                query: "TNR",
                level,
            })
        }
    }
}

/// FPR and FNR at one resolved threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdedRates {
    pub policy: ThresholdPolicy,
    pub threshold: f64,
    pub fpr: f64,
    pub fnr: f64,
}

/// Settings shared by every metric in a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalSettings {
    pub convention: Convention,
    pub rule: DecisionRule,
    pub integration: Integration,
    pub weight_fpr: f64,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            convention: Convention::default(),
            rule: DecisionRule::default(),
            integration: Integration::default(),
            weight_fpr: 0.5,
        }
    }
}

/// Every metric of one ID-vs-OOD pair, plus rates at resolved thresholds.
///
/// All values are fractions in `[0, 1]`; per-cent formatting belongs to
/// the presentation layer. `fpr95` is the FPR at 95% TPR and `fnr95` the
/// FNR at 95% TNR, both under the OOD-positive reading; the settings that
/// shaped the run are recorded so numbers from different tools can be
/// reconciled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    /// Name of the OOD side of the pair.
    pub pair_name: String,
    pub auroc: f64,
    pub aupr_in: f64,
    pub aupr_out: f64,
    pub fpr95: f64,
    pub fnr95: f64,
    pub detection_error: f64,
    pub aufpr: f64,
    pub aufnr: f64,
    pub autc: f64,
    pub thresholded: Vec<ThresholdedRates>,
    pub convention: Convention,
    pub rule: DecisionRule,
    pub integration: Integration,
    pub weight_fpr: f64,
}

/// Level used by the `fpr95` / `fnr95` report fields.
const REPORT_RATE_LEVEL: f64 = 0.95;

/// Computes every [`MetricReport`] field for one pair.
///
/// `resolved` carries (policy, threshold) pairs whose thresholds were
/// already selected by the caller — typically via [`select_threshold`] —
/// so that one global threshold can be shared across several pairs.
pub fn evaluate_pair(
    id: &ScoreSet,
    ood: &ScoreSet,
    resolved: &[(ThresholdPolicy, f64)],
    settings: &EvalSettings,
) -> Result<MetricReport> {
    id.require_unit_interval()?;
    ood.require_unit_interval()?;

    // One sort per side feeds every sweep-based metric of this pair.
    let pair = SortedPair::new(id, ood);
    let autc_result: AutcResult = autc_sorted(
        &pair,
        settings.weight_fpr,
        settings.integration,
        settings.rule,
        settings.convention,
    );

    // Rate-at-level and detection error share one union-grid curve under
    // the OOD-positive reading those metrics are defined in.
    let union_grid = pair.union_grid();
    let rate_curve = curve_on_grid(&pair, &union_grid, settings.rule, Convention::OodPositive);
    // A detector that cannot attain the rate level at any threshold is
    // reported at the worst value rather than failing the whole report.
    let rate_or_worst = |query: RateQuery| {
        match rate_at_level_on(&rate_curve, query, REPORT_RATE_LEVEL) {
            Ok(r) => Ok(r.value),
            Err(EvalError::ConstraintUnreachable { .. }) => Ok(1.0),
            Err(e) => Err(e),
        }
    };
    let fpr95 = rate_or_worst(RateQuery::FprAtTpr)?;
    let fnr95 = rate_or_worst(RateQuery::FnrAtTnr)?;

    let mut thresholded = Vec::with_capacity(resolved.len());
    for &(policy, threshold) in resolved {
        let counts = pair.confusion_at(threshold, settings.rule, settings.convention);
        thresholded.push(ThresholdedRates {
            policy,
            threshold,
            fpr: counts.fpr(),
            fnr: counts.fnr(),
        });
    }

    Ok(MetricReport {
        pair_name: ood.name().to_string(),
        auroc: auroc_sorted(&pair),
        aupr_in: aupr_sorted(&pair, PrPositive::In, PrInterpolation::Trapezoid),
        aupr_out: aupr_sorted(&pair, PrPositive::Out, PrInterpolation::Trapezoid),
        fpr95,
        fnr95,
        detection_error: detection_error_on(&rate_curve).error,
        aufpr: autc_result.aufpr,
        aufnr: autc_result.aufnr,
        autc: autc_result.autc,
        thresholded,
        convention: settings.convention,
        rule: settings.rule,
        integration: settings.integration,
        weight_fpr: settings.weight_fpr,
    })
}

/// A globally applied policy with its resolved threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalThreshold {
    pub policy: ThresholdPolicy,
    pub threshold: f64,
}

/// One ID set evaluated against several OOD test sets under shared
/// global thresholds.
///
/// Under the OOD-positive convention, the FPR at any fixed global
/// threshold depends only on the ID scores, so it is identical across
/// the per-dataset entries — as is the AUFPR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub id_name: String,
    pub val_name: String,
    pub tnr_level: f64,
    pub settings: EvalSettings,
    pub global_thresholds: Vec<GlobalThreshold>,
    pub per_dataset: Vec<MetricReport>,
}

/// Runs the full protocol: resolves the global thresholds once (TNR level
/// from ID alone, crossing point from the validation pair), then evaluates
/// every test pair under those plus its own `@test` reference.
pub fn run_benchmark(
    id: &ScoreSet,
    val_ood: &ScoreSet,
    test_oods: &[ScoreSet],
    tnr_level: f64,
    settings: &EvalSettings,
) -> Result<BenchmarkReport> {
    if test_oods.is_empty() {
        return Err(EvalError::MissingDataset {
            what: "benchmark requires at least one test OOD score set",
        });
    }
    id.require_unit_interval()?;
    val_ood.require_unit_interval()?;
    for set in test_oods {
        set.require_unit_interval()?;
    }

    let tnr_policy = ThresholdPolicy::AtTnr { level: tnr_level };
    let t_tnr = select_threshold(tnr_policy, id, None, None, settings.rule)?;
    let t_val = select_threshold(ThresholdPolicy::AtVal, id, Some(val_ood), None, settings.rule)?;

    let mut per_dataset = Vec::with_capacity(test_oods.len());
    for test in test_oods {
        let t_test = select_threshold(
            ThresholdPolicy::AtTest,
            id,
            None,
            Some(test),
            settings.rule,
        )?;
        let resolved = [
            (ThresholdPolicy::AtTest, t_test),
            (tnr_policy, t_tnr),
            (ThresholdPolicy::AtVal, t_val),
        ];
        per_dataset.push(evaluate_pair(id, test, &resolved, settings)?);
    }

    Ok(BenchmarkReport {
        id_name: id.name().to_string(),
        val_name: val_ood.name().to_string(),
        tnr_level,
        settings: *settings,
        global_thresholds: vec![
            GlobalThreshold {
                policy: tnr_policy,
                threshold: t_tnr,
            },
            GlobalThreshold {
                policy: ThresholdPolicy::AtVal,
                threshold: t_val,
            },
        ],
        per_dataset,
    })
}
