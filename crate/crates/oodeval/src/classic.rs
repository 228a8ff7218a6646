//! Standard detection metrics: AUROC, AUPR (both positive-class variants),
//! rate-at-level operating points, and the best-threshold detection error.
//!
//! AUROC and AUPR are rank-based and therefore do not require scores to be
//! normalized into `[0, 1]`. The operating-point metrics sweep the
//! unique-scores threshold grid and so inherit the decision rule.

use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};
use crate::scores::{Convention, DecisionRule, ScoreSet};
use crate::sweep::{curve_on_grid, SortedPair, ThresholdCurve};

/// Receiver operating characteristic: `(fpr, tpr)` points from `(0, 0)`
/// to `(1, 1)`, both coordinates non-decreasing. Tied scores are merged
/// into a single sweep step.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    points: Vec<(f64, f64)>,
}

impl RocCurve {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

/// Precision-recall curve: `(recall, precision)` points with recall
/// non-decreasing, anchored at recall 0 with the precision of the
/// highest-score group.
#[derive(Debug, Clone, PartialEq)]
pub struct PrCurve {
    points: Vec<(f64, f64)>,
    positive: PrPositive,
}

impl PrCurve {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn positive(&self) -> PrPositive {
        self.positive
    }
}

/// Which class is treated as positive for precision-recall analysis.
/// Unlike AUROC, the AUPR depends on this choice and on sample sizes, so
/// both variants are reported side by side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrPositive {
    /// ID samples positive, ranked by ascending OOD score.
    In,
    /// OOD samples positive, ranked by descending OOD score.
    Out,
}

/// Area rule for the PR curve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrInterpolation {
    /// Linear interpolation between sweep points.
    #[default]
    Trapezoid,
    /// Right-step interpolation; equals average precision.
    Step,
}

/// Probability that a positive sample outranks a negative one, with ties
/// credited 1/2 (the rank-sum construction). Identical under either
/// positive-class convention, hence no convention parameter.
pub fn auroc(id: &ScoreSet, ood: &ScoreSet) -> f64 {
    auroc_sorted(&SortedPair::new(id, ood))
}

/// [`auroc`] on pre-sorted scores: one merge walk.
pub fn auroc_sorted(pair: &SortedPair) -> f64 {
    let id = pair.id();
    let ood = pair.ood();
    // For each OOD score, credit the ID scores strictly below it plus
    // half of the ties; both cursors advance monotonically.
    let mut below = 0usize;
    let mut below_or_tied = 0usize;
    let mut credit = 0.0f64;
    for &o in ood {
        while below < id.len() && id[below] < o {
            below += 1;
        }
        while below_or_tied < id.len() && id[below_or_tied] <= o {
            below_or_tied += 1;
        }
        credit += below as f64 + 0.5 * (below_or_tied - below) as f64;
    }
    credit / (id.len() as f64 * ood.len() as f64)
}

/// One sweep step of the PR construction per distinct score: cumulative
/// counts after the whole tied group is flagged positive. Walks the two
/// sorted sides in ranking order — descending score when OOD is positive,
/// ascending when ID is positive.
fn pr_sweep_points(pair: &SortedPair, positive: PrPositive) -> Vec<(f64, f64)> {
    let (pos, neg, descending) = match positive {
        PrPositive::Out => (pair.ood(), pair.id(), true),
        PrPositive::In => (pair.id(), pair.ood(), false),
    };
    let total_pos = pos.len() as f64;
    let mut points = Vec::new();
    let mut tp = 0usize;
    let mut flagged = 0usize;
    let mut i = 0;
    let mut j = 0;
    while i < pos.len() || j < neg.len() {
        // next value in ranking order, from whichever side leads
        let at = |s: &[f64], k: usize| {
            if descending {
                s[s.len() - 1 - k]
            } else {
                s[k]
            }
        };
        let v = match (i < pos.len(), j < neg.len()) {
            (true, true) => {
                let (p, n) = (at(pos, i), at(neg, j));
                if descending {
                    p.max(n)
                } else {
                    p.min(n)
                }
            }
            (true, false) => at(pos, i),
            (false, true) => at(neg, j),
            (false, false) => unreachable!(),
        };
        while i < pos.len() && at(pos, i) == v {
            i += 1;
            tp += 1;
            flagged += 1;
        }
        while j < neg.len() && at(neg, j) == v {
            j += 1;
            flagged += 1;
        }
        points.push((tp as f64 / total_pos, tp as f64 / flagged as f64));
    }
    points
}

/// Area under the precision-recall curve with the default trapezoidal rule.
pub fn aupr(id: &ScoreSet, ood: &ScoreSet, positive: PrPositive) -> f64 {
    aupr_with(id, ood, positive, PrInterpolation::Trapezoid)
}

/// Area under the precision-recall curve with an explicit interpolation.
pub fn aupr_with(
    id: &ScoreSet,
    ood: &ScoreSet,
    positive: PrPositive,
    interpolation: PrInterpolation,
) -> f64 {
    aupr_sorted(&SortedPair::new(id, ood), positive, interpolation)
}

/// [`aupr_with`] on pre-sorted scores.
pub fn aupr_sorted(
    pair: &SortedPair,
    positive: PrPositive,
    interpolation: PrInterpolation,
) -> f64 {
    let sweep = pr_sweep_points(pair, positive);
    match interpolation {
        PrInterpolation::Step => {
            // Average precision: sum of precision at each recall increment.
            let mut area = 0.0;
            let mut last_recall = 0.0;
            for &(recall, precision) in &sweep {
                area += (recall - last_recall) * precision;
                last_recall = recall;
            }
            area
        }
        PrInterpolation::Trapezoid => {
            // Anchor the curve at recall 0 with the first group's precision
            // so a perfect ranking integrates to exactly 1.
            let mut last = (0.0, sweep[0].1);
            let mut area = 0.0;
            for &(recall, precision) in &sweep {
                area += (recall - last.0) * (precision + last.1) / 2.0;
                last = (recall, precision);
            }
            area
        }
    }
}

/// ROC curve for export and plotting; `auroc` itself is rank-based and
/// does not go through this construction.
pub fn roc_curve(id: &ScoreSet, ood: &ScoreSet) -> RocCurve {
    let mut items: Vec<(f64, bool)> = ood
        .scores()
        .iter()
        .map(|&s| (s, true))
        .chain(id.scores().iter().map(|&s| (s, false)))
        .collect();
    items.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
    let n_pos = ood.len() as f64;
    let n_neg = id.len() as f64;

    let mut points = vec![(0.0, 0.0)];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < items.len() {
        let mut j = i + 1;
        while j < items.len() && items[j].0 == items[i].0 {
            j += 1;
        }
        tp += items[i..j].iter().filter(|(_, p)| *p).count();
        fp += items[i..j].iter().filter(|(_, p)| !*p).count();
        points.push((fp as f64 / n_neg, tp as f64 / n_pos));
        i = j;
    }
    RocCurve { points }
}

/// PR curve for export, anchored at recall 0.
pub fn pr_curve(id: &ScoreSet, ood: &ScoreSet, positive: PrPositive) -> PrCurve {
    let sweep = pr_sweep_points(&SortedPair::new(id, ood), positive);
    let mut points = vec![(0.0, sweep[0].1)];
    points.extend(sweep);
    PrCurve { points, positive }
}

/// Operating-point queries answered by [`rate_at_level`].
///
/// TPR and TNR follow the OOD-positive reading regardless of the report
/// convention: TPR is the fraction of OOD samples flagged OOD, TNR the
/// fraction of ID samples kept ID.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateQuery {
    /// Smallest FPR among thresholds with TPR >= level.
    FprAtTpr,
    /// Largest TNR among thresholds with TPR >= level.
    TnrAtTpr,
    /// Smallest FNR among thresholds with TNR >= level.
    FnrAtTnr,
}

impl RateQuery {
    fn name(self) -> &'static str {
        match self {
            RateQuery::FprAtTpr => "TPR",
            RateQuery::TnrAtTpr => "TPR",
            RateQuery::FnrAtTnr => "TNR",
        }
    }
}

/// A rate value together with the threshold realizing it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateAtLevel {
    pub value: f64,
    pub threshold: f64,
}

/// Best achievable rate subject to a level constraint, over the
/// unique-scores grid. Returns the most favorable realizable operating
/// point rather than interpolating between grid thresholds.
pub fn rate_at_level(
    id: &ScoreSet,
    ood: &ScoreSet,
    query: RateQuery,
    level: f64,
    rule: DecisionRule,
) -> Result<RateAtLevel> {
    let pair = SortedPair::new(id, ood);
    let grid = pair.union_grid();
    let curve = curve_on_grid(&pair, &grid, rule, Convention::OodPositive);
    rate_at_level_on(&curve, query, level)
}

/// [`rate_at_level`] evaluated on an existing OOD-positive curve, so one
/// union-grid sweep can answer several queries.
pub fn rate_at_level_on(
    curve: &ThresholdCurve,
    query: RateQuery,
    level: f64,
) -> Result<RateAtLevel> {
    let thresholds = curve.grid().thresholds();

    match query {
        RateQuery::FprAtTpr | RateQuery::TnrAtTpr => {
            // TPR = 1 - FNR is non-increasing in t, so the feasible set is a
            // prefix and the minimum FPR sits at its last element.
            let last_ok = (0..curve.len()).rev().find(|&i| 1.0 - curve.fnr()[i] >= level);
            let Some(i) = last_ok else {
                return Err(EvalError::ConstraintUnreachable {
                    query: query.name(),
                    level,
                });
            };
            let value = match query {
                RateQuery::FprAtTpr => curve.fpr()[i],
                _ => 1.0 - curve.fpr()[i],
            };
            Ok(RateAtLevel {
                value,
                threshold: thresholds[i],
            })
        }
        RateQuery::FnrAtTnr => {
            // TNR = 1 - FPR is non-decreasing in t: feasible set is a suffix
            // and the minimum FNR sits at its first element.
            let first_ok = (0..curve.len()).find(|&i| 1.0 - curve.fpr()[i] >= level);
            let Some(i) = first_ok else {
                return Err(EvalError::ConstraintUnreachable {
                    query: query.name(),
                    level,
                });
            };
            Ok(RateAtLevel {
                value: curve.fnr()[i],
                threshold: thresholds[i],
            })
        }
    }
}

/// Equal-prior detection error minimized over all thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionError {
    pub error: f64,
    pub threshold: f64,
}

/// `min_t (FPR(t) + FNR(t)) / 2` over the unique-scores grid, ties broken
/// toward the smallest threshold. The equal weighting assumes balanced
/// ID/OOD priors.
pub fn detection_error(id: &ScoreSet, ood: &ScoreSet, rule: DecisionRule) -> DetectionError {
    let pair = SortedPair::new(id, ood);
    let grid = pair.union_grid();
    detection_error_on(&curve_on_grid(&pair, &grid, rule, Convention::OodPositive))
}

/// [`detection_error`] evaluated on an existing OOD-positive curve.
pub fn detection_error_on(curve: &ThresholdCurve) -> DetectionError {
    let mut best = DetectionError {
        error: f64::INFINITY,
        threshold: 0.0,
    };
    for (i, &t) in curve.grid().thresholds().iter().enumerate() {
        let err = 0.5 * (curve.fpr()[i] + curve.fnr()[i]);
        if err < best.error {
            best = DetectionError {
                error: err,
                threshold: t,
            };
        }
    }
    best
}
