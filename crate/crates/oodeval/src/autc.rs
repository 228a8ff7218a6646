//! Threshold-curve metrics: AUFPR, AUFNR, their weighted combination AUTC,
//! and the crossing-point threshold.
//!
//! The AUTC integrates the FPR-vs-threshold and FNR-vs-threshold curves
//! over `[0, 1]` and averages the two areas (weighted, default 1/2 each).
//! Lower is better: 0 for a detector putting all ID scores at 0 and all
//! OOD scores at 1, 0.5 for identical score distributions, 1 for the
//! fully anti-separated detector. Unlike rank-based metrics it rewards
//! *separation* between the score masses, not just their ordering, which
//! also makes it sensitive to monotone transformations of the scores.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scores::{Convention, DecisionRule, ScoreSet};
use crate::sweep::{curve_on_grid, SortedPair, ThresholdCurve};

/// Quadrature rule for the rate-curve areas.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integration {
    /// `sum 0.5 (y_i + y_{i+1}) (t_{i+1} - t_i)`; the conventional choice,
    /// but carries a bias of up to half the largest grid gap on step
    /// functions.
    #[default]
    Trapezoid,
    /// Left-rectangle sum `sum y_i (t_{i+1} - t_i)`. On a unique-scores
    /// grid under the strict comparator the empirical rates are constant
    /// on right-open intervals, so this sum is the exact integral.
    ExactStep,
}

/// Which rate column of a [`ThresholdCurve`] to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateKind {
    Fpr,
    Fnr,
}

/// Area under one rate curve over the threshold axis.
pub fn area_under_rate_curve(
    curve: &ThresholdCurve,
    which: RateKind,
    integration: Integration,
) -> f64 {
    let y = match which {
        RateKind::Fpr => curve.fpr(),
        RateKind::Fnr => curve.fnr(),
    };
    let t = curve.grid().thresholds();
    let mut area = 0.0;
    match integration {
        Integration::Trapezoid => {
            for i in 0..t.len() - 1 {
                area += 0.5 * (y[i] + y[i + 1]) * (t[i + 1] - t[i]);
            }
        }
        Integration::ExactStep => {
            for i in 0..t.len() - 1 {
                area += y[i] * (t[i + 1] - t[i]);
            }
        }
    }
    area
}

/// The two areas and their weighted combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AutcResult {
    pub aufpr: f64,
    pub aufnr: f64,
    pub autc: f64,
    pub weight_fpr: f64,
    pub integration: Integration,
}

impl AutcResult {
    /// Combines precomputed areas: `autc = w * aufpr + (1 - w) * aufnr`.
    pub fn from_areas(aufpr: f64, aufnr: f64, weight_fpr: f64, integration: Integration) -> Self {
        AutcResult {
            aufpr,
            aufnr,
            autc: weight_fpr * aufpr + (1.0 - weight_fpr) * aufnr,
            weight_fpr,
            integration,
        }
    }
}

/// AUTC of one ID-vs-OOD pair under the default convention and rule.
///
/// Scores must already lie in `[0, 1]`; out-of-range scores error rather
/// than being silently clipped, since that usually means the caller
/// forgot to normalize.
pub fn autc(
    id: &ScoreSet,
    ood: &ScoreSet,
    weight_fpr: f64,
    integration: Integration,
) -> Result<AutcResult> {
    autc_with(
        id,
        ood,
        weight_fpr,
        integration,
        DecisionRule::default(),
        Convention::default(),
    )
}

/// AUTC with explicit rule and convention.
///
/// Each area is integrated on the unique-scores grid of the set driving
/// that rate (the FPR curve only jumps at scores of the negative class,
/// the FNR curve at scores of the positive class). This keeps the AUFPR
/// bit-identical across OOD datasets sharing the same ID set — which a
/// union grid would break under trapezoidal integration, because extra
/// abscissae from the other set shift the trapezoids around each jump.
pub fn autc_with(
    id: &ScoreSet,
    ood: &ScoreSet,
    weight_fpr: f64,
    integration: Integration,
    rule: DecisionRule,
    convention: Convention,
) -> Result<AutcResult> {
    id.require_unit_interval()?;
    ood.require_unit_interval()?;
    Ok(autc_sorted(
        &SortedPair::new(id, ood),
        weight_fpr,
        integration,
        rule,
        convention,
    ))
}

/// [`autc_with`] on pre-sorted scores. The caller vouches that both sides
/// lie in `[0, 1]`.
pub fn autc_sorted(
    pair: &SortedPair,
    weight_fpr: f64,
    integration: Integration,
    rule: DecisionRule,
    convention: Convention,
) -> AutcResult {
    let (fpr_grid, fnr_grid) = match convention {
        Convention::OodPositive => (pair.id_grid(), pair.ood_grid()),
        Convention::IdPositive => (pair.ood_grid(), pair.id_grid()),
    };
    let fpr_curve = curve_on_grid(pair, &fpr_grid, rule, convention);
    let fnr_curve = curve_on_grid(pair, &fnr_grid, rule, convention);
    let aufpr = area_under_rate_curve(&fpr_curve, RateKind::Fpr, integration);
    let aufnr = area_under_rate_curve(&fnr_curve, RateKind::Fnr, integration);
    AutcResult::from_areas(aufpr, aufnr, weight_fpr, integration)
}

/// The grid threshold where FPR and FNR come closest to crossing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub fnr: f64,
}

/// Minimizes `|FPR(t) - FNR(t)|` over the curve's grid.
///
/// Empirical rate curves are staircases, so an exact crossing rarely
/// exists; ties are broken by the smaller `max(FPR, FNR)`, then by the
/// smaller threshold.
pub fn crossing_threshold(curve: &ThresholdCurve) -> CrossingPoint {
    let t = curve.grid().thresholds();
    let mut best = CrossingPoint {
        threshold: t[0],
        fpr: curve.fpr()[0],
        fnr: curve.fnr()[0],
    };
    let key = |p: &CrossingPoint| ((p.fpr - p.fnr).abs(), p.fpr.max(p.fnr));
    for (i, &threshold) in t.iter().enumerate().skip(1) {
        let cand = CrossingPoint {
            threshold,
            fpr: curve.fpr()[i],
            fnr: curve.fnr()[i],
        };
        let (d, m) = key(&cand);
        let (bd, bm) = key(&best);
        if d < bd || (d == bd && m < bm) {
            best = cand;
        }
    }
    best
}
