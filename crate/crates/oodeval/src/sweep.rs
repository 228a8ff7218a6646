//! Threshold grids and the shared sweep kernel.
//!
//! Everything threshold-shaped funnels through here: a [`ThresholdGrid`]
//! fixes the integration abscissae, and [`threshold_curve`] evaluates the
//! false-positive and false-negative rates at every grid point with one
//! sort per score set plus a binary search per threshold, instead of
//! re-counting both sets at each threshold.

use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};
use crate::scores::{Convention, DecisionRule, ScoreSet};

/// How a grid was constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridOrigin {
    /// Sorted unique score values, with 0 and 1 added when absent.
    /// Captures every jump location of the empirical rate curves.
    UniqueScores,
    /// `n` equally spaced points including both endpoints (`n >= 2`).
    /// Intended for plotting and dense-grid convergence checks.
    Uniform(usize),
}

/// Strictly increasing thresholds in `[0, 1]`, starting at 0 and ending at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdGrid {
    thresholds: Vec<f64>,
    origin: GridOrigin,
}

impl ThresholdGrid {
    /// Grid over the union of both sets' unique scores, or a uniform grid.
    pub fn from_pair(id: &ScoreSet, ood: &ScoreSet, origin: GridOrigin) -> ThresholdGrid {
        match origin {
            GridOrigin::UniqueScores => SortedPair::new(id, ood).union_grid(),
            GridOrigin::Uniform(n) => Self::uniform(n),
        }
    }

    /// Unique-scores grid over a single set. The FPR curve only jumps at
    /// ID scores and the FNR curve only at OOD scores, so integrating each
    /// rate on its own set's grid loses nothing.
    pub fn from_single(set: &ScoreSet) -> ThresholdGrid {
        let mut t = set.scores().to_vec();
        Self::unique_from_values(&mut t)
    }

    /// `n` equally spaced thresholds including 0 and 1.
    ///
    /// # Panics
    ///
    /// Panics if `n < 2`.
    pub fn uniform(n: usize) -> ThresholdGrid {
        assert!(n >= 2, "uniform grid needs at least the endpoints 0 and 1");
        let thresholds = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        ThresholdGrid {
            thresholds,
            origin: GridOrigin::Uniform(n),
        }
    }

    /// Validates an explicit threshold list (strictly increasing, within
    /// `[0, 1]`, first element 0, last element 1).
    pub fn from_thresholds(thresholds: Vec<f64>) -> Result<ThresholdGrid> {
        if thresholds.len() < 2 || thresholds[0] != 0.0 || *thresholds.last().unwrap() != 1.0 {
            return Err(EvalError::InvalidArgument {
                reason: "grid must start at 0 and end at 1".into(),
            });
        }
        for w in thresholds.windows(2) {
            // partial_cmp keeps a NaN in the middle from slipping through
            if w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less) {
                return Err(EvalError::InvalidArgument {
                    reason: format!("grid not strictly increasing at {} -> {}", w[0], w[1]),
                });
            }
        }
        Ok(ThresholdGrid {
            thresholds,
            origin: GridOrigin::UniqueScores,
        })
    }

    fn unique_from_values(values: &mut Vec<f64>) -> ThresholdGrid {
        values.sort_unstable_by(f64::total_cmp);
        let sorted = std::mem::take(values);
        Self::unique_from_sorted(sorted.iter().copied())
    }

    /// Builds the unique grid from an already ascending-sorted stream.
    fn unique_from_sorted(sorted: impl Iterator<Item = f64>) -> ThresholdGrid {
        let mut thresholds = Vec::new();
        for v in sorted {
            // Scores may lie outside [0,1] when callers skip
            // normalization; grids always stay inside the unit interval.
            if !(0.0..=1.0).contains(&v) {
                continue;
            }
            if thresholds.last() != Some(&v) {
                thresholds.push(v);
            }
        }
        if thresholds.first() != Some(&0.0) {
            thresholds.insert(0, 0.0);
        }
        if thresholds.last() != Some(&1.0) {
            thresholds.push(1.0);
        }
        ThresholdGrid {
            thresholds,
            origin: GridOrigin::UniqueScores,
        }
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn origin(&self) -> GridOrigin {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest spacing between consecutive thresholds.
    pub fn max_gap(&self) -> f64 {
        self.thresholds
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

/// Raw confusion counts at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub true_positives: usize,
    pub false_positives: usize,
    pub true_negatives: usize,
    pub false_negatives: usize,
}

impl ConfusionCounts {
    /// `fp / (fp + tn)`. The negative class is never empty because score
    /// sets are non-empty by construction.
    pub fn fpr(&self) -> f64 {
        self.false_positives as f64 / (self.false_positives + self.true_negatives) as f64
    }

    /// `fn / (fn + tp)`.
    pub fn fnr(&self) -> f64 {
        self.false_negatives as f64 / (self.false_negatives + self.true_positives) as f64
    }
}

/// Number of scores flagged positive at `t` in an ascending-sorted slice.
#[inline]
fn count_flagged(sorted: &[f64], t: f64, rule: DecisionRule) -> usize {
    match rule {
        // #{s > t} = len - upper_bound(t)
        DecisionRule::StrictGreater => sorted.len() - sorted.partition_point(|&s| s <= t),
        // #{s >= t} = len - lower_bound(t)
        DecisionRule::GreaterOrEqual => sorted.len() - sorted.partition_point(|&s| s < t),
    }
}

/// Cursor yielding the flagged-positive count at each ascending threshold
/// of a merge walk over sorted scores.
struct FlaggedWalk<'a> {
    sorted: &'a [f64],
    kept: usize,
    rule: DecisionRule,
}

impl<'a> FlaggedWalk<'a> {
    fn new(sorted: &'a [f64], rule: DecisionRule) -> Self {
        FlaggedWalk {
            sorted,
            kept: 0,
            rule,
        }
    }

    /// Thresholds must be queried in ascending order.
    #[inline]
    fn flagged_at(&mut self, t: f64) -> usize {
        match self.rule {
            DecisionRule::StrictGreater => {
                while self.kept < self.sorted.len() && self.sorted[self.kept] <= t {
                    self.kept += 1;
                }
            }
            DecisionRule::GreaterOrEqual => {
                while self.kept < self.sorted.len() && self.sorted[self.kept] < t {
                    self.kept += 1;
                }
            }
        }
        self.sorted.len() - self.kept
    }
}

/// One ID-vs-OOD pair with each side sorted ascending once, shared by all
/// sweep-based metrics so large inputs are not re-sorted per metric.
#[derive(Debug, Clone)]
pub struct SortedPair {
    id: Vec<f64>,
    ood: Vec<f64>,
}

impl SortedPair {
    pub fn new(id: &ScoreSet, ood: &ScoreSet) -> SortedPair {
        SortedPair {
            id: id.sorted_scores(),
            ood: ood.sorted_scores(),
        }
    }

    /// ID scores, ascending.
    pub fn id(&self) -> &[f64] {
        &self.id
    }

    /// OOD scores, ascending.
    pub fn ood(&self) -> &[f64] {
        &self.ood
    }

    /// Unique-scores grid over the union of both sides (merge, no sort).
    pub fn union_grid(&self) -> ThresholdGrid {
        let (a, b) = (self.id.as_slice(), self.ood.as_slice());
        let mut thresholds: Vec<f64> = Vec::with_capacity(a.len() + b.len() + 2);
        let mut push_unique = |v: f64, out: &mut Vec<f64>| {
            if (0.0..=1.0).contains(&v) && out.last() != Some(&v) {
                out.push(v);
            }
        };
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = i < a.len() && (j >= b.len() || a[i].total_cmp(&b[j]).is_le());
            let v = if take_a {
                i += 1;
                a[i - 1]
            } else {
                j += 1;
                b[j - 1]
            };
            push_unique(v, &mut thresholds);
        }
        if thresholds.first() != Some(&0.0) {
            thresholds.insert(0, 0.0);
        }
        if thresholds.last() != Some(&1.0) {
            thresholds.push(1.0);
        }
        ThresholdGrid {
            thresholds,
            origin: GridOrigin::UniqueScores,
        }
    }

    /// Unique-scores grid of the ID side only.
    pub fn id_grid(&self) -> ThresholdGrid {
        ThresholdGrid::unique_from_sorted(self.id.iter().copied())
    }

    /// Unique-scores grid of the OOD side only.
    pub fn ood_grid(&self) -> ThresholdGrid {
        ThresholdGrid::unique_from_sorted(self.ood.iter().copied())
    }

    /// Confusion counts at one threshold, by binary search.
    pub fn confusion_at(
        &self,
        t: f64,
        rule: DecisionRule,
        convention: Convention,
    ) -> ConfusionCounts {
        counts_from_flagged(
            count_flagged(&self.id, t, rule),
            self.id.len(),
            count_flagged(&self.ood, t, rule),
            self.ood.len(),
            convention,
        )
    }
}

fn counts_from_flagged(
    id_flagged: usize,
    n_id: usize,
    ood_flagged: usize,
    n_ood: usize,
    convention: Convention,
) -> ConfusionCounts {
    match convention {
        // Positive = OOD, flagged by the comparator.
        Convention::OodPositive => ConfusionCounts {
            true_positives: ood_flagged,
            false_negatives: n_ood - ood_flagged,
            false_positives: id_flagged,
            true_negatives: n_id - id_flagged,
        },
        // Positive = ID, flagged by the comparator's complement.
        Convention::IdPositive => ConfusionCounts {
            true_positives: n_id - id_flagged,
            false_negatives: id_flagged,
            false_positives: n_ood - ood_flagged,
            true_negatives: ood_flagged,
        },
    }
}

/// Confusion counts of one ID-vs-OOD pair at a single threshold.
pub fn confusion_at(
    id: &ScoreSet,
    ood: &ScoreSet,
    t: f64,
    rule: DecisionRule,
    convention: Convention,
) -> ConfusionCounts {
    let id_flagged = id.scores().iter().filter(|&&s| rule.flags(s, t)).count();
    let ood_flagged = ood.scores().iter().filter(|&&s| rule.flags(s, t)).count();
    counts_from_flagged(id_flagged, id.len(), ood_flagged, ood.len(), convention)
}

/// FPR and FNR sampled over a threshold grid.
///
/// Under the default convention and rule, `fpr` is non-increasing and
/// `fnr` non-decreasing in the threshold; under [`Convention::IdPositive`]
/// the two columns swap roles.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCurve {
    grid: ThresholdGrid,
    fpr: Vec<f64>,
    fnr: Vec<f64>,
    convention: Convention,
    rule: DecisionRule,
}

impl ThresholdCurve {
    pub fn grid(&self) -> &ThresholdGrid {
        &self.grid
    }

    pub fn fpr(&self) -> &[f64] {
        &self.fpr
    }

    pub fn fnr(&self) -> &[f64] {
        &self.fnr
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn rule(&self) -> DecisionRule {
        self.rule
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Sweeps the grid and evaluates both rates at every threshold.
///
/// Sorts each score set once: `O((n + m) log(n + m) + g)` total. Callers
/// computing several curves of one pair should sort once via
/// [`SortedPair`] and use [`curve_on_grid`].
pub fn threshold_curve(
    id: &ScoreSet,
    ood: &ScoreSet,
    grid: &ThresholdGrid,
    rule: DecisionRule,
    convention: Convention,
) -> ThresholdCurve {
    curve_on_grid(&SortedPair::new(id, ood), grid, rule, convention)
}

/// [`threshold_curve`] on pre-sorted scores; one fused merge walk per side.
pub fn curve_on_grid(
    pair: &SortedPair,
    grid: &ThresholdGrid,
    rule: DecisionRule,
    convention: Convention,
) -> ThresholdCurve {
    let mut id_walk = FlaggedWalk::new(&pair.id, rule);
    let mut ood_walk = FlaggedWalk::new(&pair.ood, rule);
    let mut fpr = Vec::with_capacity(grid.len());
    let mut fnr = Vec::with_capacity(grid.len());
    for &t in grid.thresholds() {
        let counts = counts_from_flagged(
            id_walk.flagged_at(t),
            pair.id.len(),
            ood_walk.flagged_at(t),
            pair.ood.len(),
            convention,
        );
        fpr.push(counts.fpr());
        fnr.push(counts.fnr());
    }
    ThresholdCurve {
        grid: grid.clone(),
        fpr,
        fnr,
        convention,
        rule,
    }
}
