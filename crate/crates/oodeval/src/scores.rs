//! Score containers, validation, and the conventions shared by every metric.
//!
//! A [`ScoreSet`] holds the raw detector scores of a single source (the
//! in-distribution test split, or one OOD dataset). Scores are kept in
//! input order and are immutable after construction, so sets can be shared
//! freely across threads.

use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};

/// Which source a score set was collected from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// In-distribution samples.
    Id,
    /// Out-of-distribution samples.
    Ood,
}

/// Which class counts as positive when forming confusion counts.
///
/// Published results disagree on this choice, and it silently changes the
/// meaning of FPR- and precision-based metrics, so it is recorded in every
/// report. The default treats OOD samples as positive.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    #[default]
    OodPositive,
    IdPositive,
}

/// Comparator deciding when a score is flagged positive.
///
/// Under [`Convention::OodPositive`], a sample is flagged OOD iff
/// `score > t` (strict, the default) or `score >= t`. The choice only
/// matters when scores tie with the threshold exactly; it is fixed per
/// evaluation run and recorded in every report.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionRule {
    #[default]
    StrictGreater,
    GreaterOrEqual,
}

impl DecisionRule {
    /// True iff a score is flagged positive at threshold `t`
    /// (under the OOD-positive convention).
    #[inline]
    pub fn flags(self, score: f64, t: f64) -> bool {
        match self {
            DecisionRule::StrictGreater => score > t,
            DecisionRule::GreaterOrEqual => score >= t,
        }
    }
}

/// Validated normalization bounds with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lo: f64,
    hi: f64,
}

impl Bounds {
    /// Returns [`EvalError::DegenerateBounds`] unless `lo < hi` (both finite).
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(EvalError::DegenerateBounds { lo, hi });
        }
        Ok(Bounds { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

/// A named, validated collection of scalar detector scores from one source.
///
/// Invariants enforced at construction: non-empty, every score finite.
/// Threshold-based metrics additionally require scores in `[0, 1]`; use
/// [`ScoreSet::normalized`] to map arbitrary-range scores into that domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet {
    name: String,
    kind: Kind,
    scores: Vec<f64>,
}

impl ScoreSet {
    /// Validates and wraps raw scores, preserving input order.
    pub fn new(name: impl Into<String>, kind: Kind, scores: Vec<f64>) -> Result<Self> {
        if scores.is_empty() {
            return Err(EvalError::EmptyInput);
        }
        if let Some(index) = scores.iter().position(|s| !s.is_finite()) {
            return Err(EvalError::NonFiniteScore { index });
        }
        Ok(ScoreSet {
            name: name.into(),
            kind,
            scores,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    /// Always false; emptiness is rejected at construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mean(&self) -> f64 {
        self.scores.iter().sum::<f64>() / self.scores.len() as f64
    }

    /// Affine map `(x - lo) / (hi - lo)` clipped to `[0, 1]`.
    ///
    /// The map is monotone non-decreasing, so pairwise order among
    /// non-clipped values is preserved. Bounds must come from the caller
    /// (or be fitted on ID/validation scores only); fitting them on the
    /// evaluated OOD set leaks test information into the metric.
    pub fn normalized(&self, bounds: Bounds) -> ScoreSet {
        let span = bounds.hi - bounds.lo;
        let scores = self
            .scores
            .iter()
            .map(|&x| ((x - bounds.lo) / span).clamp(0.0, 1.0))
            .collect();
        ScoreSet {
            name: self.name.clone(),
            kind: self.kind,
            scores,
        }
    }

    /// Errors with [`EvalError::ScoresOutOfRange`] if any score falls
    /// outside `[0, 1]`.
    pub fn require_unit_interval(&self) -> Result<()> {
        for (index, &value) in self.scores.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(EvalError::ScoresOutOfRange { index, value });
            }
        }
        Ok(())
    }

    /// Scores sorted ascending under the total order on finite floats.
    pub(crate) fn sorted_scores(&self) -> Vec<f64> {
        let mut v = self.scores.clone();
        v.sort_unstable_by(f64::total_cmp);
        v
    }
}
