//! Threshold-aware evaluation of out-of-distribution (OOD) detectors.
//!
//! Given raw scalar scores from a detector — one set for in-distribution
//! (ID) data, one per OOD dataset — this crate computes:
//!
//! - the classic rank and operating-point metrics: AUROC, AUPR-in/out,
//!   FPR at 95% TPR, FNR at 95% TNR, and best-threshold detection error;
//! - threshold-curve metrics: the areas under the FPR-vs-threshold and
//!   FNR-vs-threshold curves (AUFPR, AUFNR) and their weighted mean AUTC,
//!   which penalizes poorly separated score distributions that rank-based
//!   metrics cannot see;
//! - a multi-dataset benchmark protocol that fixes one global decision
//!   threshold (from the ID scores or a validation OOD set, never from
//!   the test OOD data) and reports FPR/FNR under it across all datasets.
//!
//! Scores are unitless with "higher means more OOD"; threshold metrics
//! expect them in `[0, 1]` (see [`scores::ScoreSet::normalized`]).
//!
//! ```
//! use oodeval::{autc, auroc, Integration, Kind, ScoreSet};
//!
//! let id = ScoreSet::new("id", Kind::Id, vec![0.05, 0.1, 0.2]).unwrap();
//! let ood = ScoreSet::new("ood", Kind::Ood, vec![0.7, 0.85, 0.95]).unwrap();
//! assert_eq!(auroc(&id, &ood), 1.0);
//! let r = autc(&id, &ood, 0.5, Integration::ExactStep).unwrap();
//! assert!(r.autc < 0.2);
//! ```

pub mod autc;
pub mod classic;
pub mod error;
pub mod io;
pub mod protocol;
pub mod scores;
pub mod sweep;
pub mod synth;

pub use autc::{
    area_under_rate_curve, autc, autc_sorted, autc_with, crossing_threshold, AutcResult,
    CrossingPoint, Integration, RateKind,
};
pub use classic::{
    aupr, aupr_sorted, aupr_with, auroc, auroc_sorted, detection_error, detection_error_on,
    pr_curve, rate_at_level, rate_at_level_on, roc_curve, DetectionError, PrCurve,
    PrInterpolation, PrPositive, RateAtLevel, RateQuery, RocCurve,
};
pub use error::{EvalError, Result};
pub use protocol::{
    evaluate_pair, run_benchmark, select_threshold, BenchmarkReport, EvalSettings, MetricReport,
    ThresholdPolicy,
};
pub use scores::{Bounds, Convention, DecisionRule, Kind, ScoreSet};
pub use sweep::{
    confusion_at, curve_on_grid, threshold_curve, ConfusionCounts, GridOrigin, SortedPair,
    ThresholdCurve, ThresholdGrid,
};
pub use synth::{preset_pair, preset_pair_by_name, sample_scores, Preset, SynthSpec};
