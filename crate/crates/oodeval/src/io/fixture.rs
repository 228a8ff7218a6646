//! Published reference values embedded for self-checks.
//!
//! Two blocks ship with the binary: metric rows for nine reference score
//! layouts (rank metrics plus their AUFPR/AUFNR/AUTC triples), and the
//! AUFPR/AUFNR/AUTC triples of two published detectors evaluated against
//! three OOD datasets. The `selftest` subcommand re-derives every AUTC
//! from its two areas and checks the combination identity; one detector
//! cell is known to disagree with its own areas and carries a note with
//! the recomputed value.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::autc::{AutcResult, Integration};

/// Reference metrics of one synthetic score layout (fractions).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRow {
    pub name: String,
    pub auroc: f64,
    pub aupr_in: f64,
    pub aupr_out: f64,
    pub fpr95: f64,
    pub fnr95: f64,
    pub aufpr: f64,
    pub aufnr: f64,
    pub autc: f64,
}

/// One detector/dataset cell with its area pair and AUTC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorRow {
    pub detector: String,
    pub dataset: String,
    pub aufpr: f64,
    pub aufnr: f64,
    /// AUTC as reported at the source.
    pub autc_reported: f64,
    /// AUTC the combination identity actually yields (differs from
    /// `autc_reported` only for the flagged inconsistent cell).
    pub autc_expected: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// The embedded reference tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValues {
    pub models: Vec<ModelRow>,
    pub detectors: Vec<DetectorRow>,
}

static FIXTURE: OnceLock<ReferenceValues> = OnceLock::new();

/// The parsed fixture; the JSON ships inside the binary.
pub fn reference_values() -> &'static ReferenceValues {
    FIXTURE.get_or_init(|| {
        serde_json::from_str(include_str!("reference_values.json"))
            .expect("embedded reference values parse")
    })
}

/// Model rows are rounded to four decimals; detector rows to two decimal
/// per-cent digits.
const MODEL_TOLERANCE: f64 = 5e-4;
const DETECTOR_TOLERANCE: f64 = 1e-4;

/// Outcome of one combination-identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfTestLine {
    pub label: String,
    pub expected_autc: f64,
    pub computed_autc: f64,
    pub delta: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Recomputes `autc = (aufpr + aufnr) / 2` for every fixture row.
pub fn run_selftest() -> Vec<SelfTestLine> {
    let fixture = reference_values();
    let mut lines = Vec::new();
    for row in &fixture.models {
        let computed = AutcResult::from_areas(row.aufpr, row.aufnr, 0.5, Integration::Trapezoid);
        let delta = (computed.autc - row.autc).abs();
        lines.push(SelfTestLine {
            label: row.name.clone(),
            expected_autc: row.autc,
            computed_autc: computed.autc,
            delta,
            tolerance: MODEL_TOLERANCE,
            pass: delta <= MODEL_TOLERANCE,
            note: None,
        });
    }
    for row in &fixture.detectors {
        let computed = AutcResult::from_areas(row.aufpr, row.aufnr, 0.5, Integration::Trapezoid);
        let delta = (computed.autc - row.autc_expected).abs();
        lines.push(SelfTestLine {
            label: format!("{}/{}", row.detector, row.dataset),
            expected_autc: row.autc_expected,
            computed_autc: computed.autc,
            delta,
            tolerance: DETECTOR_TOLERANCE,
            pass: delta <= DETECTOR_TOLERANCE,
            note: row.note.clone(),
        });
    }
    lines
}
