//! C ABI over the oodeval metrics library.
//!
//! Score sets are opaque handles created from raw double arrays; every
//! function returns an [`OodevalStatus`] code and writes results through
//! out-pointers. A thread-local message for the most recent error is
//! available via [`oodeval_last_error_message`]. The header is generated
//! into `include/oodeval.h` at build time.

#![deny(unsafe_op_in_unsafe_fn)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use oodeval::io::render_metric_report;
use oodeval::protocol::{evaluate_pair, EvalSettings};
use oodeval::scores::{Bounds, Kind, ScoreSet};
use oodeval::synth::preset_pair_by_name;
use oodeval::{
    autc, crossing_threshold, detection_error, rate_at_level, sample_scores, threshold_curve,
    Convention, DecisionRule, EvalError, GridOrigin, Integration, PrPositive, RateQuery,
    ThresholdGrid,
};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OodevalStatus {
    Ok = 0,
    NullPointer = 1,
    EmptyInput = 2,
    NonFiniteScore = 3,
    DegenerateBounds = 4,
    ScoresOutOfRange = 5,
    ConstraintUnreachable = 6,
    MissingDataset = 7,
    UnknownPreset = 8,
    ParseError = 9,
    IoError = 10,
    InvalidArgument = 11,
    Panic = 12,
}

/// Integration mode for the AUTC areas.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OodevalIntegration {
    Trapezoid = 0,
    ExactStep = 1,
}

impl From<OodevalIntegration> for Integration {
    fn from(v: OodevalIntegration) -> Self {
        match v {
            OodevalIntegration::Trapezoid => Integration::Trapezoid,
            OodevalIntegration::ExactStep => Integration::ExactStep,
        }
    }
}

/// Operating-point query for `oodeval_rate_at_level`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OodevalRateQuery {
    FprAtTpr = 0,
    TnrAtTpr = 1,
    FnrAtTnr = 2,
}

impl From<OodevalRateQuery> for RateQuery {
    fn from(v: OodevalRateQuery) -> Self {
        match v {
            OodevalRateQuery::FprAtTpr => RateQuery::FprAtTpr,
            OodevalRateQuery::TnrAtTpr => RateQuery::TnrAtTpr,
            OodevalRateQuery::FnrAtTnr => RateQuery::FnrAtTnr,
        }
    }
}

/// AUFPR, AUFNR and their weighted combination.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OodevalAutcResult {
    pub aufpr: f64,
    pub aufnr: f64,
    pub autc: f64,
}

/// Crossing point of the FPR and FNR curves.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OodevalCrossing {
    pub threshold: f64,
    pub fpr: f64,
    pub fnr: f64,
}

/// Opaque score-set handle.
pub struct OodevalScoreSet {
    inner: ScoreSet,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &EvalError) -> OodevalStatus {
    match err {
        EvalError::EmptyInput => OodevalStatus::EmptyInput,
        EvalError::NonFiniteScore { .. } => OodevalStatus::NonFiniteScore,
        EvalError::DegenerateBounds { .. } => OodevalStatus::DegenerateBounds,
        EvalError::ScoresOutOfRange { .. } => OodevalStatus::ScoresOutOfRange,
        EvalError::ConstraintUnreachable { .. } => OodevalStatus::ConstraintUnreachable,
        EvalError::MissingDataset { .. } => OodevalStatus::MissingDataset,
        EvalError::UnknownPreset { .. } => OodevalStatus::UnknownPreset,
        EvalError::InvalidArgument { .. } => OodevalStatus::InvalidArgument,
        EvalError::Parse { .. } => OodevalStatus::ParseError,
        EvalError::Io(_) => OodevalStatus::IoError,
    }
}

fn fail(err: EvalError) -> OodevalStatus {
    let status = status_of(&err);
    set_last_error(err.to_string());
    status
}

/// Runs a closure, translating panics into a status instead of unwinding
/// across the FFI boundary.
fn guarded(f: impl FnOnce() -> OodevalStatus) -> OodevalStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic".into());
            OodevalStatus::Panic
        }
    }
}

/// Message for the most recent error on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn oodeval_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |c| c.as_ptr())
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn oodeval_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Creates a score set from `len` doubles. `name` may be null.
///
/// # Safety
///
/// `scores` must point to `len` readable doubles, `name` must be null or
/// a NUL-terminated string, and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oodeval_scoreset_new(
    scores: *const f64,
    len: usize,
    name: *const c_char,
    is_ood: bool,
    out: *mut *mut OodevalScoreSet,
) -> OodevalStatus {
    if scores.is_null() || out.is_null() {
        set_last_error("null pointer".into());
        return OodevalStatus::NullPointer;
    }
    let values = unsafe { slice::from_raw_parts(scores, len) }.to_vec();
    let name = if name.is_null() {
        String::from("scores")
    } else {
        unsafe { CStr::from_ptr(name) }.to_string_lossy().into_owned()
    };
    guarded(|| {
        let kind = if is_ood { Kind::Ood } else { Kind::Id };
        match ScoreSet::new(name, kind, values) {
            Ok(set) => {
                unsafe { *out = Box::into_raw(Box::new(OodevalScoreSet { inner: set })) };
                OodevalStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Frees a score set. Null is a no-op.
///
/// # Safety
///
/// `set` must be null or a pointer obtained from this library that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn oodeval_scoreset_free(set: *mut OodevalScoreSet) {
    if !set.is_null() {
        drop(unsafe { Box::from_raw(set) });
    }
}

/// Number of scores in a set.
///
/// # Safety
///
/// `set` must be a live score-set pointer.
#[no_mangle]
pub unsafe extern "C" fn oodeval_scoreset_len(set: *const OodevalScoreSet) -> usize {
    if set.is_null() {
        return 0;
    }
    unsafe { &*set }.inner.len()
}

/// Affine-maps scores into `[0, 1]` with clipping; writes a new handle.
///
/// # Safety
///
/// `set` must be a live score-set pointer and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oodeval_scoreset_normalized(
    set: *const OodevalScoreSet,
    lo: f64,
    hi: f64,
    out: *mut *mut OodevalScoreSet,
) -> OodevalStatus {
    if set.is_null() || out.is_null() {
        set_last_error("null pointer".into());
        return OodevalStatus::NullPointer;
    }
    let set = unsafe { &*set };
    guarded(|| match Bounds::new(lo, hi) {
        Ok(bounds) => {
            let normalized = set.inner.normalized(bounds);
            unsafe {
                *out = Box::into_raw(Box::new(OodevalScoreSet { inner: normalized }));
            }
            OodevalStatus::Ok
        }
        Err(e) => fail(e),
    })
}

unsafe fn pair<'a>(
    id: *const OodevalScoreSet,
    ood: *const OodevalScoreSet,
) -> Option<(&'a ScoreSet, &'a ScoreSet)> {
    if id.is_null() || ood.is_null() {
        set_last_error("null pointer".into());
        return None;
    }
    Some(unsafe { (&(*id).inner, &(*ood).inner) })
}

/// Rank statistic: probability that an OOD score outranks an ID score.
///
/// # Safety
///
/// `id` and `ood` must be live score-set pointers, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oodeval_auroc(
    id: *const OodevalScoreSet,
    ood: *const OodevalScoreSet,
    out: *mut f64,
) -> OodevalStatus {
    let Some((id, ood)) = (unsafe { pair(id, ood) }) else {
        return OodevalStatus::NullPointer;
    };
    if out.is_null() {
        set_last_error("null pointer".into());
        return OodevalStatus::NullPointer;
    }
    guarded(|| {
        unsafe { *out = oodeval::auroc(id, ood) };
        OodevalStatus::Ok
    })
}

/// Area under the precision-recall curve (trapezoidal).
///
/// # Safety
///
/// `id` and `ood` must be live score-set pointers, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oodeval_aupr(
    id: *const OodevalScoreSet,
    ood: *const OodevalScoreSet,
    ood_positive: bool,
    out: *mut f64,
) -> OodevalStatus {
    let Some((id, ood)) = (unsafe { pair(id, ood) }) else {
        return OodevalStatus::NullPointer;
    };
    if out.is_null() {
        set_last_error("null pointer".into());
        return OodevalStatus::NullPointer;
    }
    guarded(|| {
        let positive = if ood_positive {
            PrPositive::Out
        } else {
            PrPositive::In
        };
        unsafe { *out = oodeval::aupr(id, ood, positive) };
        OodevalStatus::Ok
    })
}

/// AUFPR, AUFNR and weighted AUTC. Scores must lie in `[0, 1]`.
///
/// # Safety
///
/// `id` and `ood` must be live score-set pointers, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oodeval_autc(
    id: *const OodevalScoreSet,
    ood: *const OodevalScoreSet,
    weight_fpr: f64,
    integration: OodevalIntegration,
    out: *mut OodevalAutcResult,
) -> OodevalStatus {
    let Some((id, ood)) = (unsafe { pair(id, ood) }) else {
        return OodevalStatus::NullPointer;
    };
    if out.is_null() {
        set_last_error("null pointer".into());
        return OodevalStatus::NullPointer;
    }
    guarded(|| match autc(id, ood, weight_fpr, integration.into()) {
        Ok(r) => {
            unsafe {
                *out = OodevalAutcResult {
                    aufpr: r.aufpr,
                    aufnr: r.aufnr,
                    autc: r.autc,
                };
            }
            OodevalStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// Best equal-prior detection error and its threshold.
///
/// # Safety
///
/// `id` and `ood` must be live score-set pointers; `error_out` and
/// `threshold_out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn oodeval_detection_error(
    id: *const OodevalScoreSet,
    ood: *const OodevalScoreSet,
    error_out: *mut f64,
    threshold_out: *mut f64,
) -> OodevalStatus {
    let Some((id, ood)) = (unsafe { pair(id, ood) }) else {
        return OodevalStatus::NullPointer;
    };
    if error_out.is_null() || threshold_out.is_null() {
        set_last_error("null pointer".into());
        return OodevalStatus::NullPointer;
    }
    guarded(|| {
        let r = detection_error(id, ood, DecisionRule::StrictGreater);
        unsafe {
            *error_out = r.error;
            *threshold_out = r.threshold;
        }
        OodevalStatus::Ok
    })
}

/// Best rate subject to `query >= level`, plus the realizing threshold.
///
/// # Safety
///
/// `id` and `ood` must be live score-set pointers; `value_out` and
/// `threshold_out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn oodeval_rate_at_level(
    id: *const OodevalScoreSet,
    ood: *const OodevalScoreSet,
    query: OodevalRateQuery,
    level: f64,
    value_out: *mut f64,
    threshold_out: *mut f64,
) -> OodevalStatus {
    let Some((id, ood)) = (unsafe { pair(id, ood) }) else {
        return OodevalStatus::NullPointer;
    };
    if value_out.is_null() || threshold_out.is_null() {
        set_last_error("null pointer".into());
        return OodevalStatus::NullPointer;
    }
    guarded(
        || match rate_at_level(id, ood, query.into(), level, DecisionRule::StrictGreater) {
            Ok(r) => {
                unsafe {
                    *value_out = r.value;
                    *threshold_out = r.threshold;
                }
                OodevalStatus::Ok
            }
            Err(e) => fail(e),
        },
    )
}

/// Crossing point of the FPR/FNR curves on the unique-scores grid.
///
/// # Safety
///
/// `id` and `ood` must be live score-set pointers, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oodeval_crossing_threshold(
    id: *const OodevalScoreSet,
    ood: *const OodevalScoreSet,
    out: *mut OodevalCrossing,
) -> OodevalStatus {
    let Some((id, ood)) = (unsafe { pair(id, ood) }) else {
        return OodevalStatus::NullPointer;
    };
    if out.is_null() {
        set_last_error("null pointer".into());
        return OodevalStatus::NullPointer;
    }
    guarded(|| {
        let grid = ThresholdGrid::from_pair(id, ood, GridOrigin::UniqueScores);
        let curve = threshold_curve(
            id,
            ood,
            &grid,
            DecisionRule::StrictGreater,
            Convention::OodPositive,
        );
        let p = crossing_threshold(&curve);
        unsafe {
            *out = OodevalCrossing {
                threshold: p.threshold,
                fpr: p.fpr,
                fnr: p.fnr,
            };
        }
        OodevalStatus::Ok
    })
}

/// Full metric report of one pair as a JSON string; free the string with
/// [`oodeval_string_free`]. Default convention and rule, no thresholds.
///
/// # Safety
///
/// `id` and `ood` must be live score-set pointers, `json_out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn oodeval_evaluate_pair_json(
    id: *const OodevalScoreSet,
    ood: *const OodevalScoreSet,
    weight_fpr: f64,
    integration: OodevalIntegration,
    json_out: *mut *mut c_char,
) -> OodevalStatus {
    let Some((id, ood)) = (unsafe { pair(id, ood) }) else {
        return OodevalStatus::NullPointer;
    };
    if json_out.is_null() {
        set_last_error("null pointer".into());
        return OodevalStatus::NullPointer;
    }
    guarded(|| {
        let settings = EvalSettings {
            weight_fpr,
            integration: integration.into(),
            ..EvalSettings::default()
        };
        match evaluate_pair(id, ood, &[], &settings) {
            Ok(report) => {
                let json =
                    render_metric_report(&report, oodeval::io::ReportFormat::Json);
                match CString::new(json) {
                    Ok(c) => {
                        unsafe { *json_out = c.into_raw() };
                        OodevalStatus::Ok
                    }
                    Err(_) => {
                        set_last_error("report contained an interior NUL".into());
                        OodevalStatus::InvalidArgument
                    }
                }
            }
            Err(e) => fail(e),
        }
    })
}

/// Samples a built-in preset pair into two new score sets. The OOD side
/// uses `seed + 1`.
///
/// # Safety
///
/// `preset` must be a NUL-terminated string; `id_out` and `ood_out` must
/// be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn oodeval_preset_sample(
    preset: *const c_char,
    n: usize,
    seed: u64,
    id_out: *mut *mut OodevalScoreSet,
    ood_out: *mut *mut OodevalScoreSet,
) -> OodevalStatus {
    if preset.is_null() || id_out.is_null() || ood_out.is_null() {
        set_last_error("null pointer".into());
        return OodevalStatus::NullPointer;
    }
    let name = unsafe { CStr::from_ptr(preset) }.to_string_lossy().into_owned();
    guarded(|| {
        let (id_spec, ood_spec) = match preset_pair_by_name(&name) {
            Ok(pair) => pair,
            Err(e) => return fail(e),
        };
        let id = match sample_scores(&id_spec, n, seed, format!("{name}-id"), Kind::Id) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        let ood = match sample_scores(&ood_spec, n, seed + 1, format!("{name}-ood"), Kind::Ood) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        unsafe {
            *id_out = Box::into_raw(Box::new(OodevalScoreSet { inner: id }));
            *ood_out = Box::into_raw(Box::new(OodevalScoreSet { inner: ood }));
        }
        OodevalStatus::Ok
    })
}

/// Frees a string returned by this library. Null is a no-op.
///
/// # Safety
///
/// `s` must be null or a string pointer obtained from this library that
/// has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn oodeval_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    unsafe fn make(scores: &[f64], is_ood: bool) -> *mut OodevalScoreSet {
        let mut out = ptr::null_mut();
        let status = unsafe {
            oodeval_scoreset_new(scores.as_ptr(), scores.len(), ptr::null(), is_ood, &mut out)
        };
        assert_eq!(status, OodevalStatus::Ok);
        out
    }

    #[test]
    fn scoreset_lifecycle_and_autc() {
        unsafe {
            let id = make(&[0.0, 0.0], false);
            let ood = make(&[1.0, 1.0], true);
            assert_eq!(oodeval_scoreset_len(id), 2);

            let mut result = OodevalAutcResult {
                aufpr: -1.0,
                aufnr: -1.0,
                autc: -1.0,
            };
            let status = oodeval_autc(id, ood, 0.5, OodevalIntegration::ExactStep, &mut result);
            assert_eq!(status, OodevalStatus::Ok);
            assert_eq!(result.autc, 0.0);

            let mut v = 0.0;
            assert_eq!(oodeval_auroc(id, ood, &mut v), OodevalStatus::Ok);
            assert_eq!(v, 1.0);

            oodeval_scoreset_free(id);
            oodeval_scoreset_free(ood);
        }
    }

    #[test]
    fn error_codes_and_messages() {
        unsafe {
            let mut out = ptr::null_mut();
            let status =
                oodeval_scoreset_new(ptr::null(), 0, ptr::null(), false, &mut out);
            assert_eq!(status, OodevalStatus::NullPointer);

            let empty: [f64; 0] = [];
            let status =
                oodeval_scoreset_new(empty.as_ptr(), 0, ptr::null(), false, &mut out);
            assert_eq!(status, OodevalStatus::EmptyInput);
            let msg = CStr::from_ptr(oodeval_last_error_message());
            assert!(!msg.to_bytes().is_empty());

            let bad = [0.1, f64::NAN];
            let status = oodeval_scoreset_new(bad.as_ptr(), 2, ptr::null(), false, &mut out);
            assert_eq!(status, OodevalStatus::NonFiniteScore);

            // out-of-range scores must be rejected by autc
            let id = make(&[0.5, 1.5], false);
            let ood = make(&[0.9], true);
            let mut result = OodevalAutcResult {
                aufpr: 0.0,
                aufnr: 0.0,
                autc: 0.0,
            };
            let status =
                oodeval_autc(id, ood, 0.5, OodevalIntegration::Trapezoid, &mut result);
            assert_eq!(status, OodevalStatus::ScoresOutOfRange);
            oodeval_scoreset_free(id);
            oodeval_scoreset_free(ood);
        }
    }

    #[test]
    fn normalization_round_trip() {
        unsafe {
            let raw = make(&[2.0, 6.0, 10.0], false);
            let mut norm = ptr::null_mut();
            assert_eq!(
                oodeval_scoreset_normalized(raw, 2.0, 10.0, &mut norm),
                OodevalStatus::Ok
            );
            assert_eq!((*norm).inner.scores(), &[0.0, 0.5, 1.0]);
            assert_eq!(
                oodeval_scoreset_normalized(raw, 3.0, 3.0, &mut norm),
                OodevalStatus::DegenerateBounds
            );
            oodeval_scoreset_free(raw);
        }
    }

    #[test]
    fn preset_and_report_json() {
        unsafe {
            let mut id = ptr::null_mut();
            let mut ood = ptr::null_mut();
            let name = CString::new("well-separated").unwrap();
            let status = oodeval_preset_sample(name.as_ptr(), 500, 7, &mut id, &mut ood);
            assert_eq!(status, OodevalStatus::Ok);

            let mut json = ptr::null_mut();
            let status = oodeval_evaluate_pair_json(
                id,
                ood,
                0.5,
                OodevalIntegration::Trapezoid,
                &mut json,
            );
            assert_eq!(status, OodevalStatus::Ok);
            let text = CStr::from_ptr(json).to_str().unwrap();
            assert!(text.contains("\"auroc\""));
            oodeval_string_free(json);

            let bad = CString::new("no-such-preset").unwrap();
            let status = oodeval_preset_sample(bad.as_ptr(), 10, 0, &mut id, &mut ood);
            assert_eq!(status, OodevalStatus::UnknownPreset);

            oodeval_scoreset_free(id);
            oodeval_scoreset_free(ood);
        }
    }

    #[test]
    fn rate_and_crossing() {
        unsafe {
            let id = make(&[0.1, 0.3], false);
            let ood = make(&[0.7, 0.9], true);
            let mut value = 0.0;
            let mut threshold = 0.0;
            let status = oodeval_rate_at_level(
                id,
                ood,
                OodevalRateQuery::FprAtTpr,
                0.95,
                &mut value,
                &mut threshold,
            );
            assert_eq!(status, OodevalStatus::Ok);
            assert_eq!(value, 0.0);

            let mut crossing = OodevalCrossing {
                threshold: -1.0,
                fpr: -1.0,
                fnr: -1.0,
            };
            assert_eq!(
                oodeval_crossing_threshold(id, ood, &mut crossing),
                OodevalStatus::Ok
            );
            assert_eq!(crossing.threshold, 0.3);

            oodeval_scoreset_free(id);
            oodeval_scoreset_free(ood);
        }
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = oodeval_version();
        assert!(!v.is_null());
        let s = unsafe { CStr::from_ptr(v) }.to_str().unwrap();
        assert_eq!(s, env!("CARGO_PKG_VERSION"));
    }
}
