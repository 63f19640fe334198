//! C ABI over `topophase`.
//!
//! Scenarios live behind an opaque [`TpScenario`] handle. Every function
//! returns a [`TpStatus`]; on failure a message is available from
//! [`tp_last_error_message`] until the next call on the same thread.
//! Strings returned through out-pointers are owned by the caller and must be
//! released with [`tp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use topophase::phase::{PhaseError, DEFAULT_TOL};
use topophase::relkit::{self, Kinematics, RelError};
use topophase::topocheck::TopoError;
use topophase::{classify, line_phase, parse_scenario, phase_vector_field, Classification, Scenario, ScenarioError, Vec3};

/// Result code of every `tp_*` function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    UnknownPath = 5,
    Numerical = 6,
    Untranslatable = 7,
    InvalidArgument = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TpClassification {
    Topological = 0,
    DynamicalContaminated = 1,
    Trivial = 2,
    NonTopological = 3,
}

impl From<Classification> for TpClassification {
    fn from(c: Classification) -> Self {
        match c {
            Classification::Topological => TpClassification::Topological,
            Classification::DynamicalContaminated => TpClassification::DynamicalContaminated,
            Classification::Trivial => TpClassification::Trivial,
            Classification::NonTopological => TpClassification::NonTopological,
        }
    }
}

/// Opaque scenario handle.
pub struct TpScenario(Scenario);

struct Failure(TpStatus, String);

impl Failure {
    fn new(status: TpStatus, msg: impl Into<String>) -> Self {
        Failure(status, msg.into())
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        let status = match e {
            ScenarioError::Syntax { .. } | ScenarioError::Schema { .. } => TpStatus::Parse,
            ScenarioError::NotSerializable(_) => TpStatus::InvalidArgument,
            _ => TpStatus::Validation,
        };
        Failure(status, e.to_string())
    }
}

impl From<PhaseError> for Failure {
    fn from(e: PhaseError) -> Self {
        let status = match e {
            PhaseError::InvalidTolerance(_) => TpStatus::InvalidArgument,
            PhaseError::NoDipole | PhaseError::ZeroSpeed(_) => TpStatus::Validation,
            _ => TpStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

impl From<RelError> for Failure {
    fn from(e: RelError) -> Self {
        match e {
            RelError::Scenario(inner) => inner.into(),
            RelError::Superluminal(_) => Failure(TpStatus::InvalidArgument, e.to_string()),
            RelError::Inconsistent { .. } => Failure(TpStatus::Numerical, e.to_string()),
            RelError::Untranslatable { .. } | RelError::PermanentDipole => Failure(TpStatus::Untranslatable, e.to_string()),
        }
    }
}

impl From<TopoError> for Failure {
    fn from(e: TopoError) -> Self {
        match e {
            TopoError::NoClosedPath => Failure(TpStatus::Validation, e.to_string()),
            TopoError::Phase(inner) => inner.into(),
            _ => Failure(TpStatus::Numerical, e.to_string()),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, recording its error message and trapping panics.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            TpStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure::new(TpStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

unsafe fn scenario_ref<'a>(s: *const TpScenario) -> Result<&'a Scenario, Failure> {
    non_null(s, "scenario")?;
    Ok(&(*s).0)
}

unsafe fn read_str<'a>(s: *const c_char, name: &str) -> Result<&'a str, Failure> {
    non_null(s, name)?;
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure::new(TpStatus::InvalidUtf8, format!("{name} is not UTF-8: {e}")))
}

unsafe fn read_vec3(p: *const f64, name: &str) -> Result<Vec3, Failure> {
    non_null(p, name)?;
    let a = std::slice::from_raw_parts(p, 3);
    Ok(Vec3::new(a[0], a[1], a[2]))
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::new(TpStatus::Numerical, "output contains a NUL byte"))
}

/// Parses and validates a scenario from `len` bytes of JSON.
///
/// # Safety
/// `json` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tp_scenario_parse(json: *const u8, len: usize, out: *mut *mut TpScenario) -> TpStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        non_null(json, "json")?;
        let bytes = std::slice::from_raw_parts(json, len);
        if let Err(e) = std::str::from_utf8(bytes) {
            return Err(Failure::new(TpStatus::InvalidUtf8, format!("input is not UTF-8: {e}")));
        }
        let s = parse_scenario(bytes)?;
        *out = Box::into_raw(Box::new(TpScenario(s)));
        Ok(())
    })
}

/// Releases a scenario. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tp_scenario_free(s: *mut TpScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Serialises a scenario back to JSON.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tp_scenario_to_json(s: *const TpScenario, out: *mut *mut c_char) -> TpStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let text = scenario_ref(s)?.to_json()?;
        *out = into_c_string(text)?;
        Ok(())
    })
}

/// Phase accumulated along the named path. `tol <= 0` selects the default
/// tolerance. `abs_error` may be null.
///
/// # Safety
/// Pointers must be valid; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn tp_line_phase(
    s: *const TpScenario,
    path: *const c_char,
    tol: f64,
    value: *mut f64,
    abs_error: *mut f64,
) -> TpStatus {
    guard(|| {
        non_null(value, "value")?;
        let s = scenario_ref(s)?;
        let name = read_str(path, "path")?;
        let p = s
            .path(name)
            .ok_or_else(|| Failure::new(TpStatus::UnknownPath, format!("unknown path '{name}'")))?;
        let tol = if tol > 0.0 { tol } else { DEFAULT_TOL };
        let r = line_phase(&phase_vector_field(s)?, p, tol)?;
        *value = r.value;
        if !abs_error.is_null() {
            *abs_error = r.abs_error_estimate;
        }
        Ok(())
    })
}

/// Runs the topology checks. The JSON report is written to `report_json`
/// (may be null) and the verdict to `classification` (may be null).
///
/// # Safety
/// Pointers must be valid or null where allowed.
#[no_mangle]
pub unsafe extern "C" fn tp_check_json(
    s: *const TpScenario,
    report_json: *mut *mut c_char,
    classification: *mut TpClassification,
) -> TpStatus {
    guard(|| {
        if !report_json.is_null() {
            *report_json = ptr::null_mut();
        }
        let report = classify(scenario_ref(s)?)?;
        if !classification.is_null() {
            *classification = report.classification.into();
        }
        if !report_json.is_null() {
            *report_json = into_c_string(report.to_json())?;
        }
        Ok(())
    })
}

/// Electric/magnetic dual of a scenario, as a new handle.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tp_duality(s: *const TpScenario, out: *mut *mut TpScenario) -> TpStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let dual = relkit::duality_map(scenario_ref(s)?)?;
        *out = Box::into_raw(Box::new(TpScenario(dual)));
        Ok(())
    })
}

/// Relativistic induced-dipole Lagrangian for lab fields `e`, `b` and
/// velocity `v` (each three doubles).
///
/// # Safety
/// `e`, `b`, `v` must point to three doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tp_rel_lagrangian(
    e: *const f64,
    b: *const f64,
    v: *const f64,
    alpha: f64,
    out: *mut f64,
) -> TpStatus {
    guard(|| {
        non_null(out, "out")?;
        let k = Kinematics::new(read_vec3(v, "v")?)?;
        *out = relkit::rel_lagrangian(read_vec3(e, "e")?, read_vec3(b, "b")?, &k, alpha)?;
        Ok(())
    })
}

/// Lab-frame spin four-vector `(t, x, y, z)` for rest-frame spin `s` and
/// velocity `v`.
///
/// # Safety
/// `s`, `v` must point to three doubles; `out` to four writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tp_boost_spin(s: *const f64, v: *const f64, out: *mut f64) -> TpStatus {
    guard(|| {
        non_null(out, "out")?;
        let k = Kinematics::new(read_vec3(v, "v")?)?;
        let four = relkit::boost_spin(read_vec3(s, "s")?, &k);
        std::slice::from_raw_parts_mut(out, 4).copy_from_slice(&four.0);
        Ok(())
    })
}

/// Message of the last failure on this thread, or null. Owned by the
/// library; valid until the next `tp_*` call on the same thread.
#[no_mangle]
pub extern "C" fn tp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
