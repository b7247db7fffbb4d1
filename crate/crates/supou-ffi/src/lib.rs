//! C ABI surface for the supou library.
//!
//! All entry points return a `SupouStatus` code; detailed messages for the
//! most recent failure on the calling thread are available through
//! `supou_last_error`. Models are opaque handles created from the same JSON
//! `model` block the CLI config uses; reports come back as JSON strings that
//! must be released with `supou_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use supou::asymptotics::{classify_quad, classify_regime};
use supou::config::{ModelConfig, SimulationConfig};
use supou::error::Error;
use supou::model::{supou_marginal_cumulant, CharacteristicQuadruple};
use supou::simulate::{run_ensemble, write_paths_csv};
use supou::verify::{verify_regime, Thresholds};

/// Status codes returned by every FFI call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupouStatus {
    Ok = 0,
    /// Invalid parameters, malformed JSON, or a null argument.
    InvalidArgument = 1,
    /// The model sits on a regime boundary; no limit theorem applies.
    BoundaryRegime = 2,
    /// Simulation failure.
    SimulationFailed = 3,
    /// A numerical routine failed to converge.
    NumericalFailure = 4,
    /// Internal serialization error.
    Internal = 5,
}

/// Opaque model handle: a validated characteristic quadruple.
pub struct SupouModel {
    quad: CharacteristicQuadruple,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> SupouStatus {
    match err {
        Error::InvalidParameter { .. } | Error::Unsupported(_) | Error::Json(_) => {
            SupouStatus::InvalidArgument
        }
        Error::BoundaryRegime(_) => SupouStatus::BoundaryRegime,
        Error::Simulation(_) => SupouStatus::SimulationFailed,
        Error::Numerical { .. } => SupouStatus::NumericalFailure,
        Error::Io(_) | Error::Csv(_) => SupouStatus::Internal,
    }
}

fn fail(err: Error) -> SupouStatus {
    let code = status_of(&err);
    set_error(err.to_string());
    code
}

/// # Safety
/// `ptr` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, SupouStatus> {
    if ptr.is_null() {
        set_error(format!("{what} is null"));
        return Err(SupouStatus::InvalidArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        SupouStatus::InvalidArgument
    })
}

fn give_string(s: String, out: *mut *mut c_char) -> SupouStatus {
    let c = match CString::new(s) {
        Ok(c) => c,
        Err(_) => {
            set_error("output contained an interior NUL byte");
            return SupouStatus::Internal;
        }
    };
    unsafe { *out = c.into_raw() };
    SupouStatus::Ok
}

/// Message for the most recent failure on this thread, or null if the last
/// call succeeded. The pointer is owned by the library and valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn supou_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Create a model from the JSON `model` block (drift, gaussian_b,
/// levy_measure, mixing). On success writes an owned handle to `out`.
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` must be a valid
/// pointer. The handle must be released with `supou_model_free`.
#[no_mangle]
pub unsafe extern "C" fn supou_model_from_json(
    json: *const c_char,
    out: *mut *mut SupouModel,
) -> SupouStatus {
    if out.is_null() {
        set_error("out is null");
        return SupouStatus::InvalidArgument;
    }
    let text = match read_str(json, "model JSON") {
        Ok(t) => t,
        Err(code) => return code,
    };
    let model: ModelConfig = match serde_json::from_str(text) {
        Ok(m) => m,
        Err(e) => return fail(Error::Json(e)),
    };
    match model.to_quadruple() {
        Ok(quad) => {
            *out = Box::into_raw(Box::new(SupouModel { quad }));
            SupouStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Release a model handle. Null is a no-op.
///
/// # Safety
/// `model` must be null or a pointer returned by `supou_model_from_json`
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn supou_model_free(model: *mut SupouModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Release a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must be null or a pointer produced by a supou call that has not been
/// freed yet.
#[no_mangle]
pub unsafe extern "C" fn supou_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Classify the long-horizon regime of a model. Writes the regime report as
/// JSON to `report_json`. Returns `BoundaryRegime` (with the report still
/// written) when the parameters sit on a boundary set.
///
/// # Safety
/// `model` must be a live handle; `report_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn supou_model_classify(
    model: *const SupouModel,
    report_json: *mut *mut c_char,
) -> SupouStatus {
    if model.is_null() || report_json.is_null() {
        set_error("model or report_json is null");
        return SupouStatus::InvalidArgument;
    }
    let report = match classify_quad(&(*model).quad) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let boundary = report.boundary;
    let json = match serde_json::to_string_pretty(&report) {
        Ok(j) => j,
        Err(e) => return fail(Error::Json(e)),
    };
    let code = give_string(json, report_json);
    if code == SupouStatus::Ok && boundary {
        set_error("boundary regime: no limit theorem applies");
        return SupouStatus::BoundaryRegime;
    }
    code
}

/// Classify from bare exponents without building a model. `beta` also
/// accepts a Blumenthal-Getoor index; `gaussian` is 0 or nonzero.
///
/// # Safety
/// `report_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn supou_classify_exponents(
    gamma: f64,
    alpha: f64,
    beta: f64,
    gaussian: i32,
    report_json: *mut *mut c_char,
) -> SupouStatus {
    if report_json.is_null() {
        set_error("report_json is null");
        return SupouStatus::InvalidArgument;
    }
    let report = match classify_regime(gamma, alpha, beta, gaussian != 0) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let boundary = report.boundary;
    let json = match serde_json::to_string_pretty(&report) {
        Ok(j) => j,
        Err(e) => return fail(Error::Json(e)),
    };
    let code = give_string(json, report_json);
    if code == SupouStatus::Ok && boundary {
        set_error("boundary regime: no limit theorem applies");
        return SupouStatus::BoundaryRegime;
    }
    code
}

/// Evaluate the stationary marginal cumulant of the model at `zeta`.
///
/// # Safety
/// `model` must be a live handle; `re` and `im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn supou_model_marginal_cumulant(
    model: *const SupouModel,
    zeta: f64,
    re: *mut f64,
    im: *mut f64,
) -> SupouStatus {
    if model.is_null() || re.is_null() || im.is_null() {
        set_error("model, re or im is null");
        return SupouStatus::InvalidArgument;
    }
    match supou_marginal_cumulant(&(*model).quad, zeta) {
        Ok(k) => {
            *re = k.re;
            *im = k.im;
            SupouStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Run a path ensemble described by the JSON `simulation` block (t_ladder,
/// grid_step, superposition_count, replications, optional cutoff/burn_in).
/// Writes the ensemble CSV (replication, component, t, x, xstar) to
/// `csv_out`.
///
/// # Safety
/// `model` must be a live handle; `sim_json` a valid NUL-terminated string;
/// `csv_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn supou_model_simulate_csv(
    model: *const SupouModel,
    sim_json: *const c_char,
    seed: u64,
    csv_out: *mut *mut c_char,
) -> SupouStatus {
    if model.is_null() || csv_out.is_null() {
        set_error("model or csv_out is null");
        return SupouStatus::InvalidArgument;
    }
    let text = match read_str(sim_json, "simulation JSON") {
        Ok(t) => t,
        Err(code) => return code,
    };
    let sim: SimulationConfig = match serde_json::from_str(text) {
        Ok(s) => s,
        Err(e) => return fail(Error::Json(e)),
    };
    let cfg = match sim.to_sim_config(seed) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let ensemble = match run_ensemble(&(*model).quad, &cfg) {
        Ok(e) => e,
        Err(e) => return fail(e),
    };
    let mut buf: Vec<u8> = Vec::new();
    if let Err(e) = write_paths_csv(&ensemble, &mut buf) {
        return fail(e);
    }
    match String::from_utf8(buf) {
        Ok(s) => give_string(s, csv_out),
        Err(_) => {
            set_error("CSV output was not UTF-8");
            SupouStatus::Internal
        }
    }
}

/// Run the verification suite using the JSON `simulation` block and default
/// thresholds; writes the VerificationReport JSON to `report_json`.
///
/// # Safety
/// Same contracts as `supou_model_simulate_csv`.
#[no_mangle]
pub unsafe extern "C" fn supou_model_verify(
    model: *const SupouModel,
    sim_json: *const c_char,
    seed: u64,
    report_json: *mut *mut c_char,
) -> SupouStatus {
    if model.is_null() || report_json.is_null() {
        set_error("model or report_json is null");
        return SupouStatus::InvalidArgument;
    }
    let text = match read_str(sim_json, "simulation JSON") {
        Ok(t) => t,
        Err(code) => return code,
    };
    let sim: SimulationConfig = match serde_json::from_str(text) {
        Ok(s) => s,
        Err(e) => return fail(Error::Json(e)),
    };
    let cfg = match sim.to_sim_config(seed) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let report = match verify_regime(&(*model).quad, &cfg, &sim.t_ladder, &Thresholds::default()) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    match serde_json::to_string_pretty(&report) {
        Ok(j) => give_string(j, report_json),
        Err(e) => fail(Error::Json(e)),
    }
}
