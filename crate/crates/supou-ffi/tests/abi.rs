//! Exercise the C ABI surface from Rust: handle lifecycle, error codes, and
//! determinism of the JSON/CSV payloads.

use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

use supou_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take_string(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = CStr::from_ptr(p).to_str().unwrap().to_string();
    supou_string_free(p);
    s
}

const MODEL_JSON: &str = r#"{
    "gaussian_b": 0.0,
    "levy_measure": {
        "kind": "compound_poisson",
        "rate": 1.0,
        "jumps": { "kind": "pareto", "gamma": 0.8, "p": 0.5, "q": 0.5, "cutoff": 1.0 }
    },
    "mixing": { "kind": "gamma", "alpha": 0.5 }
}"#;

unsafe fn make_model(json: &str) -> *mut SupouModel {
    let mut model: *mut SupouModel = ptr::null_mut();
    let code = supou_model_from_json(c(json).as_ptr(), &mut model);
    assert_eq!(code, SupouStatus::Ok, "{:?}", last_error());
    assert!(!model.is_null());
    model
}

fn last_error() -> Option<String> {
    let p = supou_last_error();
    if p.is_null() {
        None
    } else {
        Some(unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string())
    }
}

#[test]
fn model_lifecycle_and_classification() {
    unsafe {
        let model = make_model(MODEL_JSON);
        let mut report: *mut c_char = ptr::null_mut();
        let code = supou_model_classify(model, &mut report);
        assert_eq!(code, SupouStatus::Ok);
        let json = take_string(report);
        assert!(json.contains("StableLevy"), "{json}");
        assert!(json.contains("\"limit_law\""));
        supou_model_free(model);
    }
}

#[test]
fn classify_exponents_codes() {
    unsafe {
        let mut report: *mut c_char = ptr::null_mut();
        // definite regime
        assert_eq!(
            supou_classify_exponents(0.8, 0.5, 0.3, 0, &mut report),
            SupouStatus::Ok
        );
        let json = take_string(report);
        assert!(json.contains("StableLevy"));

        // boundary (gamma = 1 + alpha): report still written
        let mut report: *mut c_char = ptr::null_mut();
        assert_eq!(
            supou_classify_exponents(1.5, 0.5, 0.3, 0, &mut report),
            SupouStatus::BoundaryRegime
        );
        let json = take_string(report);
        assert!(json.contains("Boundary"));

        // invalid parameters
        let mut report: *mut c_char = ptr::null_mut();
        assert_eq!(
            supou_classify_exponents(2.5, 0.5, 0.3, 0, &mut report),
            SupouStatus::InvalidArgument
        );
        assert!(report.is_null());
        assert!(last_error().unwrap().contains("gamma"));
    }
}

#[test]
fn rejects_nulls_and_bad_json() {
    unsafe {
        let mut model: *mut SupouModel = ptr::null_mut();
        assert_eq!(
            supou_model_from_json(ptr::null(), &mut model),
            SupouStatus::InvalidArgument
        );
        assert_eq!(
            supou_model_from_json(c("{ not json").as_ptr(), &mut model),
            SupouStatus::InvalidArgument
        );
        assert!(last_error().is_some());

        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(
            supou_model_classify(ptr::null(), &mut out),
            SupouStatus::InvalidArgument
        );

        // free accepts nulls
        supou_model_free(ptr::null_mut());
        supou_string_free(ptr::null_mut());
    }
}

#[test]
fn marginal_cumulant_evaluates() {
    unsafe {
        let model = make_model(MODEL_JSON);
        let (mut re, mut im) = (0.0_f64, 0.0_f64);
        let code = supou_model_marginal_cumulant(model, 0.5, &mut re, &mut im);
        assert_eq!(code, SupouStatus::Ok);
        assert!(re < 0.0, "cumulant real part must be negative, got {re}");
        assert!(im.abs() < 1e-9, "symmetric model: imaginary part ~ 0, got {im}");
        supou_model_free(model);
    }
}

#[test]
fn simulate_csv_is_deterministic() {
    unsafe {
        let model = make_model(MODEL_JSON);
        let sim = r#"{
            "t_ladder": [10.0],
            "grid_step": 1.0,
            "superposition_count": 8,
            "replications": 5
        }"#;
        let mut out1: *mut c_char = ptr::null_mut();
        let mut out2: *mut c_char = ptr::null_mut();
        assert_eq!(
            supou_model_simulate_csv(model, c(sim).as_ptr(), 11, &mut out1),
            SupouStatus::Ok
        );
        assert_eq!(
            supou_model_simulate_csv(model, c(sim).as_ptr(), 11, &mut out2),
            SupouStatus::Ok
        );
        let a = take_string(out1);
        let b = take_string(out2);
        assert_eq!(a, b);
        assert!(a.starts_with("replication,component,t,x,xstar"));
        supou_model_free(model);
    }
}

#[test]
fn verify_reports_boundary_code() {
    unsafe {
        // alpha = 1 with a Gaussian part: boundary
        let model = make_model(
            r#"{
                "gaussian_b": 2.0,
                "levy_measure": { "kind": "stable_pair", "c1": 1.0, "c2": 1.0, "gamma": 1.7 },
                "mixing": { "kind": "gamma", "alpha": 1.0 }
            }"#,
        );
        let sim = r#"{
            "t_ladder": [10.0, 100.0, 1000.0],
            "grid_step": 1.0,
            "superposition_count": 8,
            "replications": 5
        }"#;
        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(
            supou_model_verify(model, c(sim).as_ptr(), 3, &mut out),
            SupouStatus::BoundaryRegime
        );
        assert!(out.is_null());
        supou_model_free(model);
    }
}
