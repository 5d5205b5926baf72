//! Exercises the C entry points from Rust: handle lifecycle, JSON flows,
//! status codes, and null handling.

use std::ffi::{CStr, CString};
use std::ptr;

use refgame_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    rg_string_free(p);
    s
}

fn generate(kind: &str, param: f64, dim: u64, seed: u64) -> *mut RgInstance {
    let kind = cstr(kind);
    let mut handle: *mut RgInstance = ptr::null_mut();
    let status = unsafe { rg_instance_generate(kind.as_ptr(), param, dim, seed, &mut handle) };
    assert_eq!(status, RgStatus::Ok, "generate failed: {}", last_error());
    assert!(!handle.is_null());
    handle
}

fn last_error() -> String {
    let p = rg_last_error_message();
    if p.is_null() {
        return String::new();
    }
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn version_and_status_names_are_static_strings() {
    let v = unsafe { CStr::from_ptr(rg_version()) }.to_str().unwrap();
    assert!(!v.is_empty());
    let name = unsafe { CStr::from_ptr(rg_status_name(RgStatus::NoConvergence)) }
        .to_str()
        .unwrap();
    assert_eq!(name, "no convergence");
}

#[test]
fn instance_json_round_trip() {
    let handle = generate("no-diag-pair", 0.01, 0, 0);

    let mut dim_in = 0u64;
    let mut dim_out = 0u64;
    let status = unsafe { rg_instance_dims(handle, &mut dim_in, &mut dim_out) };
    assert_eq!(status, RgStatus::Ok);
    assert_eq!((dim_in, dim_out), (2, 2));

    let mut epsilon = 0.0f64;
    assert_eq!(
        unsafe { rg_instance_epsilon(handle, &mut epsilon) },
        RgStatus::Ok
    );
    assert!((epsilon - 0.0396).abs() < 1e-12);

    let mut json: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(
        unsafe { rg_instance_to_json(handle, &mut json) },
        RgStatus::Ok
    );
    let text = unsafe { take_string(json) };

    let round = cstr(&text);
    let mut back: *mut RgInstance = ptr::null_mut();
    assert_eq!(
        unsafe { rg_instance_from_json(round.as_ptr(), &mut back) },
        RgStatus::Ok
    );
    let mut json2: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(
        unsafe { rg_instance_to_json(back, &mut json2) },
        RgStatus::Ok
    );
    assert_eq!(text, unsafe { take_string(json2) });

    unsafe {
        rg_instance_free(handle);
        rg_instance_free(back);
    }
}

#[test]
fn game_value_reports_half_for_yes_instance() {
    let handle = generate("yes-shared-image", 0.0, 2, 3);
    let mut json: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(
        unsafe { rg_game_value_json(handle, ptr::null(), &mut json) },
        RgStatus::Ok
    );
    let report: serde_json::Value =
        serde_json::from_str(&unsafe { take_string(json) }).unwrap();
    assert!((report["value"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    unsafe { rg_instance_free(handle) };
}

#[test]
fn separate_reports_certified_distance() {
    let handle = generate("no-constant-pair", std::f64::consts::FRAC_PI_2, 0, 0);
    let mut cfg = RgRunConfig {
        gap_tol: 0.0,
        max_iters: 0,
        step_scale: 0.0,
        seed: 0,
    };
    assert_eq!(unsafe { rg_run_config_default(&mut cfg) }, RgStatus::Ok);
    assert_eq!(cfg.max_iters, 200_000);
    assert!((cfg.gap_tol - 1e-3).abs() < 1e-15);

    let mut json: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(
        unsafe { rg_separate_json(handle, &cfg, &mut json) },
        RgStatus::Ok
    );
    let report: serde_json::Value =
        serde_json::from_str(&unsafe { take_string(json) }).unwrap();
    assert!((report["d_dual"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    unsafe { rg_instance_free(handle) };
}

#[test]
fn nonconvergence_status_still_writes_partial_report() {
    let handle = generate("no-diag-pair", 0.3, 0, 0);
    let cfg = RgRunConfig {
        gap_tol: 1e-15,
        max_iters: 3,
        step_scale: 1.0,
        seed: 42,
    };
    let mut json: *mut std::ffi::c_char = ptr::null_mut();
    let status = unsafe { rg_game_value_json(handle, &cfg, &mut json) };
    assert_eq!(status, RgStatus::NoConvergence);
    let partial: serde_json::Value =
        serde_json::from_str(&unsafe { take_string(json) }).unwrap();
    assert_eq!(partial["iterations"].as_u64().unwrap(), 3);
    assert!(last_error().contains("iterations"));
    unsafe { rg_instance_free(handle) };
}

#[test]
fn repetition_report_round_trips() {
    let handle = generate("no-diag-pair", 0.05, 0, 0);
    let mut json: *mut std::ffi::c_char = ptr::null_mut();
    let status = unsafe {
        rg_repetition_json(
            handle,
            2,
            RgRepetitionMode::UnanimousReject,
            ptr::null(),
            &mut json,
        )
    };
    assert_eq!(status, RgStatus::Ok);
    let report: serde_json::Value =
        serde_json::from_str(&unsafe { take_string(json) }).unwrap();
    assert_eq!(report["mode"], "unanimous-reject");
    assert!(report["certificates"].as_array().unwrap().len() >= 5);
    unsafe { rg_instance_free(handle) };
}

#[test]
fn play_matches_exact_probability() {
    let handle = generate("yes-identical", 0.0, 2, 0);
    let mut stats = RgPlayStats {
        rounds: 0,
        accepts: 0,
        frequency: 0.0,
        exact: 0.0,
    };
    assert_eq!(
        unsafe { rg_play(handle, 50_000, 7, ptr::null(), &mut stats) },
        RgStatus::Ok
    );
    assert_eq!(stats.rounds, 50_000);
    assert!((stats.exact - 0.5).abs() < 1e-9);
    assert!((stats.frequency - stats.exact).abs() < 0.02);
    unsafe { rg_instance_free(handle) };
}

#[test]
fn null_and_bad_arguments_are_reported() {
    let mut handle: *mut RgInstance = ptr::null_mut();
    assert_eq!(
        unsafe { rg_instance_generate(ptr::null(), 0.0, 2, 0, &mut handle) },
        RgStatus::NullPointer
    );

    let kind = cstr("definitely-not-a-kind");
    assert_eq!(
        unsafe { rg_instance_generate(kind.as_ptr(), 0.0, 2, 0, &mut handle) },
        RgStatus::InvalidArgument
    );
    assert!(last_error().contains("definitely-not-a-kind"));

    let kind = cstr("no-diag-pair");
    assert_eq!(
        unsafe { rg_instance_generate(kind.as_ptr(), 0.9, 2, 0, &mut handle) },
        RgStatus::InvalidArgument
    );

    let bad = cstr("{\"not\": \"an instance\"}");
    assert_eq!(
        unsafe { rg_instance_from_json(bad.as_ptr(), &mut handle) },
        RgStatus::ParseError
    );

    let mut json: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(
        unsafe { rg_instance_to_json(ptr::null(), &mut json) },
        RgStatus::NullPointer
    );

    // Freeing NULL is a no-op.
    unsafe {
        rg_instance_free(ptr::null_mut());
        rg_string_free(ptr::null_mut());
    }
}

#[test]
fn selftest_reports_all_passing() {
    let mut table: *mut std::ffi::c_char = ptr::null_mut();
    let status = unsafe { rg_selftest(42, &mut table) };
    let text = unsafe { take_string(table) };
    assert_eq!(status, RgStatus::Ok, "selftest failed:\n{text}");
    assert!(text.contains("15/15 checks passed"), "{text}");
}

#[test]
fn generated_header_exists_with_expected_symbols() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("refgame.h");
    let text = std::fs::read_to_string(&header).expect("header generated at build time");
    for symbol in [
        "rg_instance_generate",
        "rg_instance_from_json",
        "rg_instance_free",
        "rg_separate_json",
        "rg_game_value_json",
        "rg_repetition_json",
        "rg_play",
        "rg_selftest",
        "rg_string_free",
        "rg_last_error_message",
        "typedef struct RgInstance RgInstance;",
        "RG_STATUS_NO_CONVERGENCE",
    ] {
        assert!(text.contains(symbol), "header misses {symbol}");
    }
}
