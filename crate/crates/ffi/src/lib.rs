//! C ABI for the refgame toolkit.
//!
//! Conventions:
//! - Game instances travel as opaque `RgInstance` handles created by
//!   `rg_instance_generate` or `rg_instance_from_json` and released with
//!   `rg_instance_free`.
//! - Every fallible call returns an [`RgStatus`]; `RG_STATUS_OK` is zero.
//!   A human-readable description of the most recent failure on the current
//!   thread is available from `rg_last_error_message`.
//! - Reports come back as NUL-terminated UTF-8 JSON strings allocated by
//!   this library; release them with `rg_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use refgame::error::Error;
use refgame::games::{game_value, generate_instance, GameInstance, InstanceKind};
use refgame::repetition::{repetition_report, RepetitionMode};
use refgame::separation::{solve_image_separation, SeparationConfig};
use refgame::serialize::{from_json_str, to_json_string};

/// Status codes returned by every fallible entry point.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RgStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// JSON did not parse or violated a type invariant.
    ParseError = 3,
    /// A parameter was out of range for the requested operation.
    InvalidArgument = 4,
    /// Operator or channel dimensions do not line up.
    DimensionMismatch = 5,
    /// The solver hit its iteration cap; partial output was still written.
    NoConvergence = 6,
    /// A tensor-power construction exceeded the size budget.
    TooLarge = 7,
    /// Anything else; see rg_last_error_message.
    Internal = 8,
}

/// Opaque game instance handle.
pub struct RgInstance {
    inner: GameInstance,
}

/// Solver knobs mirrored across the ABI.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RgRunConfig {
    /// Duality-gap tolerance (default 1e-3).
    pub gap_tol: f64,
    /// Iteration cap (default 200000).
    pub max_iters: u64,
    /// Subgradient step scale (default 1.0).
    pub step_scale: f64,
    /// Seed for randomized components (default 42).
    pub seed: u64,
}

/// Vote rule for repeated games.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RgRepetitionMode {
    UnanimousAccept = 0,
    UnanimousReject = 1,
}

/// Outcome of a Monte Carlo run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RgPlayStats {
    pub rounds: u64,
    pub accepts: u64,
    pub frequency: f64,
    pub exact: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let sanitized = message.replace('\0', "?");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(sanitized).expect("NULs stripped"));
    });
}

fn status_for(error: &Error) -> RgStatus {
    match error {
        Error::ShapeMismatch { .. } => RgStatus::DimensionMismatch,
        Error::Parse(_) => RgStatus::ParseError,
        Error::NotHermitian { .. }
        | Error::NotDensity { .. }
        | Error::NotTracePreserving { .. }
        | Error::NormTooLarge { .. } => RgStatus::ParseError,
        Error::InvalidParam(_) => RgStatus::InvalidArgument,
        Error::NoConvergence(_) => RgStatus::NoConvergence,
        Error::TooLarge { .. } => RgStatus::TooLarge,
        Error::EigNoConvergence { .. } | Error::CertificationFailed(_) | Error::Io(_) => {
            RgStatus::Internal
        }
    }
}

fn fail(error: Error) -> RgStatus {
    let status = status_for(&error);
    set_last_error(error.to_string());
    status
}

fn config_from(cfg: *const RgRunConfig) -> SeparationConfig {
    if cfg.is_null() {
        return SeparationConfig::default();
    }
    let cfg = unsafe { &*cfg };
    SeparationConfig {
        max_iters: cfg.max_iters as usize,
        gap_tol: cfg.gap_tol,
        step_scale: cfg.step_scale,
        seed: cfg.seed,
    }
}

unsafe fn read_utf8<'a>(ptr: *const c_char) -> Result<&'a str, RgStatus> {
    if ptr.is_null() {
        set_last_error("NULL string argument".into());
        return Err(RgStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_last_error("string argument is not valid UTF-8".into());
        RgStatus::InvalidUtf8
    })
}

fn emit_string(out: *mut *mut c_char, text: String) -> RgStatus {
    let c = match CString::new(text) {
        Ok(c) => c,
        Err(_) => {
            set_last_error("output contained an interior NUL".into());
            return RgStatus::Internal;
        }
    };
    unsafe { *out = c.into_raw() };
    RgStatus::Ok
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn rg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static name of a status code; do not free.
#[no_mangle]
pub extern "C" fn rg_status_name(status: RgStatus) -> *const c_char {
    let name: &'static str = match status {
        RgStatus::Ok => "ok\0",
        RgStatus::NullPointer => "null pointer\0",
        RgStatus::InvalidUtf8 => "invalid utf-8\0",
        RgStatus::ParseError => "parse error\0",
        RgStatus::InvalidArgument => "invalid argument\0",
        RgStatus::DimensionMismatch => "dimension mismatch\0",
        RgStatus::NoConvergence => "no convergence\0",
        RgStatus::TooLarge => "too large\0",
        RgStatus::Internal => "internal error\0",
    };
    name.as_ptr() as *const c_char
}

/// Message of the most recent failure on this thread, or NULL if none.
/// The pointer is valid until the next failing call on the same thread;
/// do not free.
#[no_mangle]
pub extern "C" fn rg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|c| c.as_ptr())
            .unwrap_or(ptr::null())
    })
}

/// Fill a config with the library defaults.
/// # Safety
/// `out` must be valid for writing one `RgRunConfig`.
#[no_mangle]
pub unsafe extern "C" fn rg_run_config_default(out: *mut RgRunConfig) -> RgStatus {
    if out.is_null() {
        set_last_error("NULL config output".into());
        return RgStatus::NullPointer;
    }
    let d = SeparationConfig::default();
    unsafe {
        *out = RgRunConfig {
            gap_tol: d.gap_tol,
            max_iters: d.max_iters as u64,
            step_scale: d.step_scale,
            seed: d.seed,
        };
    }
    RgStatus::Ok
}

/// Generate an instance. `kind` is one of "yes-identical",
/// "yes-shared-image" (param unused, `dim` used), "no-constant-pair"
/// (param = angle in radians), "no-diag-pair" (param = delta).
/// On success `*out` owns the handle; free with `rg_instance_free`.
/// # Safety
/// `kind` must be a valid NUL-terminated string and `out` valid for
/// writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_instance_generate(
    kind: *const c_char,
    param: f64,
    dim: u64,
    seed: u64,
    out: *mut *mut RgInstance,
) -> RgStatus {
    if out.is_null() {
        set_last_error("NULL instance output".into());
        return RgStatus::NullPointer;
    }
    let kind = match unsafe { read_utf8(kind) } {
        Ok(k) => k,
        Err(status) => return status,
    };
    let parsed = match kind {
        "yes-identical" => InstanceKind::YesIdentical { dim: dim as usize },
        "yes-shared-image" => InstanceKind::YesSharedImage { dim: dim as usize },
        "no-constant-pair" => InstanceKind::NoConstantPair { angle: param },
        "no-diag-pair" => InstanceKind::NoDiagPair { delta: param },
        other => {
            set_last_error(format!("unknown instance kind '{other}'"));
            return RgStatus::InvalidArgument;
        }
    };
    match generate_instance(parsed, seed) {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(RgInstance { inner })) };
            RgStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Parse an instance from JSON. On success `*out` owns the handle.
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` valid for
/// writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_instance_from_json(
    json: *const c_char,
    out: *mut *mut RgInstance,
) -> RgStatus {
    if out.is_null() {
        set_last_error("NULL instance output".into());
        return RgStatus::NullPointer;
    }
    let text = match unsafe { read_utf8(json) } {
        Ok(t) => t,
        Err(status) => return status,
    };
    match from_json_str::<GameInstance>(text) {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(RgInstance { inner })) };
            RgStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Serialize an instance to JSON; release the string with `rg_string_free`.
/// # Safety
/// `instance` must be a live handle from this library and `out` valid for
/// writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_instance_to_json(
    instance: *const RgInstance,
    out: *mut *mut c_char,
) -> RgStatus {
    if instance.is_null() || out.is_null() {
        set_last_error("NULL argument".into());
        return RgStatus::NullPointer;
    }
    let instance = unsafe { &*instance };
    match to_json_string(&instance.inner) {
        Ok(json) => emit_string(out, json),
        Err(e) => fail(e),
    }
}

/// Input and output dimensions of an instance's channels.
/// # Safety
/// `instance` must be a live handle; `dim_in` and `dim_out` must be valid
/// for writing.
#[no_mangle]
pub unsafe extern "C" fn rg_instance_dims(
    instance: *const RgInstance,
    dim_in: *mut u64,
    dim_out: *mut u64,
) -> RgStatus {
    if instance.is_null() || dim_in.is_null() || dim_out.is_null() {
        set_last_error("NULL argument".into());
        return RgStatus::NullPointer;
    }
    let instance = unsafe { &*instance };
    unsafe {
        *dim_in = instance.inner.dim_in() as u64;
        *dim_out = instance.inner.dim_out() as u64;
    }
    RgStatus::Ok
}

/// Promised fidelity-squared bound ε of an instance.
/// # Safety
/// `instance` must be a live handle and `epsilon` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rg_instance_epsilon(
    instance: *const RgInstance,
    epsilon: *mut f64,
) -> RgStatus {
    if instance.is_null() || epsilon.is_null() {
        set_last_error("NULL argument".into());
        return RgStatus::NullPointer;
    }
    unsafe { *epsilon = (*instance).inner.epsilon() };
    RgStatus::Ok
}

/// Release an instance handle. NULL is ignored.
///
/// # Safety
/// `instance` must have come from this library and not been freed already.
#[no_mangle]
pub unsafe extern "C" fn rg_instance_free(instance: *mut RgInstance) {
    if !instance.is_null() {
        drop(unsafe { Box::from_raw(instance) });
    }
}

/// Solve the image separation and return the result record as JSON.
/// On `RG_STATUS_NO_CONVERGENCE` the partial result is still written.
/// # Safety
/// `instance` must be a live handle, `cfg` NULL or valid for reading, and
/// `out` valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_separate_json(
    instance: *const RgInstance,
    cfg: *const RgRunConfig,
    out: *mut *mut c_char,
) -> RgStatus {
    if instance.is_null() || out.is_null() {
        set_last_error("NULL argument".into());
        return RgStatus::NullPointer;
    }
    let g = &unsafe { &*instance }.inner;
    match solve_image_separation(g.q0(), g.q1(), &config_from(cfg)) {
        Ok(result) => match to_json_string(&result) {
            Ok(json) => emit_string(out, json),
            Err(e) => fail(e),
        },
        Err(Error::NoConvergence(partial)) => {
            let status = match to_json_string(partial.as_ref()) {
                Ok(json) => emit_string(out, json),
                Err(e) => return fail(e),
            };
            if status != RgStatus::Ok {
                return status;
            }
            set_last_error(format!(
                "gap {:.3e} above tolerance after {} iterations",
                partial.gap, partial.iterations
            ));
            RgStatus::NoConvergence
        }
        Err(e) => fail(e),
    }
}

/// Compute the game value report as JSON. On `RG_STATUS_NO_CONVERGENCE`
/// the partial separation record is written instead.
/// # Safety
/// `instance` must be a live handle, `cfg` NULL or valid for reading, and
/// `out` valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_game_value_json(
    instance: *const RgInstance,
    cfg: *const RgRunConfig,
    out: *mut *mut c_char,
) -> RgStatus {
    if instance.is_null() || out.is_null() {
        set_last_error("NULL argument".into());
        return RgStatus::NullPointer;
    }
    let g = &unsafe { &*instance }.inner;
    match game_value(g, &config_from(cfg)) {
        Ok(report) => match to_json_string(&report) {
            Ok(json) => emit_string(out, json),
            Err(e) => fail(e),
        },
        Err(Error::NoConvergence(partial)) => {
            let status = match to_json_string(partial.as_ref()) {
                Ok(json) => emit_string(out, json),
                Err(e) => return fail(e),
            };
            if status != RgStatus::Ok {
                return status;
            }
            set_last_error(format!(
                "gap {:.3e} above tolerance after {} iterations",
                partial.gap, partial.iterations
            ));
            RgStatus::NoConvergence
        }
        Err(e) => fail(e),
    }
}

/// Parallel-repetition report as JSON.
/// # Safety
/// `instance` must be a live handle, `cfg` NULL or valid for reading, and
/// `out` valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_repetition_json(
    instance: *const RgInstance,
    k: u64,
    mode: RgRepetitionMode,
    cfg: *const RgRunConfig,
    out: *mut *mut c_char,
) -> RgStatus {
    if instance.is_null() || out.is_null() {
        set_last_error("NULL argument".into());
        return RgStatus::NullPointer;
    }
    let g = &unsafe { &*instance }.inner;
    let mode = match mode {
        RgRepetitionMode::UnanimousAccept => RepetitionMode::UnanimousAccept,
        RgRepetitionMode::UnanimousReject => RepetitionMode::UnanimousReject,
    };
    match repetition_report(g, k as usize, mode, &config_from(cfg)) {
        Ok(report) => match to_json_string(&report) {
            Ok(json) => emit_string(out, json),
            Err(e) => fail(e),
        },
        Err(e) => fail(e),
    }
}

/// Monte Carlo rounds at the computed equilibrium.
/// # Safety
/// `instance` must be a live handle, `cfg` NULL or valid for reading, and
/// `out` valid for writing one `RgPlayStats`.
#[no_mangle]
pub unsafe extern "C" fn rg_play(
    instance: *const RgInstance,
    rounds: u64,
    seed: u64,
    cfg: *const RgRunConfig,
    out: *mut RgPlayStats,
) -> RgStatus {
    if instance.is_null() || out.is_null() {
        set_last_error("NULL argument".into());
        return RgStatus::NullPointer;
    }
    let g = &unsafe { &*instance }.inner;
    let report = match game_value(g, &config_from(cfg)) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let exact = match refgame::games::acceptance_probability(g, &report.eq_yes, &report.eq_no) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    match refgame::games::simulate_rounds(g, &report.eq_yes, &report.eq_no, rounds, seed) {
        Ok((accepts, frequency)) => {
            unsafe {
                *out = RgPlayStats {
                    rounds,
                    accepts,
                    frequency,
                    exact,
                };
            }
            RgStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Run the full property suite; the rendered table is returned through
/// `out_table`. Returns `RG_STATUS_OK` only when every check passed.
/// # Safety
/// `out_table` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_selftest(seed: u64, out_table: *mut *mut c_char) -> RgStatus {
    if out_table.is_null() {
        set_last_error("NULL table output".into());
        return RgStatus::NullPointer;
    }
    let report = refgame::selftest::run_all(seed);
    let table = report.render();
    let all_passed = report.all_passed();
    let status = emit_string(out_table, table);
    if status != RgStatus::Ok {
        return status;
    }
    if all_passed {
        RgStatus::Ok
    } else {
        set_last_error("selftest failures; see the table".into());
        RgStatus::Internal
    }
}

/// Release a string allocated by this library. NULL is ignored.
///
/// # Safety
/// `s` must have come from this library and not been freed already.
#[no_mangle]
pub unsafe extern "C" fn rg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
