//! C ABI for the surface-complex and lattice-model library.
//!
//! Conventions:
//! * objects are opaque handles created by `*_new`/`*_from_*` functions
//!   and released by the matching `*_free`;
//! * every fallible call returns a [`KvStatus`]; on failure a
//!   human-readable message is available from [`kv_last_error`];
//! * strings returned through `char**` out-parameters are owned by the
//!   caller and must be released with [`kv_string_free`].

use kitaev_core::hopf::{hopf_preset, HopfData, HopfJson};
use kitaev_core::model::Model;
use kitaev_core::presentation::{build_complex, ArrowPresentation, ComplexJson, SurfaceComplex};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

/// Status code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum KvStatus {
    Ok = 0,
    /// A pointer/encoding argument was null or malformed.
    InvalidArgument = 1,
    /// Input data failed structural validation.
    Validation = 2,
    /// A numeric computation failed or exceeded its tolerance.
    Numeric = 3,
    /// The requested operation or format is not supported.
    Unsupported = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: impl std::fmt::Display) {
    let s = CString::new(msg.to_string()).unwrap_or_else(|_| CString::new("error").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

/// Message of the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn kv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must have been returned by a `kitaev` function through a
/// `char**` out-parameter and not freed before.
#[no_mangle]
pub unsafe extern "C" fn kv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, KvStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(KvStatus::InvalidArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        KvStatus::InvalidArgument
    })
}

fn give_string(out: *mut *mut c_char, body: String) -> KvStatus {
    if out.is_null() {
        set_error("null output pointer");
        return KvStatus::InvalidArgument;
    }
    match CString::new(body) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            KvStatus::Ok
        }
        Err(_) => {
            set_error("output contains interior NUL");
            KvStatus::InvalidArgument
        }
    }
}

/// An arrow presentation together with its surface complex.
pub struct KvComplex {
    presentation: ArrowPresentation,
    complex: SurfaceComplex,
}

/// A model context: complex plus Hopf data and derived structures.
pub struct KvModel {
    model: Model,
}

fn load_complex(spec: &str) -> Result<KvComplex, KvStatus> {
    let presentation = if let Ok(p) = kitaev_core::presentation::preset(spec) {
        p
    } else {
        let j: ComplexJson = serde_json::from_str(spec).map_err(|e| {
            set_error(format!("not a preset name and not complex JSON: {e}"));
            KvStatus::InvalidArgument
        })?;
        ArrowPresentation::from_json(&j).map_err(|e| {
            set_error(e);
            KvStatus::Validation
        })?
    };
    let complex = build_complex(&presentation).map_err(|e| {
        set_error(e);
        KvStatus::Validation
    })?;
    Ok(KvComplex {
        presentation,
        complex,
    })
}

/// Create a complex from a preset name (`minimal-sphere`, `cube`,
/// `torus-NxM`) or a JSON description.
///
/// # Safety
/// `spec` must be a valid NUL-terminated string; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn kv_complex_new(
    spec: *const c_char,
    out: *mut *mut KvComplex,
) -> KvStatus {
    if out.is_null() {
        set_error("null output pointer");
        return KvStatus::InvalidArgument;
    }
    let spec = match read_str(spec) {
        Ok(s) => s,
        Err(st) => return st,
    };
    match load_complex(spec) {
        Ok(c) => {
            *out = Box::into_raw(Box::new(c));
            KvStatus::Ok
        }
        Err(st) => st,
    }
}

/// Release a complex handle.
///
/// # Safety
/// `c` must come from `kv_complex_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn kv_complex_free(c: *mut KvComplex) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of arrows.
///
/// # Safety
/// `c` must be a live complex handle.
#[no_mangle]
pub unsafe extern "C" fn kv_complex_arrows(c: *const KvComplex) -> usize {
    c.as_ref().map_or(0, |c| c.presentation.n_arrows())
}

/// Cell counts by dimension.
///
/// # Safety
/// All pointers must be valid; `c` must be a live complex handle.
#[no_mangle]
pub unsafe extern "C" fn kv_complex_counts(
    c: *const KvComplex,
    vertices: *mut usize,
    edges: *mut usize,
    faces: *mut usize,
) -> KvStatus {
    let Some(c) = c.as_ref() else {
        set_error("null complex");
        return KvStatus::InvalidArgument;
    };
    if vertices.is_null() || edges.is_null() || faces.is_null() {
        set_error("null output pointer");
        return KvStatus::InvalidArgument;
    }
    *vertices = c.complex.n_vertices();
    *edges = c.complex.n_edges();
    *faces = c.complex.n_faces();
    KvStatus::Ok
}

/// Euler characteristic.
///
/// # Safety
/// `c` must be a live complex handle.
#[no_mangle]
pub unsafe extern "C" fn kv_complex_euler(c: *const KvComplex) -> i64 {
    c.as_ref().map_or(0, |c| c.complex.euler_characteristic())
}

/// Validate raw complex JSON; writes a report
/// `{"valid": bool, "violations": [...]}`.
///
/// # Safety
/// `json` must be a valid string, `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kv_complex_validate_json(
    json: *const c_char,
    report: *mut *mut c_char,
) -> KvStatus {
    let text = match read_str(json) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let j: ComplexJson = match serde_json::from_str(text) {
        Ok(j) => j,
        Err(e) => {
            set_error(format!("bad JSON: {e}"));
            return KvStatus::InvalidArgument;
        }
    };
    let violations = ArrowPresentation::validate_raw(j.n_arrows, &j.t0, &j.t2);
    let body = serde_json::json!({
        "valid": violations.is_empty(),
        "violations": violations,
    });
    give_string(report, body.to_string())
}

/// Apply a transform (`dual`, `dual-alt`, `mirror`, `double`,
/// `dual-double`) and return a new complex handle.
///
/// # Safety
/// `c` must be a live handle, `op` a valid string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn kv_complex_transform(
    c: *const KvComplex,
    op: *const c_char,
    out: *mut *mut KvComplex,
) -> KvStatus {
    let Some(c) = c.as_ref() else {
        set_error("null complex");
        return KvStatus::InvalidArgument;
    };
    let op = match read_str(op) {
        Ok(s) => s,
        Err(st) => return st,
    };
    if out.is_null() {
        set_error("null output pointer");
        return KvStatus::InvalidArgument;
    }
    use kitaev_core::transform as t;
    let q = match op {
        "dual" => t::dual(&c.presentation),
        "dual-alt" => t::dual_alt(&c.presentation),
        "mirror" => t::mirror(&c.presentation),
        "double" => t::double(&c.presentation),
        "dual-double" => t::dual_of_double(&c.presentation),
        other => {
            set_error(format!("unknown transform `{other}`"));
            return KvStatus::Unsupported;
        }
    };
    match build_complex(&q) {
        Ok(complex) => {
            *out = Box::into_raw(Box::new(KvComplex {
                presentation: q,
                complex,
            }));
            KvStatus::Ok
        }
        Err(e) => {
            set_error(e);
            KvStatus::Validation
        }
    }
}

/// Serialize the complex to JSON.
///
/// # Safety
/// `c` must be a live handle, `json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kv_complex_to_json(
    c: *const KvComplex,
    json: *mut *mut c_char,
) -> KvStatus {
    let Some(c) = c.as_ref() else {
        set_error("null complex");
        return KvStatus::InvalidArgument;
    };
    match serde_json::to_string(&c.presentation.to_json()) {
        Ok(s) => give_string(json, s),
        Err(e) => {
            set_error(e);
            KvStatus::Numeric
        }
    }
}

/// Export the Schreier coset graph (`dot` or `graphml`).
///
/// # Safety
/// `c` must be a live handle; `format` a valid string; `doc` valid.
#[no_mangle]
pub unsafe extern "C" fn kv_schreier_export(
    c: *const KvComplex,
    format: *const c_char,
    doc: *mut *mut c_char,
) -> KvStatus {
    let Some(c) = c.as_ref() else {
        set_error("null complex");
        return KvStatus::InvalidArgument;
    };
    let format = match read_str(format) {
        Ok(s) => s,
        Err(st) => return st,
    };
    match kitaev_core::curves::schreier_export(&c.presentation, format) {
        Ok(s) => give_string(doc, s),
        Err(e) => {
            set_error(e);
            KvStatus::Unsupported
        }
    }
}

/// Classify a coded curve (`{"base_arrow": int, "word": "2+ 0- ..."}`);
/// writes `{"kind": ..., "proper": bool}`.
///
/// # Safety
/// `c` must be a live handle; `curve_json` a valid string; `report` valid.
#[no_mangle]
pub unsafe extern "C" fn kv_curve_classify(
    c: *const KvComplex,
    curve_json: *const c_char,
    report: *mut *mut c_char,
) -> KvStatus {
    let Some(c) = c.as_ref() else {
        set_error("null complex");
        return KvStatus::InvalidArgument;
    };
    let text = match read_str(curve_json) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let j: kitaev_core::curves::CurveJson = match serde_json::from_str(text) {
        Ok(j) => j,
        Err(e) => {
            set_error(format!("bad curve JSON: {e}"));
            return KvStatus::InvalidArgument;
        }
    };
    let Some(coded) = kitaev_core::curves::CodedCurve::from_json(&j) else {
        set_error("bad word tokens");
        return KvStatus::InvalidArgument;
    };
    if coded.base_arrow >= c.presentation.n_arrows() {
        set_error("base arrow out of range");
        return KvStatus::Validation;
    }
    let curve = kitaev_core::curves::decode(&c.presentation, &coded);
    let cls = kitaev_core::curves::classify_ribbon(&c.presentation, &curve);
    match serde_json::to_string(&cls) {
        Ok(s) => give_string(report, s),
        Err(e) => {
            set_error(e);
            KvStatus::Numeric
        }
    }
}

fn load_hopf(spec: &str) -> Result<HopfData, KvStatus> {
    if let Ok(h) = hopf_preset(spec) {
        return Ok(h);
    }
    let j: HopfJson = serde_json::from_str(spec).map_err(|e| {
        set_error(format!("not a preset name and not Hopf JSON: {e}"));
        KvStatus::InvalidArgument
    })?;
    HopfData::from_json(&j, "custom").map_err(|e| {
        set_error(e);
        KvStatus::Validation
    })
}

/// Create a model context from a complex and a Hopf preset name or JSON.
///
/// # Safety
/// `c` must be a live handle; `hopf` a valid string; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn kv_model_new(
    c: *const KvComplex,
    hopf: *const c_char,
    out: *mut *mut KvModel,
) -> KvStatus {
    let Some(c) = c.as_ref() else {
        set_error("null complex");
        return KvStatus::InvalidArgument;
    };
    let hopf = match read_str(hopf) {
        Ok(s) => s,
        Err(st) => return st,
    };
    if out.is_null() {
        set_error("null output pointer");
        return KvStatus::InvalidArgument;
    }
    let h = match load_hopf(hopf) {
        Ok(h) => h,
        Err(st) => return st,
    };
    if !c.presentation.is_connected() {
        set_error("model requires a connected complex");
        return KvStatus::Validation;
    }
    let model = Model::new(c.presentation.clone(), c.complex.clone(), h);
    *out = Box::into_raw(Box::new(KvModel { model }));
    KvStatus::Ok
}

/// Release a model handle.
///
/// # Safety
/// `m` must come from `kv_model_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn kv_model_free(m: *mut KvModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of the protected space, via the projector-rank procedure.
///
/// # Safety
/// `m` must be a live model handle; `dim` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kv_vacuum_dim(
    m: *const KvModel,
    seed: u64,
    mem_cap: usize,
    dim: *mut usize,
) -> KvStatus {
    let Some(m) = m.as_ref() else {
        set_error("null model");
        return KvStatus::InvalidArgument;
    };
    if dim.is_null() {
        set_error("null output pointer");
        return KvStatus::InvalidArgument;
    }
    match kitaev_core::states::vacuum_basis(
        &m.model,
        &kitaev_core::states::all_cells(&m.model),
        None,
        seed,
        mem_cap,
    ) {
        Ok(vb) => {
            *dim = vb.vectors.len();
            KvStatus::Ok
        }
        Err(e) => {
            set_error(e);
            KvStatus::Numeric
        }
    }
}

/// Run an identity suite (`relations`, `gauge`, `loops`, `ribbon`);
/// writes the residual report and the maximal residual.
///
/// # Safety
/// `m` must be a live model handle; `suite` a valid string; out
/// pointers valid.
#[no_mangle]
pub unsafe extern "C" fn kv_verify_suite(
    m: *const KvModel,
    suite: *const c_char,
    seed: u64,
    tol: f64,
    report: *mut *mut c_char,
    max_residual: *mut f64,
) -> KvStatus {
    let Some(m) = m.as_ref() else {
        set_error("null model");
        return KvStatus::InvalidArgument;
    };
    let suite = match read_str(suite) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let res = match suite {
        "relations" => kitaev_core::verify::suite_relations(&m.model, seed),
        "gauge" => kitaev_core::verify::suite_gauge(&m.model, seed),
        "loops" => kitaev_core::verify::suite_loops(&m.model, seed),
        "ribbon" => kitaev_core::verify::suite_ribbon(&m.model, seed),
        other => {
            set_error(format!("unknown suite `{other}`"));
            return KvStatus::Unsupported;
        }
    };
    match res {
        Ok(checks) => {
            let max = checks.iter().map(|c| c.1).fold(0.0, f64::max);
            if !max_residual.is_null() {
                *max_residual = max;
            }
            let body = serde_json::json!({
                "suite": suite,
                "checks": checks,
                "max_residual": max,
            });
            let st = give_string(report, body.to_string());
            if st != KvStatus::Ok {
                return st;
            }
            if max < tol {
                KvStatus::Ok
            } else {
                set_error(format!("max residual {max} above tolerance {tol}"));
                KvStatus::Numeric
            }
        }
        Err(e) => {
            set_error(e);
            KvStatus::Numeric
        }
    }
}
