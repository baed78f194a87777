//! C ABI for the entropy-cumulants engine.
//!
//! Exposes formula generation, numeric evaluation, and Monte Carlo
//! verification through opaque handles and integer status codes so other
//! languages can bind. All returned strings are heap-allocated and must be
//! released with [`ec_string_free`]. Handles are not thread-safe; use one
//! `EcEngine` per thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use entropy_cumulants::convert;
use entropy_cumulants::engine::{CumulantKey, Engine, StatKind};
use entropy_cumulants::numverify::{self, VerifyOptions};
use entropy_cumulants::symexpr::{EmitFormat, SymExpr};

/// Status codes; mirror the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EcStatus {
    /// Success.
    Ok = 0,
    /// Invalid argument.
    Usage = 1,
    /// Verification ran and at least one order failed its threshold.
    VerifyFailed = 2,
    /// Internal error; see `ec_last_error`.
    Internal = 3,
}

/// Output formats for formula strings.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EcFormat {
    Latex = 0,
    Json = 1,
    Text = 2,
}

impl From<EcFormat> for EmitFormat {
    fn from(f: EcFormat) -> EmitFormat {
        match f {
            EcFormat::Latex => EmitFormat::Latex,
            EcFormat::Json => EmitFormat::Json,
            EcFormat::Text => EmitFormat::Text,
        }
    }
}

/// Opaque engine handle.
pub struct EcEngine {
    inner: Engine,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let cleaned = msg.replace('\0', " ");
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(cleaned).unwrap_or_default();
    });
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ec_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Create an engine. `cache_dir` may be null for a purely in-memory store.
/// Returns null on failure (see `ec_last_error`).
///
/// # Safety
/// `cache_dir`, when non-null, must point to a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ec_engine_new(cache_dir: *const c_char) -> *mut EcEngine {
    let result = catch_unwind(|| {
        if cache_dir.is_null() {
            Ok(Engine::new())
        } else {
            let path = unsafe { CStr::from_ptr(cache_dir) };
            match path.to_str() {
                Ok(s) => Engine::with_cache_dir(PathBuf::from(s)).map_err(|e| e.to_string()),
                Err(_) => Err("cache_dir is not valid UTF-8".to_string()),
            }
        }
    });
    match result {
        Ok(Ok(engine)) => Box::into_raw(Box::new(EcEngine { inner: engine })),
        Ok(Err(msg)) => {
            set_error(&msg);
            std::ptr::null_mut()
        }
        Err(_) => {
            set_error("panic while creating engine");
            std::ptr::null_mut()
        }
    }
}

/// Release an engine handle. Null is ignored.
///
/// # Safety
/// `engine` must be null or a pointer returned by `ec_engine_new` that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ec_engine_free(engine: *mut EcEngine) {
    if !engine.is_null() {
        drop(unsafe { Box::from_raw(engine) });
    }
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string pointer produced by this library.
#[no_mangle]
pub unsafe extern "C" fn ec_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

fn write_out(out: *mut *mut c_char, value: String) -> EcStatus {
    if out.is_null() {
        set_error("output pointer is null");
        return EcStatus::Usage;
    }
    match CString::new(value) {
        Ok(cs) => {
            unsafe { *out = cs.into_raw() };
            EcStatus::Ok
        }
        Err(_) => {
            set_error("result contained an interior NUL byte");
            EcStatus::Internal
        }
    }
}

fn guarded(
    out: *mut *mut c_char,
    f: impl FnOnce() -> Result<String, (EcStatus, String)>,
) -> EcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(value)) => write_out(out, value),
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(&msg);
            EcStatus::Internal
        }
    }
}

fn engine_mut<'a>(engine: *mut EcEngine) -> Result<&'a mut Engine, (EcStatus, String)> {
    if engine.is_null() {
        return Err((EcStatus::Usage, "engine handle is null".to_string()));
    }
    Ok(unsafe { &mut (*engine).inner })
}

fn parse_kind(kind: c_char) -> Result<StatKind, (EcStatus, String)> {
    match kind as u8 {
        b'T' | b't' => Ok(StatKind::Tk),
        b'R' | b'r' => Ok(StatKind::Rk),
        other => Err((
            EcStatus::Usage,
            format!("unknown statistic kind {:?}, expected 'T' or 'R'", other as char),
        )),
    }
}

fn resolve(
    engine: &mut Engine,
    of: c_char,
    order: u32,
    joint: Option<(StatKind, u32)>,
) -> Result<SymExpr, (EcStatus, String)> {
    if order < 1 {
        return Err((EcStatus::Usage, "order must be at least 1".to_string()));
    }
    match (of as u8, joint) {
        (b'S' | b's', None) => {
            convert::cumulant_s(engine, order).map_err(|e| (EcStatus::Internal, e.to_string()))
        }
        (b'S' | b's', Some(_)) => Err((
            EcStatus::Usage,
            "joint cumulants are defined on the induced-entropy side only".to_string(),
        )),
        (b'T' | b't', None) => {
            engine.cumulant_t(order).map_err(|e| (EcStatus::Internal, e.to_string()))
        }
        (b'T' | b't', Some((kind, k))) => engine
            .joint_cumulant(&CumulantKey::new(kind, k, order))
            .map_err(|e| (EcStatus::Internal, e.to_string())),
        (other, _) => Err((
            EcStatus::Usage,
            format!("unknown target {:?}, expected 'S' or 'T'", other as char),
        )),
    }
}

/// Closed-form cumulant `kappa_order(S)` or `kappa_order(T)` as a string in
/// the requested format.
///
/// # Safety
/// `engine` must be a live handle and `out` a valid output pointer.
#[no_mangle]
pub unsafe extern "C" fn ec_cumulant_formula(
    engine: *mut EcEngine,
    of: c_char,
    order: u32,
    format: EcFormat,
    out: *mut *mut c_char,
) -> EcStatus {
    guarded(out, || {
        let eng = engine_mut(engine)?;
        let expr = resolve(eng, of, order, None)?;
        Ok(emit(&expr, format, &label(of, order, None)))
    })
}

/// Joint cumulant `kappa_order(X_k, T, ..., T)` for `X` in `{T, R}`.
///
/// # Safety
/// `engine` must be a live handle and `out` a valid output pointer.
#[no_mangle]
pub unsafe extern "C" fn ec_joint_cumulant_formula(
    engine: *mut EcEngine,
    kind: c_char,
    k: u32,
    order: u32,
    format: EcFormat,
    out: *mut *mut c_char,
) -> EcStatus {
    guarded(out, || {
        let eng = engine_mut(engine)?;
        let stat = parse_kind(kind)?;
        let expr = resolve(eng, 'T' as c_char, order, Some((stat, k)))?;
        Ok(emit(&expr, format, &label('T' as c_char, order, Some((stat, k)))))
    })
}

/// Mean formula of the ancillary statistic `T_k` or `R_k`.
///
/// # Safety
/// `engine` must be a live handle and `out` a valid output pointer.
#[no_mangle]
pub unsafe extern "C" fn ec_mean_formula(
    engine: *mut EcEngine,
    kind: c_char,
    k: u32,
    format: EcFormat,
    out: *mut *mut c_char,
) -> EcStatus {
    guarded(out, || {
        let eng = engine_mut(engine)?;
        let stat = parse_kind(kind)?;
        let expr = match stat {
            StatKind::Tk => eng.mean_t(k),
            StatKind::Rk => eng.mean_r(k),
        }
        .map_err(|e| (EcStatus::Internal, e.to_string()))?;
        let tag = match stat {
            StatKind::Tk => "t",
            StatKind::Rk => "r",
        };
        Ok(emit(&expr, format, &format!("mean_{tag}_{k}")))
    })
}

/// Evaluate `kappa_order` at integer dimensions, rendered with `digits`
/// significant decimal digits.
///
/// # Safety
/// `engine` must be a live handle and `out` a valid output pointer.
#[no_mangle]
pub unsafe extern "C" fn ec_eval_cumulant(
    engine: *mut EcEngine,
    of: c_char,
    order: u32,
    m: u32,
    n: u32,
    digits: u32,
    out: *mut *mut c_char,
) -> EcStatus {
    guarded(out, || {
        if m < 1 || m > n {
            return Err((EcStatus::Usage, "dimensions must satisfy 1 <= m <= n".to_string()));
        }
        if digits < 1 || digits > 1_000 {
            return Err((EcStatus::Usage, "digits must be in 1..=1000".to_string()));
        }
        let eng = engine_mut(engine)?;
        let expr = resolve(eng, of, order, None)?;
        let v = numverify::eval_expr(&expr, m, n, digits as usize + 5)
            .map_err(|e| (EcStatus::Internal, e.to_string()))?;
        Ok(v.to_decimal(digits as usize))
    })
}

/// Monte Carlo verification of `kappa_l(S)` for the given orders; writes the
/// JSON report and returns `VerifyFailed` when any order misses its
/// threshold.
///
/// # Safety
/// `engine` must be a live handle, `orders` must point to `norders` entries,
/// and `out_report_json` must be a valid output pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn ec_verify(
    engine: *mut EcEngine,
    m: u32,
    n: u32,
    orders: *const u32,
    norders: usize,
    samples: u64,
    seed: u64,
    threshold: f64,
    workers: u32,
    out_report_json: *mut *mut c_char,
) -> EcStatus {
    let mut failed = false;
    let status = guarded(out_report_json, || {
        if m < 1 || m > n || n > 64 {
            return Err((
                EcStatus::Usage,
                "verification requires 1 <= m <= n <= 64".to_string(),
            ));
        }
        if orders.is_null() || norders == 0 {
            return Err((EcStatus::Usage, "orders must be non-empty".to_string()));
        }
        let orders = unsafe { std::slice::from_raw_parts(orders, norders) }.to_vec();
        if orders.iter().any(|&o| !(1..=numverify::MAX_ORDER).contains(&o)) {
            return Err((EcStatus::Usage, "orders must lie in 1..=6".to_string()));
        }
        if !(threshold.is_finite() && threshold > 0.0) {
            return Err((EcStatus::Usage, "threshold must be positive".to_string()));
        }
        let eng = engine_mut(engine)?;
        let mut exact = Vec::new();
        for &order in &orders {
            let expr = convert::cumulant_s(eng, order)
                .map_err(|e| (EcStatus::Internal, e.to_string()))?;
            exact.push((order, expr));
        }
        let opts = VerifyOptions {
            m,
            n,
            orders,
            samples,
            seed,
            threshold,
            workers: workers.max(1) as usize,
            precision: numverify::DEFAULT_PRECISION,
        };
        let report =
            numverify::verify(&opts, &exact).map_err(|e| (EcStatus::Internal, e.to_string()))?;
        failed = !report.all_pass();
        Ok(report.to_json_string())
    });
    if status == EcStatus::Ok && failed {
        EcStatus::VerifyFailed
    } else {
        status
    }
}

fn emit(expr: &SymExpr, format: EcFormat, label: &str) -> String {
    match format {
        EcFormat::Json => expr.to_json_string(Some(label)),
        other => expr.emit(EmitFormat::from(other)),
    }
}

fn label(of: c_char, order: u32, joint: Option<(StatKind, u32)>) -> String {
    match (of as u8, joint) {
        (b'S' | b's', _) => format!("cumulant_s_{order}"),
        (_, Some((kind, k))) => format!("joint_{kind}_{k}_order_{order}"),
        _ => format!("cumulant_t_{order}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn take_string(ptr: *mut c_char) -> String {
        assert!(!ptr.is_null());
        let s = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
        unsafe { ec_string_free(ptr) };
        s
    }

    #[test]
    fn formula_eval_and_errors_through_the_c_surface() {
        unsafe {
            let engine = ec_engine_new(std::ptr::null());
            assert!(!engine.is_null());

            let mut out: *mut c_char = std::ptr::null_mut();
            let st = ec_cumulant_formula(engine, 'S' as c_char, 2, EcFormat::Latex, &mut out);
            assert_eq!(st, EcStatus::Ok);
            let latex = take_string(out);
            assert!(latex.contains("\\psi_{1}(mn)"), "{latex}");
            assert!(latex.contains("\\psi_{1}(n)"));

            let mut out = std::ptr::null_mut();
            let st = ec_eval_cumulant(engine, 'S' as c_char, 1, 2, 2, 30, &mut out);
            assert_eq!(st, EcStatus::Ok);
            assert_eq!(take_string(out), "0.333333333333333333333333333333");

            // JSON round-trips through the library parser
            let mut out = std::ptr::null_mut();
            let st = ec_cumulant_formula(engine, 'T' as c_char, 1, EcFormat::Json, &mut out);
            assert_eq!(st, EcStatus::Ok);
            let json = take_string(out);
            assert!(SymExpr::from_json_str(&json).is_ok());

            // usage errors surface as EC_USAGE with a message
            let mut out = std::ptr::null_mut();
            let st = ec_cumulant_formula(engine, 'X' as c_char, 2, EcFormat::Text, &mut out);
            assert_eq!(st, EcStatus::Usage);
            let msg = CStr::from_ptr(ec_last_error()).to_str().unwrap();
            assert!(msg.contains("unknown target"));

            let mut out = std::ptr::null_mut();
            let st = ec_eval_cumulant(engine, 'S' as c_char, 1, 3, 2, 30, &mut out);
            assert_eq!(st, EcStatus::Usage);

            ec_engine_free(engine);
            // freeing null is a no-op
            ec_engine_free(std::ptr::null_mut());
            ec_string_free(std::ptr::null_mut());
        }
    }

    #[test]
    fn joint_and_mean_formulas() {
        unsafe {
            let engine = ec_engine_new(std::ptr::null());
            let mut out: *mut c_char = std::ptr::null_mut();
            let st =
                ec_joint_cumulant_formula(engine, 'R' as c_char, 1, 2, EcFormat::Text, &mut out);
            assert_eq!(st, EcStatus::Ok);
            let joint = take_string(out);
            assert!(joint.contains("psi_0(m+alpha)"), "{joint}");

            let mut out = std::ptr::null_mut();
            let st = ec_mean_formula(engine, 'R' as c_char, 2, EcFormat::Text, &mut out);
            assert_eq!(st, EcStatus::Ok);
            let mean = take_string(out);
            assert!(mean.contains("m^3"), "{mean}");
            ec_engine_free(engine);
        }
    }

    #[test]
    fn verify_through_the_c_surface() {
        unsafe {
            let engine = ec_engine_new(std::ptr::null());
            let orders = [1u32, 2u32];
            let mut out: *mut c_char = std::ptr::null_mut();
            let st = ec_verify(
                engine,
                2,
                2,
                orders.as_ptr(),
                orders.len(),
                20_000,
                7,
                4.0,
                2,
                &mut out,
            );
            assert_eq!(st, EcStatus::Ok);
            let report = take_string(out);
            assert!(report.contains("\"pass\": true"), "{report}");
            ec_engine_free(engine);
        }
    }
}
