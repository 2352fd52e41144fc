//! C interface. Models are opaque handles; every call returns a `CjStatus`
//! and the message of the last failure on the calling thread is kept for
//! `cj_last_error`.

use critjac::coeffs::AcSet;
use critjac::recurrence::poly_eval;
use critjac::solutions::JostOptions;
use critjac::spectral::{density, discrete_eigenvalues, EigenOptions};
use critjac::{classify, CoefficientModel, CriticalParams, Error, SpectralPoint};
use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result codes. The nonzero values split failures the same way as the
/// command-line exit codes, plus codes for misuse of the interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CjStatus {
    Ok = 0,
    NullPointer = 1,
    /// The coefficients fall outside the supported regime.
    Regime = 2,
    /// A numerical procedure failed (truncation, branch point, unresolved grid).
    Numeric = 3,
    /// Bad parameters, or a point outside the operation's domain.
    Domain = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Opaque model handle: coefficients plus their classification.
pub struct CjModel {
    model: CoefficientModel,
    params: CriticalParams,
}

/// Kind of absolutely continuous set.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CjAcKind {
    Empty = 0,
    WholeLine = 1,
    /// `(ac_lo, +inf)` or `(-inf, ac_hi)`.
    HalfLine = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CjClassification {
    pub sigma: f64,
    pub gamma: f64,
    pub tau: f64,
    pub rho: f64,
    pub nu: f64,
    pub delta: f64,
    pub depth: usize,
    pub ac_kind: CjAcKind,
    pub ac_lo: f64,
    pub ac_hi: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CjDensity {
    pub lambda: f64,
    pub xi: f64,
    pub kappa: f64,
    pub eta: f64,
    pub w: f64,
}

/// Which value of `z` to use when it is real.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CjSide {
    Interior = 0,
    /// `λ + i0`.
    Plus = 1,
    /// `λ - i0`.
    Minus = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CjStatus {
    match critjac::cli::exit_code(e) {
        2 => CjStatus::Regime,
        3 => CjStatus::Numeric,
        _ => CjStatus::Domain,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CjStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CjStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            let s = status_of(&e);
            set_error(format!("{e} ({})", e.kind()));
            s
        }
        Ok(Err(Fail::Ffi(s, msg))) => {
            set_error(msg.into());
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            CjStatus::Panic
        }
    }
}

enum Fail {
    Lib(Error),
    Ffi(CjStatus, &'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

const NULL: Fail = Fail::Ffi(CjStatus::NullPointer, "null pointer argument");

unsafe fn model_ref<'a>(m: *const CjModel) -> Result<&'a CjModel, Fail> {
    m.as_ref().ok_or(NULL)
}

fn store(model: CoefficientModel, out: *mut *mut CjModel) -> Result<(), Fail> {
    if out.is_null() {
        return Err(NULL);
    }
    let params = classify(&model)?;
    // SAFETY: checked non-null above; the caller provides writable storage
    unsafe { *out = Box::into_raw(Box::new(CjModel { model, params })) };
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cj_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Laguerre model with parameter `p > -1`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn cj_model_laguerre(p: f64, out: *mut *mut CjModel) -> CjStatus {
    guard(|| store(critjac::laguerre_model(p)?, out))
}

/// Power model `a_n = n^σ(1 + α/n)`, `b_n = 2γ n^σ(1 + β/n)`, with `a_0 = 1`, `b_0 = 0`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn cj_model_power(sigma: f64, alpha: f64, beta: f64, gamma: f64, out: *mut *mut CjModel) -> CjStatus {
    guard(|| store(critjac::power_model(sigma, alpha, beta, gamma)?, out))
}

/// Model from a JSON description such as `{"kind": "laguerre", "p": 0.5}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn cj_model_from_json(json: *const c_char, out: *mut *mut CjModel) -> CjStatus {
    guard(|| {
        if json.is_null() {
            return Err(NULL);
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Fail::Ffi(CjStatus::Domain, "model JSON is not UTF-8"))?;
        let spec = critjac::cli::parse_model_spec(text)?;
        store(CoefficientModel::from_spec(&spec)?, out)
    })
}

/// Releases a model. NULL is ignored.
///
/// # Safety
/// `model` must come from one of the constructors and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cj_model_free(model: *mut CjModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn cj_classify(model: *const CjModel, out: *mut CjClassification) -> CjStatus {
    guard(|| {
        let m = model_ref(model)?;
        let out = out.as_mut().ok_or(NULL)?;
        let p = &m.params;
        let (ac_kind, ac_lo, ac_hi) = match p.ac_set {
            AcSet::Empty => (CjAcKind::Empty, f64::NAN, f64::NAN),
            AcSet::WholeLine => (CjAcKind::WholeLine, f64::NEG_INFINITY, f64::INFINITY),
            AcSet::HalfLine { threshold, upward: true } => (CjAcKind::HalfLine, threshold, f64::INFINITY),
            AcSet::HalfLine { threshold, upward: false } => (CjAcKind::HalfLine, f64::NEG_INFINITY, threshold),
        };
        *out = CjClassification {
            sigma: p.sigma,
            gamma: p.gamma,
            tau: p.tau,
            rho: p.rho,
            nu: p.nu,
            delta: p.delta,
            depth: p.l,
            ac_kind,
            ac_lo,
            ac_hi,
        };
        Ok(())
    })
}

/// Spectral density at `lambda`.
///
/// # Safety
/// `model` must be a live handle; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn cj_density(model: *const CjModel, lambda: f64, out: *mut CjDensity) -> CjStatus {
    guard(|| {
        let m = model_ref(model)?;
        let out = out.as_mut().ok_or(NULL)?;
        let d = density(lambda, &m.params, &m.model, &JostOptions::default())?;
        *out = CjDensity { lambda: d.lambda, xi: d.xi, kappa: d.kappa, eta: d.eta, w: d.w };
        Ok(())
    })
}

/// Jost function `Ω(z)` at `z = re + i·im`; `side` selects the boundary value for real `z`.
///
/// # Safety
/// `model` must be a live handle; `out_re`, `out_im` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn cj_omega(
    model: *const CjModel,
    re: f64,
    im: f64,
    side: CjSide,
    out_re: *mut f64,
    out_im: *mut f64,
) -> CjStatus {
    guard(|| {
        let m = model_ref(model)?;
        if out_re.is_null() || out_im.is_null() {
            return Err(NULL);
        }
        let zp = match side {
            CjSide::Interior => SpectralPoint::interior(Complex64::new(re, im)),
            _ if im != 0.0 => return Err(Fail::Ffi(CjStatus::Domain, "boundary side given for non-real z")),
            CjSide::Plus => SpectralPoint::plus(re),
            CjSide::Minus => SpectralPoint::minus(re),
        };
        let om = critjac::solutions::omega(&zp, &m.params, &m.model, &JostOptions::default())?;
        *out_re = om.re;
        *out_im = om.im;
        Ok(())
    })
}

/// `P_0(z) .. P_{n_max}(z)` as `ln|P_n|` and `arg P_n`; both buffers hold `n_max + 1` entries.
///
/// # Safety
/// `model` must be a live handle; the buffers must be valid for `n_max + 1` writes.
#[no_mangle]
pub unsafe extern "C" fn cj_poly_eval(
    model: *const CjModel,
    re: f64,
    im: f64,
    n_max: usize,
    log_abs: *mut f64,
    phase: *mut f64,
) -> CjStatus {
    guard(|| {
        let m = model_ref(model)?;
        if log_abs.is_null() || phase.is_null() {
            return Err(NULL);
        }
        let seq = poly_eval(&m.model, Complex64::new(re, im), n_max);
        let la = std::slice::from_raw_parts_mut(log_abs, n_max + 1);
        let ph = std::slice::from_raw_parts_mut(phase, n_max + 1);
        for n in 0..=n_max {
            let v = seq.get(n as i64);
            la[n] = v.ln_abs();
            ph[n] = v.arg();
        }
        Ok(())
    })
}

/// Eigenvalues in `[lo, hi]`. `count` receives the number found; if it
/// exceeds `capacity` only the first `capacity` are written and
/// `CJ_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `model` must be a live handle; `out` must be valid for `capacity` writes; `count` for one.
#[no_mangle]
pub unsafe extern "C" fn cj_eigenvalues(
    model: *const CjModel,
    lo: f64,
    hi: f64,
    out: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> CjStatus {
    guard(|| {
        let m = model_ref(model)?;
        let count = count.as_mut().ok_or(NULL)?;
        if out.is_null() && capacity > 0 {
            return Err(NULL);
        }
        let report = discrete_eigenvalues(lo, hi, &m.params, &m.model, &EigenOptions::default())?;
        *count = report.eigenvalues.len();
        for (i, e) in report.eigenvalues.iter().take(capacity).enumerate() {
            *out.add(i) = e.omega_zero;
        }
        if report.eigenvalues.len() > capacity {
            return Err(Fail::Ffi(CjStatus::BufferTooSmall, "eigenvalue buffer too small"));
        }
        Ok(())
    })
}
