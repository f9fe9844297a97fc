//! C ABI over the `jsrcert` core.
//!
//! Objects cross the boundary as opaque handles created by `*_new` or
//! producer functions and released by the matching `*_free`. Every fallible
//! function returns a [`JsrcertStatus`]; on failure the message is available
//! from [`jsrcert_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use jsrcert::data::{self, DataPairSet, OutputTrajectories, SampleSet, ZetaStats};
use jsrcert::guarantees::{self, BoundInputs, ConfidenceParams, Provenance, Verdict};
use jsrcert::model::{self, SwitchedLinearSystem, DEFAULT_BUDGET};
use jsrcert::solver::{self, CertificateSolution, ScenarioProblem, SolverOptions};
use jsrcert::Error;
use nalgebra::{DMatrix, DVector};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JsrcertStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    /// Singular Gram matrix, degenerate pair or undecided inner solve.
    Numerical = 4,
    Budget = 5,
    Infeasible = 6,
    Io = 7,
    Format = 8,
    Panic = 9,
}

/// Stability verdict of a certification report.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JsrcertVerdict {
    CertifiedStable = 0,
    Inconclusive = 1,
}

/// Opaque switched linear system.
pub struct JsrcertSystem(SwitchedLinearSystem);

/// Opaque set of sampled output trajectories.
pub struct JsrcertSamples {
    outputs: OutputTrajectories,
    n: usize,
    modes: usize,
}

/// Opaque scenario certificate with the pair statistics it was built from.
pub struct JsrcertCertificate {
    solution: CertificateSolution,
    zeta: ZetaStats,
    pairs: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> JsrcertStatus {
    match err {
        Error::InvalidMode { .. } | Error::InvalidSystem(_) | Error::InvalidParameter(_) | Error::DegenerateHorizon => {
            JsrcertStatus::InvalidArgument
        }
        Error::Dimension(_) => JsrcertStatus::Dimension,
        Error::SingularGram { .. } | Error::DegeneratePair { .. } | Error::Indeterminate { .. } => {
            JsrcertStatus::Numerical
        }
        Error::BudgetExceeded { .. } => JsrcertStatus::Budget,
        Error::ParameterInfeasible(_) => JsrcertStatus::Infeasible,
        Error::Io(_) => JsrcertStatus::Io,
        Error::Format(_) | Error::Json(_) => JsrcertStatus::Format,
    }
}

struct Failure(JsrcertStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(JsrcertStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> JsrcertStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            JsrcertStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            JsrcertStatus::Panic
        }
    }
}

unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn out_ptr<'a, T>(out: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    out.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(h: *const T, what: &str) -> Result<&'a T, Failure> {
    h.as_ref().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn jsrcert_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn jsrcert_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---- systems -----------------------------------------------------------

/// Builds a system from row-major matrices: `a` holds `modes` blocks of
/// `n*n` values, `c` holds `modes` blocks of `p*n` values.
///
/// # Safety
/// `a` and `c` must point to that many doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jsrcert_system_new(
    n: usize,
    modes: usize,
    p: usize,
    a: *const f64,
    c: *const f64,
    out: *mut *mut JsrcertSystem,
) -> JsrcertStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let a = slice(a, modes * n * n, "a")?;
        let c = slice(c, modes * p * n, "c")?;
        let a = a.chunks(n * n).map(|b| DMatrix::from_row_slice(n, n, b)).collect();
        let c = c.chunks(p * n).map(|b| DMatrix::from_row_slice(p, n, b)).collect();
        let sys = SwitchedLinearSystem::new(a, c)?;
        *out = Box::into_raw(Box::new(JsrcertSystem(sys)));
        Ok(())
    })
}

/// Parses a system from its JSON file format.
///
/// # Safety
/// `json` must be a nul-terminated UTF-8 string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jsrcert_system_from_json(json: *const c_char, out: *mut *mut JsrcertSystem) -> JsrcertStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Failure(JsrcertStatus::Format, "json is not UTF-8".into()))?;
        *out = Box::into_raw(Box::new(JsrcertSystem(SwitchedLinearSystem::from_json(text)?)));
        Ok(())
    })
}

/// # Safety
/// `sys` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn jsrcert_system_free(sys: *mut JsrcertSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Enumeration bracket on the joint spectral radius over products of
/// length up to `q_max`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn jsrcert_jsr_bracket(
    sys: *const JsrcertSystem,
    q_max: usize,
    lower: *mut f64,
    upper: *mut f64,
) -> JsrcertStatus {
    guard(|| {
        let sys = handle(sys, "sys")?;
        let (lo, hi) = (out_ptr(lower, "lower")?, out_ptr(upper, "upper")?);
        let b = model::jsr_bracket(&sys.0, q_max, DEFAULT_BUDGET)?;
        *lo = b.lower;
        *hi = b.upper;
        Ok(())
    })
}

// ---- samples -----------------------------------------------------------

/// Draws `count` trajectories of length `horizon` from the system.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn jsrcert_collect(
    sys: *const JsrcertSystem,
    count: usize,
    horizon: usize,
    seed: u64,
    out: *mut *mut JsrcertSamples,
) -> JsrcertStatus {
    guard(|| {
        let sys = handle(sys, "sys")?;
        let out = out_ptr(out, "out")?;
        let set: SampleSet = data::collect(&sys.0, count, horizon, seed)?;
        let (n, modes) = (set.n, set.modes);
        *out = Box::into_raw(Box::new(JsrcertSamples {
            outputs: set.into_outputs(),
            n,
            modes,
        }));
        Ok(())
    })
}

/// Wraps externally measured outputs: `y` holds `count` trajectories, each
/// `horizon` outputs of `p` values, trajectory-major. `n` and `modes`
/// describe the unseen system.
///
/// # Safety
/// `y` must point to `count*horizon*p` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jsrcert_samples_from_outputs(
    n: usize,
    modes: usize,
    p: usize,
    horizon: usize,
    count: usize,
    y: *const f64,
    seed: u64,
    out: *mut *mut JsrcertSamples,
) -> JsrcertStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if n == 0 || modes == 0 || p == 0 || horizon == 0 || count == 0 {
            return Err(Failure(JsrcertStatus::InvalidArgument, "all sizes must be positive".into()));
        }
        let y = slice(y, count * horizon * p, "y")?;
        let traj = y
            .chunks(horizon * p)
            .map(|t| t.chunks(p).map(DVector::from_row_slice).collect())
            .collect();
        let outputs = OutputTrajectories::new(p, horizon, seed, traj)?;
        *out = Box::into_raw(Box::new(JsrcertSamples { outputs, n, modes }));
        Ok(())
    })
}

/// # Safety
/// `samples` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn jsrcert_samples_free(samples: *mut JsrcertSamples) {
    if !samples.is_null() {
        drop(Box::from_raw(samples));
    }
}

// ---- certificates ------------------------------------------------------

fn pairs_of(samples: &JsrcertSamples, k: usize) -> Result<DataPairSet, Failure> {
    Ok(data::extract_pairs(&samples.outputs, k)?)
}

/// Solves the scenario program on the samples with window `k`. A
/// non-positive `tol_bisect` selects the default tolerance.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn jsrcert_solve(
    samples: *const JsrcertSamples,
    k: usize,
    lambda_bar: f64,
    tol_bisect: f64,
    out: *mut *mut JsrcertCertificate,
) -> JsrcertStatus {
    guard(|| {
        let samples = handle(samples, "samples")?;
        let out = out_ptr(out, "out")?;
        let pairs = pairs_of(samples, k)?;
        let zeta = data::zeta_stats(&pairs)?;
        let count = pairs.len();
        let mut options = SolverOptions::default();
        if tol_bisect > 0.0 {
            options.tol_bisect = tol_bisect;
        }
        let solution = solver::solve(&ScenarioProblem::new(pairs, lambda_bar, options)?)?;
        *out = Box::into_raw(Box::new(JsrcertCertificate {
            solution,
            zeta,
            pairs: count,
        }));
        Ok(())
    })
}

/// # Safety
/// `cert` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn jsrcert_certificate_free(cert: *mut JsrcertCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

/// Optimal rate `γ*`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn jsrcert_certificate_gamma(cert: *const JsrcertCertificate, gamma: *mut f64) -> JsrcertStatus {
    guard(|| {
        *out_ptr(gamma, "gamma")? = handle(cert, "cert")?.solution.gamma_star;
        Ok(())
    })
}

/// Condition number of `P*`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn jsrcert_certificate_kappa(cert: *const JsrcertCertificate, kappa: *mut f64) -> JsrcertStatus {
    guard(|| {
        *out_ptr(kappa, "kappa")? = handle(cert, "cert")?.solution.kappa_p;
        Ok(())
    })
}

/// Copies `P*` row-major into `buf`, which holds `len` doubles. `dim`
/// receives the side length `kp`; call with `buf = NULL` to query it.
///
/// # Safety
/// Pointers must be valid; `buf` may be null.
#[no_mangle]
pub unsafe extern "C" fn jsrcert_certificate_p_star(
    cert: *const JsrcertCertificate,
    buf: *mut f64,
    len: usize,
    dim: *mut usize,
) -> JsrcertStatus {
    guard(|| {
        let cert = handle(cert, "cert")?;
        let kp = cert.solution.kp();
        *out_ptr(dim, "dim")? = kp;
        if buf.is_null() {
            return Ok(());
        }
        if len < kp * kp {
            return Err(Failure(JsrcertStatus::Dimension, format!("buffer holds {len} values, need {}", kp * kp)));
        }
        let out = std::slice::from_raw_parts_mut(buf, kp * kp);
        out.copy_from_slice(&jsrcert::linalg::to_row_major(&cert.solution.p_star));
        Ok(())
    })
}

/// Evaluates the bounds and verdict at confidence `1 - beta` and writes the
/// JSON report to `json` (release with [`jsrcert_string_free`]). `sys` may
/// be null for a data-only report; `c <= 0` omits the a-priori bound.
///
/// # Safety
/// `cert` must be valid; `sys` may be null; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn jsrcert_certify(
    cert: *const JsrcertCertificate,
    samples: *const JsrcertSamples,
    sys: *const JsrcertSystem,
    beta: f64,
    c: f64,
    verdict: *mut JsrcertVerdict,
    json: *mut *mut c_char,
) -> JsrcertStatus {
    guard(|| {
        let cert = handle(cert, "cert")?;
        let samples = handle(samples, "samples")?;
        let verdict = out_ptr(verdict, "verdict")?;
        let json = out_ptr(json, "json")?;
        let s = &cert.solution;
        let params = ConfidenceParams::new(beta, s.k, s.p, cert.pairs as u64)?;
        let chi = match sys.as_ref() {
            Some(sys) => Some(model::chi(&sys.0, &s.p_star, s.k, DEFAULT_BUDGET)?),
            None => None,
        };
        let inputs = BoundInputs {
            n: samples.n,
            modes: samples.modes,
            params,
            zeta: cert.zeta,
            chi,
            c: (c > 0.0).then_some(c),
            route: None,
        };
        let provenance = Provenance {
            seed: samples.outputs.seed(),
            n_samples: cert.pairs as u64,
            horizon: s.horizon,
            k: s.k,
            p: s.p,
            n: samples.n,
            modes: samples.modes,
            lambda_bar: s.lambda_bar,
            tol_bisect: s.diagnostics.tol_bisect,
            tol_inner: s.diagnostics.tol_inner,
            inner_solver: Some(s.diagnostics.inner_solver),
            ..Default::default()
        };
        let report = guarantees::certification_report(s, &inputs, provenance)?;
        *verdict = match report.verdict {
            Verdict::CertifiedStable => JsrcertVerdict::CertifiedStable,
            Verdict::Inconclusive => JsrcertVerdict::Inconclusive,
        };
        *json = CString::new(report.to_json()).expect("JSON has no nul").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn jsrcert_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---- special functions -------------------------------------------------

/// Spherical-cap shrink factor `δ(ε)` in dimension `n`.
///
/// # Safety
/// `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jsrcert_delta(epsilon: f64, n: usize, value: *mut f64) -> JsrcertStatus {
    guard(|| {
        *out_ptr(value, "value")? = guarantees::delta(epsilon, n)?;
        Ok(())
    })
}

/// Scenario confidence deficit `φ(ε; d, N)`.
///
/// # Safety
/// `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jsrcert_phi(epsilon: f64, d: u64, n_samples: u64, value: *mut f64) -> JsrcertStatus {
    guard(|| {
        *out_ptr(value, "value")? = guarantees::phi(epsilon, d, n_samples)?;
        Ok(())
    })
}
