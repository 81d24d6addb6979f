//! C interface to `fermi-ent`.
//!
//! States are opaque `FeState` handles freed with `fe_state_free`. Every
//! fallible call returns an `FeStatus`; on failure the message is available
//! from `fe_last_error` until the next call on the same thread. Strings
//! returned through `char **` out-parameters are freed with `fe_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fermi_ent::dm::{build_dm, build_ghz, build_paired_state, entropy, spectrum};
use fermi_ent::fock::FermionState;
use fermi_ent::random::{compute_a2, sample_random_state};
use fermi_ent::report::search_json;
use fermi_ent::search::{search_maximal_state, verify_maximal, ExistenceVerdict, SearchBudget};
use fermi_ent::statefile::{parse_state_file, write_state_file};
use fermi_ent::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeStatus {
    Ok = 0,
    InvalidArgument = 1,
    Parse = 2,
    Validation = 3,
    Numerical = 4,
    ResourceExhausted = 5,
    Io = 6,
    NullPointer = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Verdict of `fe_search`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeVerdict {
    NotExists = 0,
    ExistsWithState = 1,
    ExistsSteinerOnly = 2,
    ExhaustedNoSolution = 3,
    Unknown = 4,
}

/// Opaque N-fermion state.
pub struct FeState(FermionState);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FeStatus {
    match e {
        Error::InvalidArgument(_) => FeStatus::InvalidArgument,
        Error::Parse { .. } | Error::Json(_) => FeStatus::Parse,
        Error::Validation(_) => FeStatus::Validation,
        Error::NumericalFailure(_) => FeStatus::Numerical,
        Error::ResourceExhausted(_) => FeStatus::ResourceExhausted,
        Error::Io(_) => FeStatus::Io,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Buffer(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FeStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FeStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            FeStatus::NullPointer
        }
        Ok(Err(Failure::Buffer(need))) => {
            set_error(format!("buffer too small, need {need}"));
            FeStatus::BufferTooSmall
        }
        Err(_) => {
            set_error("internal panic".into());
            FeStatus::Panic
        }
    }
}

unsafe fn state_ref<'a>(p: *const FeState) -> Result<&'a FermionState, Failure> {
    p.as_ref().map(|s| &s.0).ok_or(Failure::Null("state"))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("output"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_state(out: *mut *mut FeState, s: FermionState) -> Result<(), Failure> {
    put(out, Box::into_raw(Box::new(FeState(s))))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Error::Validation("string contains NUL".into()))?;
    put(out, c.into_raw())
}

/// Message of the last failed call on this thread, or NULL. Valid until the next call.
#[no_mangle]
pub extern "C" fn fe_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fe_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fe_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `state` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fe_state_free(state: *mut FeState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fe_state_ghz(d: usize, r: usize, out: *mut *mut FeState) -> FeStatus {
    guard(|| put_state(out, build_ghz(d, r)?))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fe_state_paired(d: usize, k: usize, out: *mut *mut FeState) -> FeStatus {
    guard(|| put_state(out, build_paired_state(d, k)?))
}

/// Gaussian random state on all `C(D,N)` determinants.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fe_state_random(
    d: usize,
    n: usize,
    seed: u64,
    out: *mut *mut FeState,
) -> FeStatus {
    guard(|| put_state(out, sample_random_state(d, n, seed)?))
}

/// Parses a JSON state file.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fe_state_from_json(
    json: *const c_char,
    renormalize: bool,
    out: *mut *mut FeState,
) -> FeStatus {
    guard(|| {
        if json.is_null() {
            return Err(Failure::Null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| Error::Parse {
            line: 0,
            message: e.to_string(),
        })?;
        put_state(out, parse_state_file(text, renormalize)?)
    })
}

/// # Safety
/// `state` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fe_state_to_json(
    state: *const FeState,
    out: *mut *mut c_char,
) -> FeStatus {
    guard(|| put_string(out, write_state_file(state_ref(state)?)))
}

/// # Safety
/// `state` must be a live handle; the outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fe_state_shape(
    state: *const FeState,
    num_orbitals: *mut usize,
    num_particles: *mut usize,
    num_terms: *mut usize,
) -> FeStatus {
    guard(|| {
        let s = state_ref(state)?;
        put(num_orbitals, s.num_orbitals())?;
        put(num_particles, s.num_particles())?;
        put(num_terms, s.terms().len())
    })
}

/// von Neumann entropy of `rho^(M)` in nats.
///
/// # Safety
/// `state` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fe_entropy(state: *const FeState, m: usize, out: *mut f64) -> FeStatus {
    guard(|| put(out, entropy(&build_dm(state_ref(state)?, m)?)?))
}

/// Descending eigenvalues of `rho^(M)`. `len` is the capacity of `buf`;
/// `written` receives the spectrum length, also when the buffer is too small.
///
/// # Safety
/// `buf` must hold `len` doubles (or be NULL when `len` is 0); `written` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fe_spectrum(
    state: *const FeState,
    m: usize,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> FeStatus {
    guard(|| {
        let dm = build_dm(state_ref(state)?, m)?;
        let ev = spectrum(&dm)?;
        put(written, ev.len())?;
        if ev.len() > len {
            return Err(Failure::Buffer(ev.len()));
        }
        if buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        ptr::copy_nonoverlapping(ev.as_ptr(), buf, ev.len());
        Ok(())
    })
}

/// Whether `rho^(M)` equals `(C(N,M)/C(D,M)) I` within `tol` entrywise.
///
/// # Safety
/// `state` must be a live handle; the outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fe_verify_maximal(
    state: *const FeState,
    m: usize,
    tol: f64,
    maximal: *mut bool,
    deviation: *mut f64,
) -> FeStatus {
    guard(|| {
        let c = verify_maximal(state_ref(state)?, m, tol)?;
        put(maximal, c.maximal)?;
        put(deviation, c.deviation)
    })
}

/// Existence search. `max_classes == 0` and `max_seconds <= 0` mean the
/// library defaults. `report_json` (optional) receives the full report and
/// `state_out` (optional) the found state, or NULL.
///
/// # Safety
/// Non-NULL pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fe_search(
    d: usize,
    n: usize,
    m: usize,
    max_classes: u64,
    max_seconds: f64,
    verdict: *mut FeVerdict,
    state_out: *mut *mut FeState,
    report_json: *mut *mut c_char,
) -> FeStatus {
    guard(|| {
        let defaults = SearchBudget::default();
        let budget = SearchBudget {
            max_classes: if max_classes == 0 {
                defaults.max_classes
            } else {
                Some(max_classes)
            },
            max_seconds: if max_seconds > 0.0 {
                Some(max_seconds)
            } else {
                defaults.max_seconds
            },
            ..defaults
        };
        let r = search_maximal_state(d, n, m, None, budget)?;
        let v = match &r.verdict {
            ExistenceVerdict::NotExists { .. } => FeVerdict::NotExists,
            ExistenceVerdict::ExistsWithState(_) => FeVerdict::ExistsWithState,
            ExistenceVerdict::ExistsSteinerOnly(_) => FeVerdict::ExistsSteinerOnly,
            ExistenceVerdict::ExhaustedNoSolution { .. } => FeVerdict::ExhaustedNoSolution,
            ExistenceVerdict::Unknown { .. } => FeVerdict::Unknown,
        };
        put(verdict, v)?;
        if !state_out.is_null() {
            match r.verdict.maximal_state() {
                Some(s) => put_state(state_out, s.state.clone())?,
                None => put(state_out, ptr::null_mut())?,
            }
        }
        if !report_json.is_null() {
            let text = serde_json::to_string(&search_json(&r)?).map_err(Error::from)?;
            put_string(report_json, text)?;
        }
        Ok(())
    })
}

/// The constant `a_2` of the c = 1 entropy expansion.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fe_compute_a2(out: *mut f64) -> FeStatus {
    guard(|| put(out, compute_a2()?))
}
