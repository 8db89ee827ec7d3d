//! C ABI over `semiflux`: opaque handles, status codes and a thread-local
//! last-error message.
//!
//! Every function returns an [`SfStatus`]; results go through out-pointers.
//! Handles are created by the library and released with the matching
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use semiflux::distributions::{euler_character, regularized_pair, RegularizedDelta};
use semiflux::hamiltonian::{self, HamiltonianConfig, HamiltonianOperator, Spectrum};
use semiflux::piecewise::test_function;
use semiflux::stieltjes::pair_against_test_derivative;
use semiflux::{Error, Orientation, PiecewiseFn};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    /// A Rust panic was caught at the boundary.
    Panic = 4,
    /// The caller's buffer is too small; the needed length was written.
    BufferTooSmall = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfOrientation {
    Left = 0,
    Right = 1,
    Standard = 2,
}

impl From<SfOrientation> for Orientation {
    fn from(o: SfOrientation) -> Self {
        match o {
            SfOrientation::Left => Orientation::Left,
            SfOrientation::Right => Orientation::Right,
            SfOrientation::Standard => Orientation::Standard,
        }
    }
}

/// Opaque piecewise function.
pub struct SfPiecewise(PiecewiseFn);

/// Opaque discretized operator.
pub struct SfHamiltonian(HamiltonianOperator);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> SfStatus {
    match e {
        Error::InvalidArgument(_)
        | Error::BadOrientation(_)
        | Error::TopologyMismatch(_)
        | Error::NoDecay(_)
        | Error::NotElliptic { .. }
        | Error::Distribution(_) => SfStatus::InvalidArgument,
        _ => SfStatus::Numerical,
    }
}

fn fail(e: Error) -> SfStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn guard(f: impl FnOnce() -> SfStatus) -> SfStatus {
    set_error(String::new());
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            SfStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, SfStatus> {
    if p.is_null() {
        set_error("null string argument".into());
        return Err(SfStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8".into());
        SfStatus::InvalidArgument
    })
}

macro_rules! try_ptr {
    ($p:expr) => {
        if $p.is_null() {
            set_error(concat!("null pointer: ", stringify!($p)).into());
            return SfStatus::NullPointer;
        }
    };
}

macro_rules! try_sf {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return fail(e),
        }
    };
}

unsafe fn put_piecewise(out: *mut *mut SfPiecewise, f: PiecewiseFn) -> SfStatus {
    *out = Box::into_raw(Box::new(SfPiecewise(f)));
    SfStatus::Ok
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to `len`) and returns the full message length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn sf_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// `H_L` or `H_R`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_piecewise_heaviside(o: SfOrientation, out: *mut *mut SfPiecewise) -> SfStatus {
    guard(|| {
        try_ptr!(out);
        put_piecewise(out, try_sf!(PiecewiseFn::heaviside(o.into())))
    })
}

/// `sgn_L` or `sgn_R`; `Standard` gives the two-sided sign.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_piecewise_sgn(o: SfOrientation, out: *mut *mut SfPiecewise) -> SfStatus {
    guard(|| {
        try_ptr!(out);
        let f = match o {
            SfOrientation::Standard => PiecewiseFn::sgn_twosided(),
            o => try_sf!(PiecewiseFn::sgn(o.into())),
        };
        put_piecewise(out, f)
    })
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_piecewise_from_json(json: *const c_char, out: *mut *mut SfPiecewise) -> SfStatus {
    guard(|| {
        try_ptr!(out);
        let text = match str_arg(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match serde_json::from_str::<PiecewiseFn>(text) {
            Ok(f) => put_piecewise(out, f),
            Err(e) => {
                set_error(format!("piecewise JSON: {e}"));
                SfStatus::InvalidArgument
            }
        }
    })
}

/// Value at `x`; `*assigned` is false (and `*value` NaN) at an unassigned
/// breakpoint.
///
/// # Safety
/// All pointers must be valid; `f` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn sf_piecewise_eval(f: *const SfPiecewise, x: f64, value: *mut f64, assigned: *mut bool) -> SfStatus {
    guard(|| {
        try_ptr!(f);
        try_ptr!(value);
        try_ptr!(assigned);
        let v = (*f).0.value_at(x);
        *assigned = v.is_some();
        *value = v.unwrap_or(f64::NAN);
        SfStatus::Ok
    })
}

/// # Safety
/// `f` must come from this library and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn sf_piecewise_reflect(f: *const SfPiecewise, out: *mut *mut SfPiecewise) -> SfStatus {
    guard(|| {
        try_ptr!(f);
        try_ptr!(out);
        put_piecewise(out, (*f).0.reflect())
    })
}

/// # Safety
/// `f` must come from this library and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn sf_piecewise_extend(f: *const SfPiecewise, o: SfOrientation, out: *mut *mut SfPiecewise) -> SfStatus {
    guard(|| {
        try_ptr!(f);
        try_ptr!(out);
        put_piecewise(out, (*f).0.extend(o.into()))
    })
}

/// # Safety
/// `f` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sf_piecewise_free(f: *mut SfPiecewise) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// `⟨f, φ'⟩` for a named test function (`gaussian`, `x-gaussian`,
/// `hermite-gaussian-k`).
///
/// # Safety
/// `f` must come from this library; `phi` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn sf_pair_test_derivative(f: *const SfPiecewise, phi: *const c_char, o: SfOrientation, out: *mut f64) -> SfStatus {
    guard(|| {
        try_ptr!(f);
        try_ptr!(out);
        let name = match str_arg(phi) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let phi = try_sf!(test_function(name));
        *out = try_sf!(pair_against_test_derivative(&(*f).0, &phi, o.into()));
        SfStatus::Ok
    })
}

/// # Safety
/// `f` must come from this library and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn sf_euler_character(f: *const SfPiecewise, o: SfOrientation, out: *mut i64) -> SfStatus {
    guard(|| {
        try_ptr!(f);
        try_ptr!(out);
        *out = euler_character(&(*f).0, o.into());
        SfStatus::Ok
    })
}

/// Elliptic operator `(a² - ¼α sgn_o) (i d/dx)²` on `grid_n` nodes.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_hamiltonian_build(
    a: f64,
    alpha: f64,
    o: SfOrientation,
    grid_n: usize,
    circumference: f64,
    out: *mut *mut SfHamiltonian,
) -> SfStatus {
    guard(|| {
        try_ptr!(out);
        let cfg = HamiltonianConfig { a, alpha, orientation: o.into(), grid_n, circumference, ..Default::default() };
        let h = try_sf!(hamiltonian::build(&cfg));
        *out = Box::into_raw(Box::new(SfHamiltonian(h)));
        SfStatus::Ok
    })
}

/// Sorted eigenvalues into `buf`. `*written` receives the count; when
/// `len` is too small nothing is copied and `BufferTooSmall` is returned.
///
/// # Safety
/// `h` must come from this library; `buf` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sf_hamiltonian_spectrum(h: *const SfHamiltonian, buf: *mut f64, len: usize, written: *mut usize) -> SfStatus {
    guard(|| {
        try_ptr!(h);
        try_ptr!(written);
        let ev = match try_sf!((*h).0.spectrum()) {
            Spectrum::Real(v) => v,
            Spectrum::Complex(_) => return fail(Error::KreinRegime("spectrum is complex".into())),
        };
        *written = ev.len();
        if len < ev.len() {
            set_error(format!("buffer holds {len}, need {}", ev.len()));
            return SfStatus::BufferTooSmall;
        }
        try_ptr!(buf);
        std::ptr::copy_nonoverlapping(ev.as_ptr(), buf, ev.len());
        SfStatus::Ok
    })
}

/// # Safety
/// `h` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sf_hamiltonian_free(h: *mut SfHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// `∫ (1/π) ε/(x²+ε²) φ(x) dx` for a named test function.
///
/// # Safety
/// `phi` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn sf_regularized_pair(epsilon: f64, phi: *const c_char, out: *mut f64) -> SfStatus {
    guard(|| {
        try_ptr!(out);
        let name = match str_arg(phi) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let phi = try_sf!(test_function(name));
        let r = try_sf!(RegularizedDelta::cauchy(epsilon));
        *out = try_sf!(regularized_pair(&r, &phi));
        SfStatus::Ok
    })
}
