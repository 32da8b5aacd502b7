//! C ABI over the `dirac-gbdt` engine.
//!
//! Every entry point returns a [`DgStatus`]. On failure the message is kept
//! per thread and read back with [`dg_last_error_message`]. Matrices cross the
//! boundary as column-major arrays of [`DgComplex`] in caller-owned buffers;
//! shapes follow from [`dg_triple_dims`]:
//!
//! | call                | shape     |
//! |---------------------|-----------|
//! | `dg_eval_potential` | `p x p`   |
//! | `dg_eval_s`         | `n x n`   |
//! | `dg_eval_transfer`  | `2p x 2p` |
//! | `dg_eval_dynamical` | `2p x n`  |
//! | `dg_weyl`           | `p x p`   |
//!
//! Panics never unwind into C; they surface as [`DgStatus::Panic`].
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dirac_gbdt::canned::Example;
use dirac_gbdt::error::Error;
use dirac_gbdt::gbdt;
use dirac_gbdt::matlin::CMatrix;
use dirac_gbdt::scenario::Scenario;
use dirac_gbdt::seed::GbdtTriple;
use dirac_gbdt::solutions;
use dirac_gbdt::weyl;
use num_complex::Complex64;

/// Result code of every call; success is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgStatus {
    Ok = 0,
    /// A required pointer was null.
    NullArgument = 1,
    /// A string argument was not UTF-8.
    InvalidUtf8 = 2,
    /// The scenario, example name or a parameter was rejected.
    InvalidInput = 3,
    /// A mathematical hypothesis does not hold (domain of `z`, `c != 0` for `ω`, ...).
    Hypothesis = 4,
    /// `S(0)` is not positive definite where positivity is required.
    NotPositive = 5,
    /// A linear-algebra step failed: singular matrix, pole, overflow, no convergence.
    Numerical = 6,
    /// The output buffer is shorter than the result.
    BufferTooSmall = 7,
    /// A panic was caught at the boundary.
    Panic = 8,
}

/// Layout-compatible with C99 `double _Complex`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DgComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for DgComplex {
    fn from(z: Complex64) -> Self {
        DgComplex { re: z.re, im: z.im }
    }
}

impl From<DgComplex> for Complex64 {
    fn from(z: DgComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Opaque handle to a validated triple. Free with [`dg_triple_free`].
pub struct DgTriple {
    inner: GbdtTriple,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    // interior NULs would truncate the message on the C side
    let clean = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = clean);
}

fn status_of(e: &Error) -> DgStatus {
    match e {
        Error::Scenario { .. } | Error::Io(_) | Error::Shape { .. } | Error::Step(_) => {
            DgStatus::InvalidInput
        }
        Error::Hypothesis(_) | Error::SupplyS0 { .. } => DgStatus::Hypothesis,
        Error::NotPositive { .. } => DgStatus::NotPositive,
        _ => DgStatus::Numerical,
    }
}

fn fail(status: DgStatus, msg: &str) -> DgStatus {
    set_last_error(msg);
    status
}

/// Runs `f` behind the panic barrier and records any error message.
fn guard<F>(f: F) -> DgStatus
where
    F: FnOnce() -> Result<(), (DgStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            DgStatus::Ok
        }
        Ok(Err((status, msg))) => fail(status, &msg),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(DgStatus::Panic, &format!("panic: {msg}"))
        }
    }
}

type Outcome<T> = Result<T, (DgStatus, String)>;

fn engine<T>(r: dirac_gbdt::error::Result<T>) -> Outcome<T> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (DgStatus, String) {
    (DgStatus::NullArgument, format!("`{what}` is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Outcome<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Outcome<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (DgStatus::InvalidUtf8, format!("`{what}`: {e}")))
}

unsafe fn store<T>(out: *mut T, v: T, what: &str) -> Outcome<()> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

/// Copies `m` column-major into `out[..len]`.
unsafe fn write_matrix(m: &CMatrix, out: *mut DgComplex, len: usize) -> Outcome<()> {
    let need = m.nrows() * m.ncols();
    if len < need {
        return Err((
            DgStatus::BufferTooSmall,
            format!(
                "buffer holds {len} entries, result is {}x{}",
                m.nrows(),
                m.ncols()
            ),
        ));
    }
    if out.is_null() {
        return Err(null("out"));
    }
    let dst = std::slice::from_raw_parts_mut(out, need);
    for (d, s) in dst.iter_mut().zip(m.iter()) {
        *d = (*s).into();
    }
    Ok(())
}

fn boxed(t: GbdtTriple) -> *mut DgTriple {
    Box::into_raw(Box::new(DgTriple { inner: t }))
}

/// Builds a triple from scenario TOML text (the format read by the CLI).
#[no_mangle]
pub unsafe extern "C" fn dg_triple_from_scenario(
    toml: *const c_char,
    out: *mut *mut DgTriple,
) -> DgStatus {
    guard(|| {
        let text = string(toml, "toml")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let t = engine(Scenario::from_toml(text).and_then(|s| s.triple()))?;
        out.write(boxed(t));
        Ok(())
    })
}

/// Builds one of the canned examples. `keys`/`values` hold `count` parameter
/// overrides; both may be null when `count` is zero.
#[no_mangle]
pub unsafe extern "C" fn dg_triple_from_example(
    name: *const c_char,
    keys: *const *const c_char,
    values: *const f64,
    count: usize,
    out: *mut *mut DgTriple,
) -> DgStatus {
    guard(|| {
        let name = string(name, "name")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let example: Example = engine(name.parse())?;
        let mut overrides = BTreeMap::new();
        if count > 0 {
            if keys.is_null() {
                return Err(null("keys"));
            }
            if values.is_null() {
                return Err(null("values"));
            }
            let keys = std::slice::from_raw_parts(keys, count);
            let values = std::slice::from_raw_parts(values, count);
            for (k, v) in keys.iter().zip(values) {
                overrides.insert(string(*k, "keys[i]")?.to_string(), *v);
            }
        }
        let t = engine(example.scenario(&overrides).and_then(|s| s.triple()))?;
        out.write(boxed(t));
        Ok(())
    })
}

/// Releases a handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn dg_triple_free(triple: *mut DgTriple) {
    if !triple.is_null() {
        drop(Box::from_raw(triple));
    }
}

/// `n` (size of `A`), `p` (block size of the seed) and `kappa` (1 for the
/// self-adjoint system, 0 for the skew-self-adjoint one). Null outputs are skipped.
#[no_mangle]
pub unsafe extern "C" fn dg_triple_dims(
    triple: *const DgTriple,
    n: *mut usize,
    p: *mut usize,
    kappa: *mut u8,
) -> DgStatus {
    guard(|| {
        let t = &borrow(triple, "triple")?.inner;
        if !n.is_null() {
            n.write(t.n());
        }
        if !p.is_null() {
            p.write(t.p());
        }
        if !kappa.is_null() {
            kappa.write(t.kind().kappa());
        }
        Ok(())
    })
}

/// Transformed potential `ṽ(x)`.
#[no_mangle]
pub unsafe extern "C" fn dg_eval_potential(
    triple: *const DgTriple,
    x: f64,
    out: *mut DgComplex,
    len: usize,
) -> DgStatus {
    guard(|| {
        let t = &borrow(triple, "triple")?.inner;
        write_matrix(&engine(gbdt::eval_potential(t, x))?, out, len)
    })
}

/// Real scalar `ω(x)`; requires a scalar skew-self-adjoint triple with `c = 0`
/// and purely imaginary `a`.
#[no_mangle]
pub unsafe extern "C" fn dg_eval_omega(triple: *const DgTriple, x: f64, out: *mut f64) -> DgStatus {
    guard(|| {
        let t = &borrow(triple, "triple")?.inner;
        let w = engine(gbdt::eval_omega(t, x))?;
        store(out, w, "out")
    })
}

/// `S(x)` by the default method for the triple.
#[no_mangle]
pub unsafe extern "C" fn dg_eval_s(
    triple: *const DgTriple,
    x: f64,
    out: *mut DgComplex,
    len: usize,
) -> DgStatus {
    guard(|| {
        let t = &borrow(triple, "triple")?.inner;
        let s = engine(gbdt::eval_s(t, x, gbdt::default_s_method(t)))?;
        write_matrix(&s, out, len)
    })
}

/// Transfer matrix `w_A(x, z)`.
#[no_mangle]
pub unsafe extern "C" fn dg_eval_transfer(
    triple: *const DgTriple,
    x: f64,
    z: DgComplex,
    out: *mut DgComplex,
    len: usize,
) -> DgStatus {
    guard(|| {
        let t = &borrow(triple, "triple")?.inner;
        write_matrix(&engine(gbdt::eval_transfer(t, x, z.into()))?, out, len)
    })
}

/// `ψ(x, ξ) = Π(x)^* S(x)^{-1} e^{-ξA}`.
#[no_mangle]
pub unsafe extern "C" fn dg_eval_dynamical(
    triple: *const DgTriple,
    x: f64,
    xi: f64,
    out: *mut DgComplex,
    len: usize,
) -> DgStatus {
    guard(|| {
        let t = &borrow(triple, "triple")?.inner;
        write_matrix(&engine(solutions::dynamical_solution(t, x, xi))?, out, len)
    })
}

/// Weyl function `φ(z)` for `Im z > 0`; needs `S(0) > 0`.
#[no_mangle]
pub unsafe extern "C" fn dg_weyl(
    triple: *const DgTriple,
    z: DgComplex,
    out: *mut DgComplex,
    len: usize,
) -> DgStatus {
    guard(|| {
        let t = &borrow(triple, "triple")?.inner;
        let w = engine(weyl::weyl_via_y(t, z.into()))?;
        write_matrix(&w.phi, out, len)
    })
}

/// Copies the calling thread's last error message, NUL-terminated and
/// truncated to `len`, into `buf`. Returns the full message length without
/// the terminator, so a zero-length probe sizes the buffer. Empty after success.
#[no_mangle]
pub unsafe extern "C" fn dg_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            buf.add(n).write(0);
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
