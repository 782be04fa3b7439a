//! C ABI over `akr_core`.
//!
//! Functions are parsed or looked up into an opaque [`AkrFunction`] handle that
//! the caller releases with [`akr_function_free`]. Every fallible entry point
//! returns an [`AkrStatus`]; on failure the message is available from
//! [`akr_last_error`] on the same thread until the next failing call. Results
//! are written into caller-provided buffers. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use akr_core::calculus::{AnyFunction, GridSpec};
use akr_core::classes::{self, Verdict};
use akr_core::experiments::{self, ChainKind, NormKind};
use akr_core::operators::{self, OperatorSpec};
use akr_core::{catalog, Error, ErrorKind};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AkrStatus {
    Ok = 0,
    /// Malformed expression, unknown name or invalid UTF-8.
    InputError = 1,
    /// A precondition failed, e.g. `n < j` or a point outside the unit square.
    PreconditionError = 2,
    /// A numerical procedure failed.
    NumericalError = 3,
    NullPointer = 4,
    /// The output buffer is shorter than required.
    BufferTooSmall = 5,
    /// Internal panic caught at the boundary.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AkrOperatorKind {
    Bernstein = 0,
    Akr = 1,
}

/// Operator selection. `m == 0` means univariate; `j` is ignored for Bernstein.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AkrOperator {
    pub kind: AkrOperatorKind,
    pub n: usize,
    pub m: usize,
    pub j: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AkrNorm {
    Sup = 0,
    /// Discrete relative 2-norm.
    Rel2 = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AkrClass {
    /// `f' >= 0` and `x f'' - (j-1) f' >= 0`.
    Kj1 = 0,
    /// The `Kj1` conditions on every axis slice.
    Kj2 = 1,
    /// `f' <= 0` and `f'' >= 0`.
    DecreasingConvex = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AkrVerdict {
    Member = 0,
    NonMember = 1,
    Inconclusive = 2,
}

/// Summary of a class test; `witness_y` is NaN for univariate tests.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AkrClassReport {
    pub verdict: AkrVerdict,
    pub min_margin: f64,
    pub witness_x: f64,
    pub witness_y: f64,
    pub tolerance: f64,
    pub points_scanned: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AkrChain {
    /// `f <= B_{n,j} f <= B_n f`
    AkrBelow = 0,
    /// `B_{n,j} f >= B_n f >= f`
    AkrAbove = 1,
    /// `f <= B_{n,m,j} f <= B_{n,m} f`
    Bivariate = 2,
}

/// Result of an inequality-chain check: one margin per link.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AkrChainReport {
    pub holds: bool,
    pub lower_margin: f64,
    pub upper_margin: f64,
}

/// A univariate or bivariate function.
pub struct AkrFunction {
    inner: AnyFunction,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(AkrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.kind() {
            ErrorKind::Input => AkrStatus::InputError,
            ErrorKind::Precondition => AkrStatus::PreconditionError,
            ErrorKind::Numerical => AkrStatus::NumericalError,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|e| {
        let mut bytes = e.into_vec();
        bytes.retain(|&b| b != 0);
        CString::new(bytes).expect("NUL bytes removed")
    });
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> AkrStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => AkrStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            AkrStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(AkrStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(AkrStatus::InputError, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a>(f: *const AkrFunction) -> Result<&'a AnyFunction, Failure> {
    f.as_ref().map(|h| &h.inner).ok_or_else(|| null("function handle"))
}

unsafe fn output<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn buffer<'a>(p: *mut f64, len: usize, needed: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    if len < needed {
        return Err(Failure(
            AkrStatus::BufferTooSmall,
            format!("{what} holds {len} values but {needed} are required"),
        ));
    }
    Ok(std::slice::from_raw_parts_mut(p, needed))
}

unsafe fn input<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn spec(op: &AkrOperator) -> OperatorSpec {
    match (op.kind, op.m) {
        (AkrOperatorKind::Bernstein, 0) => OperatorSpec::bernstein(op.n),
        (AkrOperatorKind::Akr, 0) => OperatorSpec::akr(op.n, op.j),
        (AkrOperatorKind::Bernstein, m) => OperatorSpec::bernstein_2d(op.n, m),
        (AkrOperatorKind::Akr, m) => OperatorSpec::akr_2d(op.n, m, op.j),
    }
}

fn grid(points: usize, dims: u8) -> Result<GridSpec, Failure> {
    Ok(GridSpec::new(points, dims)?)
}

fn store(out: *mut *mut AkrFunction, f: AnyFunction) -> Result<(), Failure> {
    let slot = unsafe { output(out, "output handle")? };
    *slot = Box::into_raw(Box::new(AkrFunction { inner: f }));
    Ok(())
}

/// Message of the last failure on this thread, or NULL if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn akr_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a NUL-terminated string with static lifetime.
#[no_mangle]
pub extern "C" fn akr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses an expression in `x` (and `y`). With `force_2d` the result is
/// bivariate even if `y` does not occur.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn akr_function_parse(src: *const c_char, force_2d: bool, out: *mut *mut AkrFunction) -> AkrStatus {
    guard(|| {
        let src = text(src, "expression")?;
        store(out, AnyFunction::parse(src, force_2d)?)
    })
}

/// Looks up a built-in example function (`ex3.1`, ..., `ex4.6`).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn akr_function_catalog(name: *const c_char, j: u32, out: *mut *mut AkrFunction) -> AkrStatus {
    guard(|| {
        let name = text(name, "catalog name")?;
        store(out, catalog::lookup(name, j)?)
    })
}

/// Switches the derivative channels of `f` to finite differences, in place.
///
/// # Safety
/// `f` must be a handle returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn akr_function_use_finite_differences(f: *mut AkrFunction) -> AkrStatus {
    guard(|| {
        let h = output(f, "function handle")?;
        h.inner = h.inner.clone().with_finite_differences();
        Ok(())
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `f` must be NULL or a handle returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn akr_function_free(f: *mut AkrFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// 1 or 2 for a valid handle, 0 for NULL.
///
/// # Safety
/// `f` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn akr_function_dims(f: *const AkrFunction) -> u8 {
    f.as_ref().map_or(0, |h| h.inner.dims())
}

/// Value of `f` at `(x, y)`; `y` is ignored for univariate functions.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn akr_function_value(f: *const AkrFunction, x: f64, y: f64, out: *mut f64) -> AkrStatus {
    guard(|| {
        let v = match handle(f)? {
            AnyFunction::Univariate(g) => g.value(x)?,
            AnyFunction::Bivariate(g) => g.value(x, y)?,
        };
        *output(out, "output")? = v;
        Ok(())
    })
}

/// Writes the `n + 1` AKR nodes `t_{n,k}^j` into `out`.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn akr_nodes(n: usize, j: u32, out: *mut f64, len: usize) -> AkrStatus {
    guard(|| {
        let nodes = operators::akr_nodes(n, j)?.nodes;
        buffer(out, len, nodes.len(), "node buffer")?.copy_from_slice(&nodes);
        Ok(())
    })
}

/// Writes the `n + 1` Bernstein basis values `p_{n,k}(x)` into `out`.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn akr_bernstein_basis(n: usize, x: f64, out: *mut f64, len: usize) -> AkrStatus {
    guard(|| {
        let basis = operators::bernstein_basis(n, x)?;
        buffer(out, len, basis.len(), "basis buffer")?.copy_from_slice(&basis);
        Ok(())
    })
}

/// Evaluates the operator image of `f` at `count` points. `ys` is read only
/// for bivariate operators and may be NULL otherwise.
///
/// # Safety
/// `f` must be a live handle, `op` valid, and `xs`, `ys`, `out` must point to
/// `count` doubles each (`ys` only when used).
#[no_mangle]
pub unsafe extern "C" fn akr_eval(
    f: *const AkrFunction,
    op: *const AkrOperator,
    xs: *const f64,
    ys: *const f64,
    count: usize,
    out: *mut f64,
) -> AkrStatus {
    guard(|| {
        let f = handle(f)?;
        let spec = spec(op.as_ref().ok_or_else(|| null("operator"))?);
        spec.validate()?;
        let xs = input(xs, count, "x buffer")?;
        let out = buffer(out, count, count, "output buffer")?;
        match f {
            AnyFunction::Univariate(g) => {
                if spec.is_bivariate() {
                    return Err(Error::Precondition("bivariate operator applied to a univariate function".into()).into());
                }
                out.copy_from_slice(&operators::apply_1d(g, &spec)?.eval_many(xs)?);
            }
            AnyFunction::Bivariate(g) => {
                let ys = input(ys, count, "y buffer")?;
                let p = operators::apply_2d(g, &spec)?;
                for ((o, &x), &y) in out.iter_mut().zip(xs).zip(ys) {
                    *o = p.eval(x, y)?;
                }
            }
        }
        Ok(())
    })
}

/// Error of the operator on a uniform grid with `points` per axis.
///
/// # Safety
/// `f` must be a live handle, `op` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn akr_error(
    f: *const AkrFunction,
    op: *const AkrOperator,
    points: usize,
    norm: AkrNorm,
    out: *mut f64,
) -> AkrStatus {
    guard(|| {
        let f = handle(f)?;
        let spec = spec(op.as_ref().ok_or_else(|| null("operator"))?);
        let norm = match norm {
            AkrNorm::Sup => NormKind::Sup,
            AkrNorm::Rel2 => NormKind::Rel2,
        };
        let r = experiments::sup_error(f, &spec, &grid(points, f.dims())?, norm)?;
        *output(out, "output")? = r.error;
        Ok(())
    })
}

/// Tests class membership on a uniform grid; `tol <= 0` selects the
/// function's default tolerance.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn akr_check_class(
    f: *const AkrFunction,
    class: AkrClass,
    j: u32,
    points: usize,
    tol: f64,
    out: *mut AkrClassReport,
) -> AkrStatus {
    guard(|| {
        let f = handle(f)?;
        let tol = if tol > 0.0 {
            tol
        } else {
            match f {
                AnyFunction::Univariate(g) => g.default_tolerance(),
                AnyFunction::Bivariate(g) => g.default_tolerance(),
            }
        };
        let g = grid(points, f.dims())?;
        let r = match class {
            AkrClass::Kj1 => classes::check_kj1(f.as_univariate()?, j, &g, tol)?,
            AkrClass::DecreasingConvex => classes::check_decreasing_convex(f.as_univariate()?, &g, tol)?,
            AkrClass::Kj2 => classes::check_kj2(f.as_bivariate()?, j, &g, tol)?,
        };
        *output(out, "report")? = AkrClassReport {
            verdict: match r.verdict {
                Verdict::Member => AkrVerdict::Member,
                Verdict::NonMember => AkrVerdict::NonMember,
                Verdict::Inconclusive => AkrVerdict::Inconclusive,
            },
            min_margin: r.min_margin,
            witness_x: r.witness.first().copied().unwrap_or(f64::NAN),
            witness_y: r.witness.get(1).copied().unwrap_or(f64::NAN),
            tolerance: r.tolerance,
            points_scanned: r.points_scanned,
        };
        Ok(())
    })
}

/// Checks an inequality chain between `f`, the AKR and the Bernstein
/// operator; `m` is ignored for univariate chains.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn akr_check_chain(
    f: *const AkrFunction,
    chain: AkrChain,
    n: usize,
    m: usize,
    j: u32,
    points: usize,
    tol: f64,
    out: *mut AkrChainReport,
) -> AkrStatus {
    guard(|| {
        let f = handle(f)?;
        let kind = match chain {
            AkrChain::AkrBelow => ChainKind::AkrBelow,
            AkrChain::AkrAbove => ChainKind::AkrAbove,
            AkrChain::Bivariate => ChainKind::Bivariate,
        };
        let m = (f.dims() == 2).then_some(m);
        let r = experiments::chain_check(f, n, m, j, kind, &grid(points, f.dims())?, tol)?;
        *output(out, "report")? = AkrChainReport {
            holds: r.holds,
            lower_margin: r.links[0].min_margin,
            upper_margin: r.links[1].min_margin,
        };
        Ok(())
    })
}
