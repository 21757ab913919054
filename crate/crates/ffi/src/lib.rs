//! C ABI over the `dpsbp` library.
//!
//! Every function returns a [`DpsbpStatus`]. Results come back through out
//! pointers or caller-owned buffers, and the message for the most recent
//! failure on the calling thread is available from [`dpsbp_last_error`].
//! Periodic operators are opaque handles released with
//! [`dpsbp_operator_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dpsbp::burgers::{gamma_opt, BurgersScheme};
use dpsbp::linearization::{eigenvalues, jacobian};
use dpsbp::multiblock::{assemble_periodic, GlobalOperator, Mesh1D};
use dpsbp::operators::{audit_axioms, build, Family};
use dpsbp::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DpsbpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnsupportedOrder = 3,
    TooFewNodes = 4,
    BufferTooSmall = 5,
    NoConvergence = 6,
    NonFinite = 7,
    Panic = 8,
    Internal = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DpsbpFamily {
    FdUpwind = 0,
    FdDrp = 1,
    DgLgl = 2,
}

/// Families travel as plain integers so that a stray value from C is an
/// error rather than undefined behaviour.
fn family(code: i32) -> Result<Family, Fail> {
    match code {
        c if c == DpsbpFamily::FdUpwind as i32 => Ok(Family::FdUpwind),
        c if c == DpsbpFamily::FdDrp as i32 => Ok(Family::FdDrp),
        c if c == DpsbpFamily::DgLgl as i32 => Ok(Family::DgLgl),
        c => Err(Fail(DpsbpStatus::InvalidArgument, format!("unknown family code {c}"))),
    }
}

fn element_nodes(f: Family, order: usize, nodes: usize) -> usize {
    if f == Family::DgLgl {
        order + 1
    } else {
        nodes
    }
}

/// Residuals of the four operator axioms for one element.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DpsbpAuditReport {
    pub a1_min_h: f64,
    pub a1_sum_error: f64,
    pub a2_residual: f64,
    pub a3_residual: f64,
    pub a4_max_quadratic: f64,
    /// 1 when every axiom holds.
    pub pass: i32,
}

/// Periodic multi-block operator on `[0, length]`.
pub struct DpsbpOperator {
    ops: GlobalOperator,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> DpsbpStatus {
    match e {
        Error::UnsupportedOrder(_) | Error::InvalidDegree(_) => DpsbpStatus::UnsupportedOrder,
        Error::TooFewNodes { .. } => DpsbpStatus::TooFewNodes,
        Error::NoConvergence => DpsbpStatus::NoConvergence,
        Error::NonFiniteState { .. } => DpsbpStatus::NonFinite,
        Error::InvalidArgument(_) | Error::SizeMismatch { .. } | Error::NonPositiveHeight { .. } => DpsbpStatus::InvalidArgument,
        _ => DpsbpStatus::Internal,
    }
}

struct Fail(DpsbpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DpsbpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            DpsbpStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside dpsbp".into());
            DpsbpStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(DpsbpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn operator<'a>(op: *const DpsbpOperator) -> Result<&'a DpsbpOperator, Fail> {
    op.as_ref().ok_or_else(|| null("operator"))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    *out = v;
    Ok(())
}

unsafe fn copy_out(src: &[f64], out: *mut f64, capacity: usize) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output buffer"));
    }
    if capacity < src.len() {
        return Err(Fail(DpsbpStatus::BufferTooSmall, format!("buffer holds {capacity}, need {}", src.len())));
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

unsafe fn state<'a>(op: &DpsbpOperator, u: *const f64, len: usize) -> Result<&'a [f64], Fail> {
    if len != op.ops.size() {
        return Err(Fail(DpsbpStatus::InvalidArgument, format!("state has {len} values, operator has {}", op.ops.size())));
    }
    slice(u, len, "state")
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dpsbp_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `capacity`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or valid for `capacity` bytes.
#[no_mangle]
pub unsafe extern "C" fn dpsbp_last_error(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && capacity > 0 {
            let n = msg.len().min(capacity - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Build a periodic operator of `elements` equal elements on `[0, length]`.
/// `family_code` is a [`DpsbpFamily`] value. `nodes` is per element and
/// ignored for DG, which uses `order + 1`.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn dpsbp_operator_new(
    family_code: i32,
    order: usize,
    nodes: usize,
    elements: usize,
    length: f64,
    dg_strength: f64,
    out: *mut *mut DpsbpOperator,
) -> DpsbpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if elements == 0 || !(length > 0.0) {
            return Err(Fail(DpsbpStatus::InvalidArgument, format!("elements {elements}, length {length}")));
        }
        let f = family(family_code)?;
        let pair = build(f, order, element_nodes(f, order, nodes), length / elements as f64, dg_strength)?;
        let ops = assemble_periodic(Mesh1D::uniform(pair, elements, 0.0))?;
        *out = Box::into_raw(Box::new(DpsbpOperator { ops }));
        Ok(())
    })
}

/// Release an operator. Null is ignored.
///
/// # Safety
/// `op` must come from [`dpsbp_operator_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dpsbp_operator_free(op: *mut DpsbpOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Total number of nodes.
///
/// # Safety
/// `op` must be a live handle, `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn dpsbp_operator_size(op: *const DpsbpOperator, out: *mut usize) -> DpsbpStatus {
    guard(|| write(out, operator(op)?.ops.size(), "out"))
}

/// Node coordinates, element by element.
///
/// # Safety
/// `out` must be valid for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn dpsbp_operator_nodes(op: *const DpsbpOperator, out: *mut f64, capacity: usize) -> DpsbpStatus {
    guard(|| copy_out(&operator(op)?.ops.nodes(), out, capacity))
}

/// Quadrature weights of the global norm `H`.
///
/// # Safety
/// `out` must be valid for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn dpsbp_operator_weights(op: *const DpsbpOperator, out: *mut f64, capacity: usize) -> DpsbpStatus {
    guard(|| copy_out(operator(op)?.ops.h(), out, capacity))
}

/// Apply the penalized central derivative `D~ = (D~+ + D~-)/2`.
///
/// # Safety
/// `u` and `out` must each be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dpsbp_operator_apply_d(op: *const DpsbpOperator, u: *const f64, len: usize, out: *mut f64) -> DpsbpStatus {
    guard(|| {
        let op = operator(op)?;
        let du = op.ops.apply_d(state(op, u, len)?);
        copy_out(&du, out, len)
    })
}

/// Audit one element of `nodes` points on `[0, 1]` against the operator axioms.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn dpsbp_audit(
    family_code: i32,
    order: usize,
    nodes: usize,
    dg_strength: f64,
    trials: usize,
    seed: u64,
    out: *mut DpsbpAuditReport,
) -> DpsbpStatus {
    guard(|| {
        let f = family(family_code)?;
        let pair = build(f, order, element_nodes(f, order, nodes), 1.0, dg_strength)?;
        let r = audit_axioms(&pair, trials, 1e-11, seed);
        let report = DpsbpAuditReport {
            a1_min_h: r.a1_min_h,
            a1_sum_error: r.a1_sum_error,
            a2_residual: r.a2_residual,
            a3_residual: r.a3_residual,
            a4_max_quadratic: r.a4_max_quadratic,
            pass: r.pass() as i32,
        };
        write(out, report, "out")
    })
}

/// Volume upwind parameter `γ_opt` for split parameter `alpha` and base flow `u`.
///
/// # Safety
/// `u` must be valid for `len` doubles, `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn dpsbp_burgers_gamma_opt(
    op: *const DpsbpOperator,
    alpha: f64,
    u: *const f64,
    len: usize,
    out: *mut f64,
) -> DpsbpStatus {
    guard(|| {
        let op = operator(op)?;
        let g = gamma_opt(&op.ops, alpha, state(op, u, len)?)?;
        write(out, g, "out")
    })
}

/// Largest real part of the spectrum of the Burgers scheme linearized at `u`.
///
/// # Safety
/// `u` must be valid for `len` doubles, `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn dpsbp_burgers_max_re(
    op: *const DpsbpOperator,
    alpha: f64,
    gamma: f64,
    u: *const f64,
    len: usize,
    out: *mut f64,
) -> DpsbpStatus {
    guard(|| {
        let op = operator(op)?;
        let base = state(op, u, len)?;
        let scheme = BurgersScheme::new(op.ops.clone(), alpha, gamma)?;
        let q = jacobian(|v| Ok(scheme.rhs(v)), base)?;
        let ev = eigenvalues(&q)?;
        write(out, ev.first().map_or(f64::NEG_INFINITY, |l| l.re), "out")
    })
}
