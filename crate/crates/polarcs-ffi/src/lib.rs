//! C bindings for the `polarcs` library.
//!
//! Conventions, uniform across the surface:
//!
//! - Every fallible function returns [`polarcs_status`]; out-parameters are
//!   written only when the return value is `POLARCS_OK`.
//! - Handles (`polarcs_transform`, `polarcs_system`) are created by `_new`
//!   functions, are never shared across a `_free`, and tolerate `NULL` in
//!   `_free` only.
//! - Vector and matrix buffers are caller-allocated `double` arrays whose
//!   required lengths are documented per function; matrices are row-major.
//! - A failure message for the most recent error on the calling thread is
//!   available from [`polarcs_last_error_message`].
//! - Panics never unwind across the boundary; they surface as
//!   `POLARCS_INTERNAL_ERROR`.

#![allow(non_camel_case_types)]
#![deny(unsafe_op_in_unsafe_fn)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use polarcs::infodim::estimate_dim;
use polarcs::mid::MidProfile;
use polarcs::sensing::SensingSystem;
use polarcs::transform::PolarTransform;
use polarcs::{decode, Error};

use nalgebra::{DMatrix, DVector};

/// Result of every fallible call in this interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum polarcs_status {
    /// The call succeeded and all out-parameters are valid.
    POLARCS_OK = 0,
    /// A required pointer argument was NULL.
    POLARCS_NULL_POINTER = 1,
    /// A scalar argument is outside its documented domain.
    POLARCS_INVALID_PARAMETER = 2,
    /// A buffer length disagrees with the handle's dimensions.
    POLARCS_DIMENSION_MISMATCH = 3,
    /// The request exceeds a built-in size cap (e.g. dense depth limits).
    POLARCS_SIZE_LIMIT = 4,
    /// The input is numerically degenerate for the requested operation.
    POLARCS_DEGENERATE_INPUT = 5,
    /// The decoder ran but did not certify a successful recovery.
    POLARCS_DECODE_FAILED = 6,
    /// An internal invariant failed; the library state is still sound.
    POLARCS_INTERNAL_ERROR = 7,
}

/// Sparse-recovery algorithm selector for [`polarcs_system_recover`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum polarcs_method {
    /// Convex relaxation (interior point); scales to large blocks.
    POLARCS_METHOD_L1 = 0,
    /// Exhaustive smallest-support search; exact, desk-scale only.
    POLARCS_METHOD_L0 = 1,
}

/// Polarizing linear transform handle (opaque).
pub struct polarcs_transform {
    inner: PolarTransform,
}

/// Measurement system handle (opaque): the transform-derived coding matrix
/// together with its annihilating measurement matrix.
pub struct polarcs_system {
    inner: SensingSystem,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn map_error(e: &Error) -> polarcs_status {
    set_error(&e.to_string());
    match e {
        Error::InvalidParameter { .. } => polarcs_status::POLARCS_INVALID_PARAMETER,
        Error::DimensionMismatch { .. } => polarcs_status::POLARCS_DIMENSION_MISMATCH,
        Error::SizeLimit(_) => polarcs_status::POLARCS_SIZE_LIMIT,
        Error::DegenerateInput(_) => polarcs_status::POLARCS_DEGENERATE_INPUT,
        Error::Io(_) => polarcs_status::POLARCS_INTERNAL_ERROR,
    }
}

fn null_error(name: &str) -> polarcs_status {
    set_error(&format!("{name} must not be NULL"));
    polarcs_status::POLARCS_NULL_POINTER
}

/// Run a body with a panic guard so unwinding never crosses the boundary.
fn guarded(body: impl FnOnce() -> polarcs_status) -> polarcs_status {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            polarcs_status::POLARCS_INTERNAL_ERROR
        }
    }
}

/// Library version as a static NUL-terminated string; never NULL.
#[no_mangle]
pub extern "C" fn polarcs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on the calling thread. The pointer
/// stays valid until the next failing call on the same thread; never NULL.
#[no_mangle]
pub extern "C" fn polarcs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Create a depth-`n` transform over blocks of `2^n` coordinates with
/// kernel weight `beta`. On success `*out` owns the handle.
///
/// # Safety
/// `out` must point to a writable `polarcs_transform*` slot.
#[no_mangle]
pub unsafe extern "C" fn polarcs_transform_new(
    n: u32,
    beta: f64,
    out: *mut *mut polarcs_transform,
) -> polarcs_status {
    guarded(|| {
        if out.is_null() {
            return null_error("out");
        }
        match PolarTransform::new(n, beta) {
            Ok(inner) => {
                let handle = Box::new(polarcs_transform { inner });
                unsafe { *out = Box::into_raw(handle) };
                polarcs_status::POLARCS_OK
            }
            Err(e) => map_error(&e),
        }
    })
}

/// Destroy a transform handle. NULL is a no-op.
///
/// # Safety
/// `t` must be NULL or a handle from `polarcs_transform_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn polarcs_transform_free(t: *mut polarcs_transform) {
    if !t.is_null() {
        drop(unsafe { Box::from_raw(t) });
    }
}

/// Block size `2^n` of the transform; 0 if the handle is NULL.
///
/// # Safety
/// `t` must be NULL or a live transform handle.
#[no_mangle]
pub unsafe extern "C" fn polarcs_transform_size(t: *const polarcs_transform) -> usize {
    if t.is_null() {
        return 0;
    }
    unsafe { &*t }.inner.size()
}

/// Recursion depth `n` of the transform; 0 if the handle is NULL.
///
/// # Safety
/// `t` must be NULL or a live transform handle.
#[no_mangle]
pub unsafe extern "C" fn polarcs_transform_depth(t: *const polarcs_transform) -> u32 {
    if t.is_null() {
        return 0;
    }
    unsafe { &*t }.inner.depth()
}

/// Single matrix entry `(i, j)`; exact in powers of the kernel weight.
///
/// # Safety
/// `t` must be a live transform handle; `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn polarcs_transform_entry(
    t: *const polarcs_transform,
    i: usize,
    j: usize,
    out: *mut f64,
) -> polarcs_status {
    guarded(|| {
        if t.is_null() {
            return null_error("transform");
        }
        if out.is_null() {
            return null_error("out");
        }
        let inner = &unsafe { &*t }.inner;
        if i >= inner.size() || j >= inner.size() {
            set_error("entry index out of range");
            return polarcs_status::POLARCS_DIMENSION_MISMATCH;
        }
        unsafe { *out = inner.entry(i, j) };
        polarcs_status::POLARCS_OK
    })
}

/// Apply the transform: `y = H x`. Both buffers hold `len` doubles and
/// `len` must equal the block size. Runs in `O(len log len)`.
///
/// # Safety
/// `t` must be a live transform handle; `x` and `y` must be valid for `len` doubles each.
#[no_mangle]
pub unsafe extern "C" fn polarcs_transform_apply(
    t: *const polarcs_transform,
    x: *const f64,
    len: usize,
    y: *mut f64,
) -> polarcs_status {
    guarded(|| {
        if t.is_null() {
            return null_error("transform");
        }
        if x.is_null() || y.is_null() {
            return null_error("x/y");
        }
        let inner = &unsafe { &*t }.inner;
        if len != inner.size() {
            set_error("buffer length must equal the block size");
            return polarcs_status::POLARCS_DIMENSION_MISMATCH;
        }
        let input = DVector::from_column_slice(unsafe { std::slice::from_raw_parts(x, len) });
        match inner.apply(&input) {
            Ok(result) => {
                unsafe { std::slice::from_raw_parts_mut(y, len) }
                    .copy_from_slice(result.as_slice());
                polarcs_status::POLARCS_OK
            }
            Err(e) => map_error(&e),
        }
    })
}

/// Per-coordinate dimension profile at depth `n` and noise sparsity `p`.
/// `out` must hold `2^n` doubles; values arrive in natural index order.
///
/// # Safety
/// `out` must be valid for `2^n` doubles.
#[no_mangle]
pub unsafe extern "C" fn polarcs_mid_profile(n: u32, p: f64, out: *mut f64) -> polarcs_status {
    guarded(|| {
        if out.is_null() {
            return null_error("out");
        }
        match MidProfile::compute(n, p) {
            Ok(profile) => {
                let values = profile.values();
                unsafe { std::slice::from_raw_parts_mut(out, values.len()) }
                    .copy_from_slice(values);
                polarcs_status::POLARCS_OK
            }
            Err(e) => map_error(&e),
        }
    })
}

/// Build the measurement system for block size `2^n`, kernel weight
/// `beta`, design sparsity `p`, and signal dimension `dim` (the number of
/// retained columns). On success `*out` owns the handle.
///
/// # Safety
/// `out` must point to a writable `polarcs_system*` slot.
#[no_mangle]
pub unsafe extern "C" fn polarcs_system_new(
    n: u32,
    beta: f64,
    p: f64,
    dim: usize,
    out: *mut *mut polarcs_system,
) -> polarcs_status {
    guarded(|| {
        if out.is_null() {
            return null_error("out");
        }
        match SensingSystem::from_design(n, beta, p, dim) {
            Ok(inner) => {
                let handle = Box::new(polarcs_system { inner });
                unsafe { *out = Box::into_raw(handle) };
                polarcs_status::POLARCS_OK
            }
            Err(e) => map_error(&e),
        }
    })
}

/// Destroy a system handle. NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a handle from `polarcs_system_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn polarcs_system_free(s: *mut polarcs_system) {
    if !s.is_null() {
        drop(unsafe { Box::from_raw(s) });
    }
}

/// Block size M; 0 if the handle is NULL.
///
/// # Safety
/// `s` must be NULL or a live system handle.
#[no_mangle]
pub unsafe extern "C" fn polarcs_system_block_size(s: *const polarcs_system) -> usize {
    if s.is_null() {
        return 0;
    }
    unsafe { &*s }.inner.block_size()
}

/// Signal dimension N (retained columns); 0 if the handle is NULL.
///
/// # Safety
/// `s` must be NULL or a live system handle.
#[no_mangle]
pub unsafe extern "C" fn polarcs_system_dimension(s: *const polarcs_system) -> usize {
    if s.is_null() {
        return 0;
    }
    unsafe { &*s }.inner.dimension()
}

/// Number of measurement rows R = M - N; 0 if the handle is NULL.
///
/// # Safety
/// `s` must be NULL or a live system handle.
#[no_mangle]
pub unsafe extern "C" fn polarcs_system_measurement_count(s: *const polarcs_system) -> usize {
    if s.is_null() {
        return 0;
    }
    unsafe { &*s }.inner.measurement_count()
}

fn copy_row_major(m: &DMatrix<f64>, out: *mut f64) {
    let dst = unsafe { std::slice::from_raw_parts_mut(out, m.nrows() * m.ncols()) };
    for (i, row) in dst.chunks_exact_mut(m.ncols()).enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = m[(i, j)];
        }
    }
}

/// Copy the measurement matrix F, row-major, into `out`
/// (`measurement_count * block_size` doubles).
///
/// # Safety
/// `s` must be a live system handle; `out` must be valid for `measurement_count * block_size` doubles.
#[no_mangle]
pub unsafe extern "C" fn polarcs_system_measurement_matrix(
    s: *const polarcs_system,
    out: *mut f64,
) -> polarcs_status {
    guarded(|| {
        if s.is_null() {
            return null_error("system");
        }
        if out.is_null() {
            return null_error("out");
        }
        copy_row_major(unsafe { &*s }.inner.measurement_matrix(), out);
        polarcs_status::POLARCS_OK
    })
}

/// Copy the coding matrix A, row-major, into `out`
/// (`block_size * dimension` doubles).
///
/// # Safety
/// `s` must be a live system handle; `out` must be valid for `block_size * dimension` doubles.
#[no_mangle]
pub unsafe extern "C" fn polarcs_system_coding_matrix(
    s: *const polarcs_system,
    out: *mut f64,
) -> polarcs_status {
    guarded(|| {
        if s.is_null() {
            return null_error("system");
        }
        if out.is_null() {
            return null_error("out");
        }
        copy_row_major(unsafe { &*s }.inner.coding_matrix(), out);
        polarcs_status::POLARCS_OK
    })
}

/// Compress: `y' = F e`. `e` holds `e_len == block_size` doubles; `y_out`
/// holds `measurement_count` doubles.
///
/// # Safety
/// `s` must be a live system handle; `e` must be valid for `e_len` doubles and `y_out` for `measurement_count` doubles.
#[no_mangle]
pub unsafe extern "C" fn polarcs_system_measure(
    s: *const polarcs_system,
    e: *const f64,
    e_len: usize,
    y_out: *mut f64,
) -> polarcs_status {
    guarded(|| {
        if s.is_null() {
            return null_error("system");
        }
        if e.is_null() || y_out.is_null() {
            return null_error("e/y_out");
        }
        let inner = &unsafe { &*s }.inner;
        if e_len != inner.block_size() {
            set_error("input length must equal the block size");
            return polarcs_status::POLARCS_DIMENSION_MISMATCH;
        }
        let vec = DVector::from_column_slice(unsafe { std::slice::from_raw_parts(e, e_len) });
        match inner.measure(&vec) {
            Ok(y) => {
                unsafe { std::slice::from_raw_parts_mut(y_out, y.len()) }
                    .copy_from_slice(y.as_slice());
                polarcs_status::POLARCS_OK
            }
            Err(e) => map_error(&e),
        }
    })
}

/// Recover the sparse vector behind measurements `y` (`y_len ==
/// measurement_count` doubles). Writes `block_size` doubles to `e_out` on
/// success; returns `POLARCS_DECODE_FAILED` when the decoder finishes
/// without certifying a recovery.
///
/// # Safety
/// `s` must be a live system handle; `y` must be valid for `y_len` doubles and `e_out` for `block_size` doubles.
#[no_mangle]
pub unsafe extern "C" fn polarcs_system_recover(
    s: *const polarcs_system,
    y: *const f64,
    y_len: usize,
    method: polarcs_method,
    e_out: *mut f64,
) -> polarcs_status {
    guarded(|| {
        if s.is_null() {
            return null_error("system");
        }
        if y.is_null() || e_out.is_null() {
            return null_error("y/e_out");
        }
        let inner = &unsafe { &*s }.inner;
        if y_len != inner.measurement_count() {
            set_error("measurement length must equal the measurement count");
            return polarcs_status::POLARCS_DIMENSION_MISMATCH;
        }
        let vec = DVector::from_column_slice(unsafe { std::slice::from_raw_parts(y, y_len) });
        let rust_method = match method {
            polarcs_method::POLARCS_METHOD_L1 => decode::RecoverMethod::L1,
            polarcs_method::POLARCS_METHOD_L0 => decode::RecoverMethod::L0Oracle,
        };
        match decode::recover_sparse(inner, &vec, rust_method) {
            Ok(res) if res.status == decode::DecodeStatus::Success => {
                unsafe { std::slice::from_raw_parts_mut(e_out, res.estimate.len()) }
                    .copy_from_slice(res.estimate.as_slice());
                polarcs_status::POLARCS_OK
            }
            Ok(res) => {
                set_error(&format!("decode finished with status {:?}", res.status));
                polarcs_status::POLARCS_DECODE_FAILED
            }
            Err(e) => map_error(&e),
        }
    })
}

/// Information-dimension estimate of a scalar sample set at mesh
/// resolution `levels`, clipping samples to `[-clip, clip]`. Writes the
/// estimate and a saturation flag (nonzero when the mesh is too fine for
/// the sample budget and the estimate should not be trusted).
///
/// # Safety
/// `samples` must be valid for `len` doubles; `dim_out` and `saturated_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn polarcs_estimate_dim(
    samples: *const f64,
    len: usize,
    levels: u32,
    clip: f64,
    dim_out: *mut f64,
    saturated_out: *mut i32,
) -> polarcs_status {
    guarded(|| {
        if samples.is_null() {
            return null_error("samples");
        }
        if dim_out.is_null() || saturated_out.is_null() {
            return null_error("dim_out/saturated_out");
        }
        let xs = unsafe { std::slice::from_raw_parts(samples, len) };
        match estimate_dim(xs, levels, clip) {
            Ok(est) => {
                unsafe {
                    *dim_out = est.dim_estimate;
                    *saturated_out = est.saturated as i32;
                }
                polarcs_status::POLARCS_OK
            }
            Err(e) => map_error(&e),
        }
    })
}
