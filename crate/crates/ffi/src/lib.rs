//! C ABI for the peernom library.
//!
//! Every fallible call returns a [`PnStatus`]; on failure a message is kept in
//! thread-local storage and can be read with [`pn_last_error_message`].
//! Objects cross the boundary as opaque handles released by their `_free`
//! function. Array getters copy into a caller buffer and always report the
//! full length, so a call with `capacity = 0` queries the size.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use peernom::assignment::{check_sp_structure, euler_assignment, DEFAULT_MAX_ATTEMPTS};
use peernom::harness::trial::{run_trial, Cell, TrialResult};
use peernom::noise::{mallows_sample, Dispersion, PopulationMix};
use peernom::theory::{correction_probability, TheoryParams};
use peernom::{Assignment, Error, Params, WeightScheme};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PnStatus {
    Ok = 0,
    /// A required pointer was null or a string was not valid UTF-8.
    NullOrInvalidArgument = 1,
    /// Parameters rejected by the library.
    InvalidParams = 2,
    /// Agent index outside `0..n`.
    OutOfRange = 3,
    /// The caller's buffer is shorter than the result; nothing was copied.
    BufferTooSmall = 4,
    /// The requested value is undefined for this input.
    Undefined = 5,
    /// Assignment construction kept producing disconnected graphs.
    ConstructionFailed = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
    Internal = 8,
}

/// Opaque review assignment.
pub struct PnAssignment(Assignment);

/// Opaque outcome of one simulated trial.
pub struct PnTrial(TrialResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> PnStatus {
    match err {
        Error::InvalidParams(_) | Error::Config { .. } | Error::LengthMismatch(..) => PnStatus::InvalidParams,
        Error::AgentOutOfRange { .. } => PnStatus::OutOfRange,
        Error::ConstructionFailed(_) => PnStatus::ConstructionFailed,
        Error::ConstantInput => PnStatus::Undefined,
        _ => PnStatus::Internal,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (PnStatus, String)>) -> PnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PnStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside peernom");
            PnStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (PnStatus, String) {
    (status_of(&e), e.to_string())
}

fn null_arg(name: &str) -> (PnStatus, String) {
    (PnStatus::NullOrInvalidArgument, format!("`{name}` must not be null"))
}

/// Copies `src` into `buf` when it fits; always stores the full length.
unsafe fn copy_out<T: Copy>(src: &[T], buf: *mut T, capacity: usize, len_out: *mut usize) -> Result<(), (PnStatus, String)> {
    if len_out.is_null() {
        return Err(null_arg("len_out"));
    }
    *len_out = src.len();
    if capacity < src.len() {
        return Err((PnStatus::BufferTooSmall, format!("need {} elements, buffer holds {capacity}", src.len())));
    }
    if !src.is_empty() {
        if buf.is_null() {
            return Err(null_arg("buf"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    }
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Builds an Euler-based assignment for `n` agents each reviewing `m` others.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn pn_assignment_build(n: usize, m: usize, seed: u64, out: *mut *mut PnAssignment) -> PnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        *out = ptr::null_mut();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = euler_assignment(n, m, DEFAULT_MAX_ATTEMPTS, &mut rng).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(PnAssignment(a)));
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from [`pn_assignment_build`] and not have
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn pn_assignment_free(handle: *mut PnAssignment) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of agents, or 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live assignment handle.
#[no_mangle]
pub unsafe extern "C" fn pn_assignment_n(handle: *const PnAssignment) -> usize {
    handle.as_ref().map_or(0, |h| h.0.n())
}

unsafe fn neighbours(
    handle: *const PnAssignment,
    agent: usize,
    buf: *mut usize,
    capacity: usize,
    len_out: *mut usize,
    reviewees: bool,
) -> PnStatus {
    guard(|| {
        let a = &handle.as_ref().ok_or_else(|| null_arg("handle"))?.0;
        if agent >= a.n() {
            return Err((PnStatus::OutOfRange, format!("agent {agent} out of range for {} agents", a.n())));
        }
        let list = if reviewees { a.reviewees(agent) } else { a.reviewers(agent) };
        copy_out(list, buf, capacity, len_out)
    })
}

/// Agents reviewed by `agent`, ascending.
///
/// # Safety
/// `handle` must be a live handle, `buf` must hold `capacity` elements and
/// `len_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pn_assignment_reviewees(
    handle: *const PnAssignment,
    agent: usize,
    buf: *mut usize,
    capacity: usize,
    len_out: *mut usize,
) -> PnStatus {
    neighbours(handle, agent, buf, capacity, len_out, true)
}

/// Agents reviewing `agent`, ascending.
///
/// # Safety
/// Same contract as [`pn_assignment_reviewees`].
#[no_mangle]
pub unsafe extern "C" fn pn_assignment_reviewers(
    handle: *const PnAssignment,
    agent: usize,
    buf: *mut usize,
    capacity: usize,
    len_out: *mut usize,
) -> PnStatus {
    neighbours(handle, agent, buf, capacity, len_out, false)
}

/// Stores whether the assignment has no mutual reviews and no shared reviewee
/// between a reviewer and the agent it reviews.
///
/// # Safety
/// `handle` must be a live handle and `ok_out` writable.
#[no_mangle]
pub unsafe extern "C" fn pn_assignment_check_sp(handle: *const PnAssignment, ok_out: *mut bool) -> PnStatus {
    guard(|| {
        let a = &handle.as_ref().ok_or_else(|| null_arg("handle"))?.0;
        let ok = ok_out.as_mut().ok_or_else(|| null_arg("ok_out"))?;
        *ok = check_sp_structure(a);
        Ok(())
    })
}

/// Simulates one trial: random ground truth, a population with
/// `share_accurate` of agents at `phi_accurate` and the rest at
/// `phi_inaccurate`, an Euler assignment, beliefs and nominations, then the
/// weighted choice under `scheme` (for example `"distance:20"`).
///
/// # Safety
/// `scheme` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pn_trial_run(
    n: usize,
    k: usize,
    m: usize,
    epsilon: f64,
    share_accurate: f64,
    phi_accurate: f64,
    phi_inaccurate: f64,
    scheme: *const c_char,
    seed: u64,
    out: *mut *mut PnTrial,
) -> PnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        *out = ptr::null_mut();
        if scheme.is_null() {
            return Err(null_arg("scheme"));
        }
        let name = CStr::from_ptr(scheme)
            .to_str()
            .map_err(|_| (PnStatus::NullOrInvalidArgument, "scheme is not valid UTF-8".to_string()))?;
        let scheme: WeightScheme = name.parse().map_err(lib_err)?;
        let params = Params::new(n, k, m, epsilon).map_err(lib_err)?;
        let mix = PopulationMix::new(share_accurate, phi_accurate, phi_inaccurate).map_err(lib_err)?;
        let result = run_trial(&Cell::new(params, mix), scheme, seed).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(PnTrial(result)));
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or a live trial handle.
#[no_mangle]
pub unsafe extern "C" fn pn_trial_free(handle: *mut PnTrial) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Recall against the ground-truth top k; NaN for a null handle.
///
/// # Safety
/// `handle` must be null or a live trial handle.
#[no_mangle]
pub unsafe extern "C" fn pn_trial_recall(handle: *const PnTrial) -> f64 {
    handle.as_ref().map_or(f64::NAN, |h| h.0.recall)
}

/// Number of selected agents; 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live trial handle.
#[no_mangle]
pub unsafe extern "C" fn pn_trial_size(handle: *const PnTrial) -> usize {
    handle.as_ref().map_or(0, |h| h.0.size)
}

/// Selected agents, ascending.
///
/// # Safety
/// `handle` must be live, `buf` must hold `capacity` elements and `len_out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn pn_trial_selected(
    handle: *const PnTrial,
    buf: *mut usize,
    capacity: usize,
    len_out: *mut usize,
) -> PnStatus {
    guard(|| {
        let t = &handle.as_ref().ok_or_else(|| null_arg("handle"))?.0;
        copy_out(&t.selected, buf, capacity, len_out)
    })
}

/// Per-agent reviewer weights.
///
/// # Safety
/// Same contract as [`pn_trial_selected`].
#[no_mangle]
pub unsafe extern "C" fn pn_trial_weights(
    handle: *const PnTrial,
    buf: *mut f64,
    capacity: usize,
    len_out: *mut usize,
) -> PnStatus {
    guard(|| {
        let t = &handle.as_ref().ok_or_else(|| null_arg("handle"))?.0;
        copy_out(t.weights.as_slice(), buf, capacity, len_out)
    })
}

/// Spearman correlation between weights and dispersions. Returns
/// `PN_STATUS_UNDEFINED` when either side is constant.
///
/// # Safety
/// `handle` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pn_trial_weight_phi_correlation(handle: *const PnTrial, out: *mut f64) -> PnStatus {
    guard(|| {
        let t = &handle.as_ref().ok_or_else(|| null_arg("handle"))?.0;
        let out = out.as_mut().ok_or_else(|| null_arg("out"))?;
        match t.weight_phi_correlation {
            Some(r) => {
                *out = r;
                Ok(())
            }
            None => Err((PnStatus::Undefined, "correlation is undefined for constant input".into())),
        }
    })
}

/// Probability that an inaccurate-majority decision is corrected, for
/// inaccuracy rate `q`, `m` reviews per agent and identification threshold
/// `j`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pn_theory_correction_probability(q: f64, m: usize, j: usize, out: *mut f64) -> PnStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null_arg("out"))?;
        *out = correction_probability(&TheoryParams::new(q, m, j).map_err(lib_err)?);
        Ok(())
    })
}

/// Draws a Mallows ranking of `reference` (best first) with extended
/// dispersion `phi_ext` in `[0, 2]` into `out`, which must hold `len` items.
///
/// # Safety
/// `reference` and `out` must each point to `len` elements.
#[no_mangle]
pub unsafe extern "C" fn pn_mallows_sample(
    reference: *const usize,
    len: usize,
    phi_ext: f64,
    seed: u64,
    out: *mut usize,
) -> PnStatus {
    guard(|| {
        if len == 0 {
            return Ok(());
        }
        if reference.is_null() || out.is_null() {
            return Err(null_arg(if reference.is_null() { "reference" } else { "out" }));
        }
        let d = Dispersion::new(phi_ext).map_err(lib_err)?;
        let items = std::slice::from_raw_parts(reference, len);
        let sample = mallows_sample(items, d, &mut ChaCha8Rng::seed_from_u64(seed));
        ptr::copy_nonoverlapping(sample.as_ptr(), out, len);
        Ok(())
    })
}
