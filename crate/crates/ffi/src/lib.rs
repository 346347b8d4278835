//! C ABI over `bridgecut`.
//!
//! Every fallible call returns a [`BcStatus`]; on failure the message is kept
//! per thread and read back with [`bc_last_error_message`]. Handles are
//! opaque, created by `*_new`/`*_simulate` and released by the matching
//! `*_free`. Buffers are caller-allocated: a call that needs more room than
//! `capacity` writes nothing, stores the required length and returns
//! [`BcStatus::BufferTooSmall`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bridgecut::bridge::{
    d_partition, sample_local_time, simulate_bridge, simulate_pseudo_bridge, t_partition, DiscretePath, ExcursionSet,
    LocalTimeProfile,
};
use bridgecut::partitions::{exact_t_count_dist, ratio_to_f64};
use bridgecut::randkit::{gem_lengths, sample_stable, StableParams};
use bridgecut::rng::StreamRng;
use bridgecut::suites::{Suite, Verifier, VerifyConfig};
use bridgecut::{Error, RngStream};
use rand::Rng;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    BufferTooSmall = 4,
    Io = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcPartitionKind {
    D = 0,
    T = 1,
}

/// Seeded random stream.
pub struct BcRng {
    rng: StreamRng,
}

/// A simulated path on `[0, duration]` with its local time at zero.
pub struct BcBridge {
    path: DiscretePath,
    local_time: LocalTimeProfile,
    zeros: ExcursionSet,
}

/// Runs acceptance criteria with shared cached batches.
pub struct BcVerifier {
    verifier: Verifier,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BcStatus {
    match e {
        Error::Parameter(_) | Error::Domain(_) | Error::Contract(_) | Error::Refused(_) => BcStatus::InvalidArgument,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => BcStatus::Io,
        _ => BcStatus::Numerical,
    }
}

struct Fail(BcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(BcStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BcStatus {
    let out = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => return BcStatus::Ok,
        Ok(Err(fail)) => fail,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            Fail(BcStatus::Panic, msg)
        }
    };
    set_error(out.1);
    out.0
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn get_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Copies `src` into `buf` when it fits; always stores the length in `len`.
unsafe fn fill(src: &[f64], buf: *mut f64, capacity: usize, len: *mut usize) -> Result<(), Fail> {
    put(len, src.len(), "len")?;
    if src.len() > capacity {
        return Err(Fail(
            BcStatus::BufferTooSmall,
            format!("buffer holds {capacity} values, {} needed", src.len()),
        ));
    }
    if !src.is_empty() {
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    }
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Length in bytes of the last error message on this thread, excluding the
/// terminating NUL; 0 when there is none.
#[no_mangle]
pub extern "C" fn bc_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(0, |c| c.as_bytes().len()))
}

/// Copies the last error message, truncated and NUL-terminated, into `buf`.
/// Returns the full message length.
///
/// # Safety
/// `buf` must point to `capacity` writable bytes or be null.
#[no_mangle]
pub unsafe extern "C" fn bc_last_error_message(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_ref().map_or(&[][..], |c| c.as_bytes());
        if !buf.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Opens stream `stream` of `seed`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bc_rng_new(seed: u64, stream: u64, out: *mut *mut BcRng) -> BcStatus {
    guard(|| {
        let rng = Box::new(BcRng { rng: RngStream::new(seed, stream).rng() });
        put(out, Box::into_raw(rng), "out")
    })
}

/// # Safety
/// `rng` must come from [`bc_rng_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bc_rng_free(rng: *mut BcRng) {
    if !rng.is_null() {
        drop(Box::from_raw(rng));
    }
}

/// Uniform on `[0,1)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bc_rng_uniform(rng: *mut BcRng, out: *mut f64) -> BcStatus {
    guard(|| {
        let r = get_mut(rng, "rng")?;
        put(out, r.rng.random::<f64>(), "out")
    })
}

/// Stable subordinator at local-time level `level`, with
/// `E exp(-ξ τ) = exp(-level c ξ^alpha)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bc_sample_stable(rng: *mut BcRng, alpha: f64, c: f64, level: f64, out: *mut f64) -> BcStatus {
    guard(|| {
        let r = get_mut(rng, "rng")?;
        let p = StableParams::new(alpha, c)?;
        put(out, sample_stable(&p, level, &mut r.rng)?, "out")
    })
}

/// GEM(theta) sticks until the residual mass drops below `tolerance`.
///
/// # Safety
/// `buf` must hold `capacity` doubles; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bc_sample_gem(
    rng: *mut BcRng,
    theta: f64,
    tolerance: f64,
    buf: *mut f64,
    capacity: usize,
    len: *mut usize,
    residual: *mut f64,
) -> BcStatus {
    guard(|| {
        let r = get_mut(rng, "rng")?;
        let s = gem_lengths(theta, tolerance, &mut r.rng)?;
        put(residual, s.residual_mass, "residual")?;
        fill(&s.values, buf, capacity, len)
    })
}

/// Simulates a Brownian bridge on `m` uniform steps, or with `pseudo` a
/// pseudo-bridge on `m` steps of a geometric grid.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bc_bridge_simulate(rng: *mut BcRng, m: usize, pseudo: bool, out: *mut *mut BcBridge) -> BcStatus {
    guard(|| {
        let r = get_mut(rng, "rng")?;
        let (path, local_time) = if pseudo {
            let pb = simulate_pseudo_bridge(m, &mut r.rng)?;
            (pb.path, pb.local_time)
        } else {
            let path = simulate_bridge(m, &mut r.rng)?;
            let lt = sample_local_time(&path, &mut r.rng);
            (path, lt)
        };
        let zeros = ExcursionSet::from_local_time(&path, &local_time);
        put(out, Box::into_raw(Box::new(BcBridge { path, local_time, zeros })), "out")
    })
}

/// # Safety
/// `bridge` must come from [`bc_bridge_simulate`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bc_bridge_free(bridge: *mut BcBridge) {
    if !bridge.is_null() {
        drop(Box::from_raw(bridge));
    }
}

/// Number of grid steps; the path has one more value.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bc_bridge_steps(bridge: *const BcBridge, out: *mut usize) -> BcStatus {
    guard(|| put(out, get(bridge, "bridge")?.path.m(), "out"))
}

/// Total local time at zero.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bc_bridge_local_time(bridge: *const BcBridge, out: *mut f64) -> BcStatus {
    guard(|| put(out, get(bridge, "bridge")?.local_time.total(), "out"))
}

/// Path values at the grid times.
///
/// # Safety
/// `buf` must hold `capacity` doubles; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bc_bridge_values(bridge: *const BcBridge, buf: *mut f64, capacity: usize, len: *mut usize) -> BcStatus {
    guard(|| fill(&get(bridge, "bridge")?.path.values, buf, capacity, len))
}

/// Grid times, from 0 to the path duration.
///
/// # Safety
/// `buf` must hold `capacity` doubles; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bc_bridge_times(bridge: *const BcBridge, buf: *mut f64, capacity: usize, len: *mut usize) -> BcStatus {
    guard(|| fill(&get(bridge, "bridge")?.path.times(), buf, capacity, len))
}

/// Interval lengths of a D- or T-partition of the path, in order.
///
/// # Safety
/// `buf` must hold `capacity` doubles; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bc_bridge_partition(
    bridge: *const BcBridge,
    rng: *mut BcRng,
    kind: BcPartitionKind,
    buf: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> BcStatus {
    guard(|| {
        let b = get(bridge, "bridge")?;
        let r = get_mut(rng, "rng")?;
        let parts = match kind {
            BcPartitionKind::D => d_partition(&b.path, &b.zeros, &b.local_time, &mut r.rng)?,
            BcPartitionKind::T => t_partition(&b.path, &b.local_time, &mut r.rng)?,
        };
        let lengths: Vec<f64> = parts.iter().map(|f| f.length).collect();
        fill(&lengths, buf, capacity, len)
    })
}

/// `P(K_n = k)` for `k = 1..=n`, where `K_n` counts the blocks of the
/// discrete T-partition of `n` exchangeable intervals.
///
/// # Safety
/// `buf` must hold `capacity` doubles; `len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bc_t_count_probabilities(n: usize, buf: *mut f64, capacity: usize, len: *mut usize) -> BcStatus {
    guard(|| {
        let d = exact_t_count_dist(n)?;
        let mut p = vec![0.0; n];
        for (k, q) in d.support.iter().zip(&d.probabilities) {
            p[k - 1] = ratio_to_f64(q);
        }
        fill(&p, buf, capacity, len)
    })
}

/// Verifier with `reps` bridge replicates on a grid of `grid` steps.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bc_verifier_new(seed: u64, reps: usize, grid: usize, out: *mut *mut BcVerifier) -> BcStatus {
    guard(|| {
        let config = VerifyConfig::default().with_seed(seed).with_reps(reps).with_grid(grid);
        let verifier = Verifier::new(config)?;
        put(out, Box::into_raw(Box::new(BcVerifier { verifier })), "out")
    })
}

/// # Safety
/// `verifier` must come from [`bc_verifier_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bc_verifier_free(verifier: *mut BcVerifier) {
    if !verifier.is_null() {
        drop(Box::from_raw(verifier));
    }
}

/// Runs criterion `id` (1 to 12) at the overall suite level.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bc_verifier_criterion(verifier: *const BcVerifier, id: u8, passed: *mut bool) -> BcStatus {
    guard(|| {
        let v = get(verifier, "verifier")?;
        let r = v.verifier.criterion(id, Suite::All.level())?;
        put(passed, r.passed(), "passed")
    })
}
