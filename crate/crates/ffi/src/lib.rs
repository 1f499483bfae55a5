//! C ABI over `bft-core`.
//!
//! Every function returns a [`BftStatus`] and writes results through out
//! pointers. On failure a message is stored per thread and can be fetched
//! with [`bft_last_error_message`]. Strings handed out by this library must
//! be released with [`bft_string_free`]; circuits with [`bft_circuit_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bft_core::bounds::{self, CodeParams, ExternalConstants};
use bft_core::gadgets::{schedule_stats, to_text, with_preceding_cnot, GadgetCircuit, GadgetSpec};
use bft_core::noise::NoiseParams;
use bft_core::sim::estimate_failure_circuit;
use bft_core::Error;

/// Result code of every call. Numeric values match the `bft` CLI exit codes
/// where they overlap.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BftStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    InvalidArgument = 2,
    /// Infeasible request or tractability guard tripped.
    Infeasible = 3,
    Internal = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BftGadget {
    MeasZl = 0,
    ErrorCorrect = 1,
    Cnot = 2,
    BellPrep = 3,
    BellMeas = 4,
}

/// Gadget parameters. Fields a gadget does not use are ignored.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct BftGadgetParams {
    pub kind: BftGadget,
    pub n: u32,
    pub r: u32,
    pub r1: u32,
    pub r2: u32,
    pub t: u32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct BftNoise {
    pub epsilon: f64,
    pub epsilon_prime: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct BftBoundReport {
    pub eps_nd: f64,
    pub eps_mzz: f64,
    pub eps_mzzz: f64,
    pub eps_mx1: f64,
    pub eps_mx2: f64,
    pub eps_d: f64,
    pub eps_total: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct BftInjectionReport {
    pub eps_bm: f64,
    pub eps_inject: f64,
    pub pass: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct BftFlaggedBounds {
    pub eps_flag: f64,
    pub eps_noflag: f64,
    pub eps_cond_accept: f64,
    pub denominator: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct BftThreshold {
    pub eps_max: f64,
    pub n: u32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct BftCircuitStats {
    pub qubits: u64,
    pub cphase_count: u64,
    pub prep_count: u64,
    pub meas_count: u64,
    pub idle_data_steps: u64,
    pub depth: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct BftSimResult {
    pub trials: u64,
    pub failures: u64,
    pub flag_raised: u64,
    pub accepted: u64,
    pub accepted_failures: u64,
    pub failure_rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Opaque gadget circuit.
pub struct BftCircuit {
    inner: GadgetCircuit,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> BftStatus {
    match e.exit_code() {
        2 => BftStatus::InvalidArgument,
        3 => BftStatus::Infeasible,
        _ => BftStatus::Internal,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Error>) -> BftStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BftStatus::Ok,
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            BftStatus::Internal
        }
    }
}

fn null_error(name: &str) -> BftStatus {
    set_error(format!("{name} is null"));
    BftStatus::NullPointer
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return null_error(stringify!($p));
        })+
    };
}

fn noise(p: BftNoise) -> Result<NoiseParams, Error> {
    NoiseParams::new(p.epsilon, p.epsilon_prime)
}

fn spec(p: &BftGadgetParams) -> GadgetSpec {
    let (n, r, r1, r2, t) = (p.n as usize, p.r as usize, p.r1 as usize, p.r2 as usize, p.t as usize);
    match p.kind {
        BftGadget::MeasZl => GadgetSpec::MeasZl { n, r },
        BftGadget::ErrorCorrect => GadgetSpec::ErrorCorrect { n, r },
        BftGadget::Cnot => GadgetSpec::Cnot { n, r1, r2, r },
        BftGadget::BellPrep => GadgetSpec::BellPrep { n, t },
        BftGadget::BellMeas => GadgetSpec::BellMeas { n, r1, r2 },
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Copy of the calling thread's last error message, or null if none.
/// Release with `bft_string_free`.
#[no_mangle]
pub extern "C" fn bft_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().clone().map_or(ptr::null_mut(), into_c_string))
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bft_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bft_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bft_cnot_failure_bound(
    n: u32,
    r1: u32,
    r2: u32,
    r: u32,
    p: BftNoise,
    out: *mut BftBoundReport,
) -> BftStatus {
    non_null!(out);
    guard(|| {
        let cp = CodeParams::new(n as usize, r1 as usize, r2 as usize, r as usize)?;
        let b = bounds::cnot_failure_bound(&cp, &noise(p)?)?;
        *out = BftBoundReport {
            eps_nd: b.eps_nd,
            eps_mzz: b.eps_mzz,
            eps_mzzz: b.eps_mzzz,
            eps_mx1: b.eps_mx1,
            eps_mx2: b.eps_mx2,
            eps_d: b.eps_d,
            eps_total: b.eps_total,
        };
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bft_effective_noise(n: u32, p: BftNoise, out: *mut f64) -> BftStatus {
    non_null!(out);
    guard(|| {
        *out = bounds::effective_noise_n(n as usize, &noise(p)?)?;
        Ok(())
    })
}

/// Searches odd n in `[n_min, n_max]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bft_optimize_threshold(
    bias: f64,
    target: f64,
    n_min: u32,
    n_max: u32,
    out: *mut BftThreshold,
) -> BftStatus {
    non_null!(out);
    guard(|| {
        let range: Vec<usize> = (n_min as usize..=n_max as usize).filter(|n| n % 2 == 1).collect();
        let res = bounds::optimize_threshold(bias, target, &range)?;
        *out = BftThreshold { eps_max: res.eps_max, n: res.best_params.n as u32 };
        Ok(())
    })
}

/// Uses the default external constants.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bft_injection_bound(n: u32, r: u32, p: BftNoise, out: *mut BftInjectionReport) -> BftStatus {
    non_null!(out);
    guard(|| {
        let (n, r) = (n as usize, r as usize);
        let cp = CodeParams::new(n, n.max(r), n.max(r), r)?;
        let inj = bounds::injection_bound(&cp, &noise(p)?, &ExternalConstants::default())?;
        *out = BftInjectionReport { eps_bm: inj.eps_bm, eps_inject: inj.eps_inject, pass: inj.pass };
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bft_flagged_bounds(
    n: u32,
    r1: u32,
    t: u32,
    p: BftNoise,
    out: *mut BftFlaggedBounds,
) -> BftStatus {
    non_null!(out);
    guard(|| {
        let f = bounds::flagged_bounds(n as usize, r1 as usize, t as usize, &noise(p)?)?;
        *out = BftFlaggedBounds {
            eps_flag: f.eps_flag,
            eps_noflag: f.eps_noflag,
            eps_cond_accept: f.eps_cond_accept,
            denominator: f.denominator,
        };
        Ok(())
    })
}

/// Builds a gadget circuit. With `preceding_r > 0` the inputs are fed by
/// noisy CNOT gadgets of that repetition count.
///
/// # Safety
/// `params` must be readable and `out` valid for writes. On success `*out`
/// owns a circuit to be released with `bft_circuit_free`.
#[no_mangle]
pub unsafe extern "C" fn bft_circuit_new(
    params: *const BftGadgetParams,
    preceding_r: u32,
    out: *mut *mut BftCircuit,
) -> BftStatus {
    non_null!(params, out);
    *out = ptr::null_mut();
    guard(|| {
        let mut c = spec(&*params).build()?;
        if preceding_r > 0 {
            c = with_preceding_cnot(&c, preceding_r as usize)?;
        }
        *out = Box::into_raw(Box::new(BftCircuit { inner: c }));
        Ok(())
    })
}

/// # Safety
/// `c` must be null or a circuit from `bft_circuit_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bft_circuit_free(c: *mut BftCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` must be a live circuit and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bft_circuit_stats(c: *const BftCircuit, out: *mut BftCircuitStats) -> BftStatus {
    non_null!(c, out);
    guard(|| {
        let c = &(*c).inner;
        let s = schedule_stats(c);
        *out = BftCircuitStats {
            qubits: c.qubit_count() as u64,
            cphase_count: s.cphase_count as u64,
            prep_count: s.prep_count as u64,
            meas_count: s.meas_count as u64,
            idle_data_steps: s.idle_data_steps as u64,
            depth: s.depth as u64,
        };
        Ok(())
    })
}

/// Schedule as text, one operation per line. Release with `bft_string_free`.
///
/// # Safety
/// `c` must be a live circuit and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bft_circuit_to_text(c: *const BftCircuit, out: *mut *mut c_char) -> BftStatus {
    non_null!(c, out);
    *out = ptr::null_mut();
    guard(|| {
        *out = into_c_string(to_text(&(*c).inner));
        Ok(())
    })
}

/// Monte Carlo failure rate with clean inputs. Deterministic in `seed`.
///
/// # Safety
/// `c` must be a live circuit and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bft_circuit_simulate(
    c: *const BftCircuit,
    p: BftNoise,
    trials: u64,
    seed: u64,
    out: *mut BftSimResult,
) -> BftStatus {
    non_null!(c, out);
    guard(|| {
        let r = estimate_failure_circuit(&(*c).inner, &noise(p)?, trials, seed, &[])?;
        *out = BftSimResult {
            trials: r.trials,
            failures: r.failures,
            flag_raised: r.flag_raised,
            accepted: r.accepted,
            accepted_failures: r.accepted_failures,
            failure_rate: r.failure_rate,
            ci_lo: r.ci_lo,
            ci_hi: r.ci_hi,
        };
        Ok(())
    })
}
