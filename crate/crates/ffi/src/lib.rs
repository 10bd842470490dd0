//! C ABI over `mzak`.
//!
//! Fallible functions return an [`MzStatus`]. On failure the message is kept
//! per thread and can be copied out with [`mz_last_error_message`]. Handles
//! are created by `*_new`/`*_parse`/`*_load`, owned by the caller and
//! released with the matching `*_free`; passing a freed handle is undefined
//! behaviour. Panics never cross the boundary, they become
//! `MZ_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use mzak::dynamics::checkpoint::{self, Checkpoint};
use mzak::dynamics::{State, Stepper};
use mzak::harness::{self, RunConfig, MAX_SEED};
use mzak::invariants::{self, C0Options};
use mzak::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MzStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidGrid = 3,
    Representation = 4,
    GridMismatch = 5,
    Dimension = 6,
    ZeroMode = 7,
    Conjugacy = 8,
    Realness = 9,
    BlowUp = 10,
    Inadmissible = 11,
    LatticeCap = 12,
    InvalidArgument = 13,
    Format = 14,
    Config = 15,
    Io = 16,
    Panic = 17,
}

impl From<&Error> for MzStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidGrid(_) => MzStatus::InvalidGrid,
            Error::Representation { .. } => MzStatus::Representation,
            Error::GridMismatch => MzStatus::GridMismatch,
            Error::Dimension { .. } => MzStatus::Dimension,
            Error::ZeroMode(_) => MzStatus::ZeroMode,
            Error::Conjugacy { .. } => MzStatus::Conjugacy,
            Error::Realness { .. } => MzStatus::Realness,
            Error::BlowUp { .. } => MzStatus::BlowUp,
            Error::Inadmissible { .. } => MzStatus::Inadmissible,
            Error::LatticeCap { .. } => MzStatus::LatticeCap,
            Error::InvalidArgument(_) => MzStatus::InvalidArgument,
            Error::Format(_) => MzStatus::Format,
            Error::Config(_) => MzStatus::Config,
            Error::Io(_) => MzStatus::Io,
        }
    }
}

/// Invariants of a simulation state.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MzInvariants {
    pub t: f64,
    pub i1: f64,
    pub i2: f64,
    pub m: f64,
    pub e_tilde: f64,
}

/// Parsed and validated run configuration.
pub struct MzConfig {
    inner: RunConfig,
}

/// A state together with the stepper advancing it.
pub struct MzSimulation {
    stepper: Stepper,
    state: State,
    step: u64,
    config_hash: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let clean = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = clean);
}

enum Failure {
    Status(MzStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(MzStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            MzStatus::Ok
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_last_error(&msg);
            s
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(&e.to_string());
            MzStatus::from(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("panic: {msg}"));
            MzStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Status(MzStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mz_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`) and returns the length needed
/// including the terminator. The message is empty after a successful call.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn mz_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Parses a TOML config document.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mz_config_parse(text: *const c_char, out: *mut *mut MzConfig) -> MzStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = std::ptr::null_mut();
        let inner = harness::parse_config(read_str(text, "text")?)?;
        *out = Box::into_raw(Box::new(MzConfig { inner }));
        Ok(())
    })
}

/// Reads and parses a config file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mz_config_load(path: *const c_char, out: *mut *mut MzConfig) -> MzStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = std::ptr::null_mut();
        let inner = harness::load_config(&PathBuf::from(read_str(path, "path")?))?;
        *out = Box::into_raw(Box::new(MzConfig { inner }));
        Ok(())
    })
}

/// # Safety
/// `config` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn mz_config_free(config: *mut MzConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mz_config_set_seed(config: *mut MzConfig, seed: u64) -> MzStatus {
    guard(|| {
        let c = deref_mut(config, "config")?;
        if seed > MAX_SEED {
            return Err(Failure::Status(
                MzStatus::Config,
                format!("seed must be <= {MAX_SEED}"),
            ));
        }
        c.inner.seed = seed;
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle and `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mz_config_set_output_dir(
    config: *mut MzConfig,
    dir: *const c_char,
) -> MzStatus {
    guard(|| {
        let c = deref_mut(config, "config")?;
        c.inner.output_dir = PathBuf::from(read_str(dir, "dir")?);
        Ok(())
    })
}

/// Reproducibility hash of the config (output directory excluded).
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mz_config_hash(config: *const MzConfig, out: *mut u64) -> MzStatus {
    guard(|| {
        let c = deref(config, "config")?;
        *deref_mut(out, "out")? = c.inner.hash();
        Ok(())
    })
}

/// Runs the configured mode, writing artifacts to the output directory.
/// `exit_status` receives 0 when every check passed and 4 otherwise.
///
/// # Safety
/// `config` must be a live handle and `exit_status` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mz_run(config: *const MzConfig, exit_status: *mut i32) -> MzStatus {
    guard(|| {
        let c = deref(config, "config")?;
        let out = deref_mut(exit_status, "exit_status")?;
        *out = harness::run(&c.inner)?.exit_code();
        Ok(())
    })
}

/// Initial state of `config` (its checkpoint when `resume_from` is set).
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mz_simulation_new(
    config: *const MzConfig,
    out: *mut *mut MzSimulation,
) -> MzStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = std::ptr::null_mut();
        let c = &deref(config, "config")?.inner;
        let (state, step) = harness::initial_state(c)?;
        let stepper = Stepper::new(*state.grid(), state.geometry, &c.sim)?;
        *out = Box::into_raw(Box::new(MzSimulation {
            stepper,
            state,
            step,
            config_hash: c.hash(),
        }));
        Ok(())
    })
}

/// # Safety
/// `sim` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn mz_simulation_free(sim: *mut MzSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances by `steps` steps. On failure the state holds the last step
/// that was attempted.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mz_simulation_advance(sim: *mut MzSimulation, steps: u64) -> MzStatus {
    guard(|| {
        let s = deref_mut(sim, "sim")?;
        for _ in 0..steps {
            s.stepper.advance(&mut s.state).map_err(|e| match e {
                Error::BlowUp { t, .. } => Error::BlowUp {
                    step: s.step + 1,
                    t,
                },
                other => other,
            })?;
            s.step += 1;
        }
        Ok(())
    })
}

/// # Safety
/// `sim` must be a live handle; `t` and `step` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn mz_simulation_time(
    sim: *const MzSimulation,
    t: *mut f64,
    step: *mut u64,
) -> MzStatus {
    guard(|| {
        let s = deref(sim, "sim")?;
        if let Some(t) = t.as_mut() {
            *t = s.state.t;
        }
        if let Some(step) = step.as_mut() {
            *step = s.step;
        }
        Ok(())
    })
}

/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mz_simulation_invariants(
    sim: *const MzSimulation,
    out: *mut MzInvariants,
) -> MzStatus {
    guard(|| {
        let s = deref(sim, "sim")?;
        let q = invariants::measure(&s.state)?;
        *deref_mut(out, "out")? = MzInvariants {
            t: q.t,
            i1: q.i1,
            i2: q.i2,
            m: q.m,
            e_tilde: q.e_tilde(),
        };
        Ok(())
    })
}

/// Relative distance between `χ₋` and the conjugate of `χ₊`.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mz_simulation_conjugacy_residual(
    sim: *const MzSimulation,
    out: *mut f64,
) -> MzStatus {
    guard(|| {
        let s = deref(sim, "sim")?;
        *deref_mut(out, "out")? = s.state.conjugacy_residual();
        Ok(())
    })
}

/// Writes the current state as a checkpoint file.
///
/// # Safety
/// `sim` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mz_simulation_save(
    sim: *const MzSimulation,
    path: *const c_char,
) -> MzStatus {
    guard(|| {
        let s = deref(sim, "sim")?;
        let path = PathBuf::from(read_str(path, "path")?);
        checkpoint::save(
            &path,
            &Checkpoint {
                step: s.step,
                config_hash: s.config_hash,
                state: s.state.clone(),
            },
        )?;
        Ok(())
    })
}

/// Empirical `c₀` on the config's grid, drawn with the config's seed.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mz_estimate_c0(
    config: *const MzConfig,
    ensemble_size: usize,
    out: *mut f64,
) -> MzStatus {
    guard(|| {
        let c = &deref(config, "config")?.inner;
        let out = deref_mut(out, "out")?;
        let grid = c.grid.grid()?;
        let mut opts = C0Options::for_grid(&grid);
        opts.seed = c.seed;
        if let Some(b) = c.trap.band {
            opts.band = b;
        }
        *out = invariants::estimate_c0_with(&grid, c.grid.geometry(), ensemble_size, opts)?;
        Ok(())
    })
}

/// Smaller root `m₁` of `Ẽ − m + c₀m²`; `MZ_STATUS_INVALID_ARGUMENT` when
/// `Ẽ ≥ 1/(4c₀)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mz_smaller_root(c0: f64, e_tilde: f64, out: *mut f64) -> MzStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        match invariants::smaller_root(c0, e_tilde) {
            Some(m1) => {
                *out = m1;
                Ok(())
            }
            None => Err(Failure::Status(
                MzStatus::InvalidArgument,
                format!("no trap: E_tilde = {e_tilde} >= 1/(4 c0) = {}", 0.25 / c0),
            )),
        }
    })
}
