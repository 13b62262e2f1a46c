//! C interface to the scrumsim simulator.
//!
//! Configs and worlds are opaque handles created and freed through this API.
//! Every fallible call returns a [`ScrumsimStatus`]; on failure a message is
//! kept per thread and can be read with [`scrumsim_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufWriter;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use scrumsim::kernels;
use scrumsim::metrics::write_csv;
use scrumsim::sweep::{execute_sweep, SweepDesign};
use scrumsim::{Error, World, WorldConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScrumsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ConfigError = 3,
    Terminated = 4,
    IoError = 5,
    RunError = 6,
    Panic = 7,
}

/// Opaque model configuration.
pub struct ScrumsimConfig {
    inner: WorldConfig,
}

/// Opaque simulation world.
pub struct ScrumsimWorld {
    inner: World,
}

/// Counters for a world's current state.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScrumsimSummary {
    pub tick: u32,
    pub ticks_elapsed: u32,
    pub solved: u32,
    pub open: u32,
    pub velocity: f64,
    pub solved_senior: u32,
    pub solved_mid: u32,
    pub solved_junior: u32,
    pub member_reads: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    let c = CString::new(msg).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> ScrumsimStatus {
    match err {
        Error::Config(_)
        | Error::UnknownKey(_)
        | Error::InvalidValue { .. }
        | Error::Parse { .. } => ScrumsimStatus::ConfigError,
        Error::Design(_) => ScrumsimStatus::InvalidArgument,
        Error::Terminated { .. } => ScrumsimStatus::Terminated,
        Error::Io { .. } => ScrumsimStatus::IoError,
        _ => ScrumsimStatus::RunError,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard<F>(f: F) -> ScrumsimStatus
where
    F: FnOnce() -> Result<(), FfiError>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ScrumsimStatus::Ok,
        Ok(Err(FfiError(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ScrumsimStatus::Panic
        }
    }
}

struct FfiError(ScrumsimStatus, String);

impl From<Error> for FfiError {
    fn from(e: Error) -> Self {
        FfiError(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> FfiError {
    FfiError(ScrumsimStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, FfiError> {
    if p.is_null() {
        return Err(null(what));
    }
    // SAFETY: caller passes a NUL-terminated string
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| {
        FfiError(
            ScrumsimStatus::InvalidArgument,
            format!("{what} is not UTF-8"),
        )
    })
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn scrumsim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn scrumsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// New config holding the built-in defaults. Free with
/// [`scrumsim_config_free`].
#[no_mangle]
pub extern "C" fn scrumsim_config_new() -> *mut ScrumsimConfig {
    Box::into_raw(Box::new(ScrumsimConfig {
        inner: WorldConfig::default(),
    }))
}

/// Loads a `key = value` config file into `*out`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn scrumsim_config_load(
    path: *const c_char,
    out: *mut *mut ScrumsimConfig,
) -> ScrumsimStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = unsafe { str_arg(path, "path") }?;
        let inner = WorldConfig::load(Path::new(path))?;
        unsafe { *out = Box::into_raw(Box::new(ScrumsimConfig { inner })) };
        Ok(())
    })
}

/// Sets one parameter by name, e.g. `("sociable", "true")`.
///
/// # Safety
/// `config` must come from this library; `key` and `value` must be
/// NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn scrumsim_config_set(
    config: *mut ScrumsimConfig,
    key: *const c_char,
    value: *const c_char,
) -> ScrumsimStatus {
    guard(|| {
        let cfg = unsafe { config.as_mut() }.ok_or_else(|| null("config"))?;
        let key = unsafe { str_arg(key, "key") }?;
        let value = unsafe { str_arg(value, "value") }?;
        cfg.inner.set(key, value)?;
        Ok(())
    })
}

/// # Safety
/// `config` must come from this library and not be used afterwards. NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn scrumsim_config_free(config: *mut ScrumsimConfig) {
    if !config.is_null() {
        drop(unsafe { Box::from_raw(config) });
    }
}

/// Samples the initial world for `config` into `*out`.
///
/// # Safety
/// `config` must come from this library and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn scrumsim_world_new(
    config: *const ScrumsimConfig,
    out: *mut *mut ScrumsimWorld,
) -> ScrumsimStatus {
    guard(|| {
        let cfg = unsafe { config.as_ref() }.ok_or_else(|| null("config"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = World::setup(&cfg.inner)?;
        unsafe { *out = Box::into_raw(Box::new(ScrumsimWorld { inner })) };
        Ok(())
    })
}

/// Advances one tick. Returns `Terminated` once the run is over.
///
/// # Safety
/// `world` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn scrumsim_world_step(world: *mut ScrumsimWorld) -> ScrumsimStatus {
    guard(|| {
        let w = unsafe { world.as_mut() }.ok_or_else(|| null("world"))?;
        w.inner.step()?;
        Ok(())
    })
}

/// Steps until the run terminates.
///
/// # Safety
/// `world` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn scrumsim_world_run(world: *mut ScrumsimWorld) -> ScrumsimStatus {
    guard(|| {
        let w = unsafe { world.as_mut() }.ok_or_else(|| null("world"))?;
        w.inner.run_to_end()?;
        Ok(())
    })
}

/// 1 if the world has terminated, 0 if not, -1 for NULL.
///
/// # Safety
/// `world` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn scrumsim_world_is_terminated(world: *const ScrumsimWorld) -> i32 {
    match unsafe { world.as_ref() } {
        Some(w) => i32::from(w.inner.is_terminated()),
        None => -1,
    }
}

/// # Safety
/// `world` must come from this library and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn scrumsim_world_summary(
    world: *const ScrumsimWorld,
    out: *mut ScrumsimSummary,
) -> ScrumsimStatus {
    guard(|| {
        let w = unsafe { world.as_ref() }.ok_or_else(|| null("world"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let row = scrumsim::metrics::collect(&w.inner, 0);
        *out = ScrumsimSummary {
            tick: w.inner.tick,
            ticks_elapsed: row.ticks,
            solved: row.solved,
            open: w.inner.open_count() as u32,
            velocity: row.velocity,
            solved_senior: row.solved_by_class[0],
            solved_mid: row.solved_by_class[1],
            solved_junior: row.solved_by_class[2],
            member_reads: w.inner.member_competence_reads(),
        };
        Ok(())
    })
}

/// # Safety
/// `world` must come from this library and not be used afterwards. NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn scrumsim_world_free(world: *mut ScrumsimWorld) {
    if !world.is_null() {
        drop(unsafe { Box::from_raw(world) });
    }
}

/// Runs the four sociable/curious scenarios over `config` and writes the
/// results CSV to `path`.
///
/// # Safety
/// `config` must come from this library and `path` must be a NUL-terminated
/// string.
#[no_mangle]
pub unsafe extern "C" fn scrumsim_scenarios_csv(
    config: *const ScrumsimConfig,
    repetitions: u32,
    master_seed: u64,
    workers: u32,
    path: *const c_char,
) -> ScrumsimStatus {
    guard(|| {
        let cfg = unsafe { config.as_ref() }.ok_or_else(|| null("config"))?;
        let path = unsafe { str_arg(path, "path") }?;
        if repetitions == 0 || workers == 0 {
            return Err(FfiError(
                ScrumsimStatus::InvalidArgument,
                "repetitions and workers must be at least 1".into(),
            ));
        }
        let design = SweepDesign::scenarios(cfg.inner.clone(), repetitions, master_seed);
        let rows = execute_sweep(&design, workers as usize)?;
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        write_csv(&rows, BufWriter::new(file))?;
        Ok(())
    })
}

unsafe fn members(sosd: *const f64, c: *const f64, n: usize) -> Option<Vec<(f64, f64)>> {
    if n == 0 {
        return Some(Vec::new());
    }
    if sosd.is_null() || c.is_null() {
        return None;
    }
    // SAFETY: caller guarantees n readable elements in each array
    let (s, c) = unsafe {
        (
            std::slice::from_raw_parts(sosd, n),
            std::slice::from_raw_parts(c, n),
        )
    };
    Some(s.iter().copied().zip(c.iter().copied()).collect())
}

/// `c_lead + sum(sosd[j] * c[j])`. NaN if an array is NULL with `n > 0`.
///
/// # Safety
/// `sosd` and `c` must each point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn scrumsim_combine_linear(
    c_lead: f64,
    sosd: *const f64,
    c: *const f64,
    n: usize,
) -> f64 {
    match unsafe { members(sosd, c, n) } {
        Some(m) => kernels::combine_linear(c_lead, &m),
        None => f64::NAN,
    }
}

/// Non-linear combination with the default caps. NaN if an array is NULL
/// with `n > 0`.
///
/// # Safety
/// `sosd` and `c` must each point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn scrumsim_combine_nonlinear(
    c_lead: f64,
    sosd_lead: f64,
    sosd: *const f64,
    c: *const f64,
    n: usize,
) -> f64 {
    let defaults = WorldConfig::default();
    match unsafe { members(sosd, c, n) } {
        Some(m) => kernels::combine_nonlinear(
            c_lead,
            sosd_lead,
            &m,
            defaults.exponent_cap,
            defaults.contribution_cap,
        ),
        None => f64::NAN,
    }
}
