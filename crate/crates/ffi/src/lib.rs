//! C ABI over `sourcebf`.
//!
//! Every fallible function returns an [`SbfStatus`] and writes its result
//! through an out-pointer. On failure a description is available from
//! [`sbf_last_error_message`] on the same thread. Handles are opaque and
//! must be released with their matching `_free` function; strings returned
//! to the caller are released with [`sbf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use sourcebf::cli::evaluate_config;
use sourcebf::config::RunConfig;
use sourcebf::evaluator::BayesFactorReport;
use sourcebf::evidence::{load_dataset, ColumnSchema, Dataset};
use sourcebf::{Error, ErrorCategory};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbfStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// An argument was out of range or a string was not valid UTF-8.
    InvalidArgument = 2,
    Config = 3,
    Data = 4,
    Numerical = 5,
    Internal = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

/// Which value of evidence to read from a report.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbfForm {
    /// Alternative-population parameters fixed at their estimates.
    PlugIn = 0,
    /// Alternative-population parameters integrated over their posterior.
    Full = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbfFormat {
    /// TOML document.
    Structured = 0,
    Text = 1,
}

/// Parsed run configuration.
pub struct SbfConfig {
    inner: RunConfig,
}

/// Fragment measurements grouped by source.
pub struct SbfDataset {
    inner: Dataset,
}

/// Both values of evidence with their component densities and provenance.
pub struct SbfReport {
    inner: BayesFactorReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(SbfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.category() {
            ErrorCategory::Config => SbfStatus::Config,
            ErrorCategory::Data => SbfStatus::Data,
            ErrorCategory::Numerical => SbfStatus::Numerical,
            ErrorCategory::Internal => SbfStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SbfStatus::NullPointer, format!("{what} is NULL"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> SbfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SbfStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {message}"));
            SbfStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(SbfStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn handle_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn free_box<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sbf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Description of the last failure on this thread, or NULL after a success.
/// The pointer stays valid until the next call into the library on this
/// thread.
#[no_mangle]
pub extern "C" fn sbf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sbf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Reads a TOML run configuration. Relative paths inside it resolve against
/// the file's directory.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbf_config_load(path: *const c_char, out: *mut *mut SbfConfig) -> SbfStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let inner = RunConfig::load(std::path::Path::new(path))?;
        write_out(out, Box::into_raw(Box::new(SbfConfig { inner })))
    })
}

/// Parses configuration text. Relative paths resolve against `base_dir`.
///
/// # Safety
/// `text` and `base_dir` must be NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sbf_config_parse(
    text: *const c_char,
    base_dir: *const c_char,
    out: *mut *mut SbfConfig,
) -> SbfStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let base = PathBuf::from(str_arg(base_dir, "base_dir")?);
        let inner = RunConfig::parse(text, base)?;
        write_out(out, Box::into_raw(Box::new(SbfConfig { inner })))
    })
}

/// Replaces the sampler seed.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sbf_config_set_seed(config: *mut SbfConfig, seed: u64) -> SbfStatus {
    guard(|| {
        handle_mut(config, "config")?.inner.mcmc.seed = seed;
        Ok(())
    })
}

/// Replaces the per-chain iteration count and burn-in.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sbf_config_set_iterations(
    config: *mut SbfConfig,
    iterations: usize,
    burn_in: usize,
) -> SbfStatus {
    guard(|| {
        let c = handle_mut(config, "config")?;
        let mut mcmc = c.inner.mcmc;
        mcmc.iterations = iterations;
        mcmc.burn_in = burn_in;
        mcmc.validate()?;
        c.inner.mcmc = mcmc;
        Ok(())
    })
}

/// # Safety
/// `config` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sbf_config_free(config: *mut SbfConfig) {
    free_box(config)
}

/// Loads `source,fragment,<features...>` CSV; every other column is a feature.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbf_dataset_load(path: *const c_char, out: *mut *mut SbfDataset) -> SbfStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let inner = load_dataset(std::io::BufReader::new(file), &ColumnSchema::default())?;
        write_out(out, Box::into_raw(Box::new(SbfDataset { inner })))
    })
}

/// Number of sources, fragments and features.
///
/// # Safety
/// `dataset` must be a live handle; each out-pointer must be NULL or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sbf_dataset_shape(
    dataset: *const SbfDataset,
    sources: *mut usize,
    fragments: *mut usize,
    dim: *mut usize,
) -> SbfStatus {
    guard(|| {
        let d = &handle(dataset, "dataset")?.inner;
        for (out, value) in [(sources, d.groups.len()), (fragments, d.fragment_count()), (dim, d.dim())] {
            if !out.is_null() {
                out.write(value);
            }
        }
        Ok(())
    })
}

/// # Safety
/// `dataset` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sbf_dataset_free(dataset: *mut SbfDataset) {
    free_box(dataset)
}

/// Runs the scenario of `config` and returns its report. Nothing is written
/// to disk.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbf_evaluate(config: *const SbfConfig, out: *mut *mut SbfReport) -> SbfStatus {
    guard(|| {
        let c = handle(config, "config")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let output = evaluate_config(&c.inner)?;
        write_out(out, Box::into_raw(Box::new(SbfReport { inner: output.report })))
    })
}

/// Natural log of the value of evidence and its Monte Carlo standard error
/// (zero contributions come from closed-form parts).
///
/// # Safety
/// `report` must be a live handle; `log_v` must be writable; `mc_se` may be
/// NULL.
#[no_mangle]
pub unsafe extern "C" fn sbf_report_log_v(
    report: *const SbfReport,
    form: SbfForm,
    log_v: *mut f64,
    mc_se: *mut f64,
) -> SbfStatus {
    guard(|| {
        let r = &handle(report, "report")?.inner;
        let v = match form {
            SbfForm::PlugIn => &r.plugin,
            SbfForm::Full => &r.full,
        };
        write_out(log_v, v.log_v)?;
        if !mc_se.is_null() {
            mc_se.write(v.mc_se_log_v);
        }
        Ok(())
    })
}

/// Log densities behind both values: the numerator and the two denominators.
///
/// # Safety
/// `report` must be a live handle; each out-pointer must be NULL or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sbf_report_log_densities(
    report: *const SbfReport,
    numerator: *mut f64,
    denominator_plugin: *mut f64,
    denominator_full: *mut f64,
) -> SbfStatus {
    guard(|| {
        let r = &handle(report, "report")?.inner;
        for (out, value) in [
            (numerator, r.numerator.log_value),
            (denominator_plugin, r.denominator_plugin.log_value),
            (denominator_full, r.denominator_full.log_value),
        ] {
            if !out.is_null() {
                out.write(value);
            }
        }
        Ok(())
    })
}

/// Renders the report. The string must be released with [`sbf_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbf_report_render(
    report: *const SbfReport,
    format: SbfFormat,
    out: *mut *mut c_char,
) -> SbfStatus {
    guard(|| {
        let r = &handle(report, "report")?.inner;
        let text = match format {
            SbfFormat::Structured => r.render_structured(),
            SbfFormat::Text => r.render_text(),
        };
        let c = CString::new(text).map_err(|_| Failure(SbfStatus::Internal, "report contains NUL".into()))?;
        write_out(out, c.into_raw())
    })
}

/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sbf_report_free(report: *mut SbfReport) {
    free_box(report)
}
