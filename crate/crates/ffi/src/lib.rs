//! C ABI for the simulator. Handles are opaque pointers with explicit free
//! functions; every fallible call returns a [`QflStatus`] and leaves a
//! human-readable message retrievable via [`qfl_last_error`] on failure.
//!
//! The header `include/qfl_sim.h` is generated from this file by cbindgen
//! at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use qfl_sim::config::ExperimentConfig;
use qfl_sim::federated::{run_experiment, write_metrics_csv, RoundMetrics};
use qfl_sim::privacy::{noise_scale, DpConfig, DpMechanism};
use qfl_sim::qkd::{bb84_exchange, run_test, ChannelConfig, EveKind, EveModel};
use qfl_sim::{rng, Error};

/// Call outcome. Mirrors the CLI exit-code split between configuration
/// errors and runtime aborts.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QflStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidConfig = 2,
    RuntimeAbort = 3,
    Io = 4,
}

/// Adversary selector for [`qfl_bb84_demo`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QflEve {
    None = 0,
    InterceptResend = 1,
    Swap = 2,
    HalfSwap = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QflDpMechanism {
    Laplace = 0,
    Gaussian = 1,
}

/// Metric columns addressable through [`qfl_metrics_value`]; the time
/// columns are wall-clock and not reproducible across runs.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QflMetricColumn {
    GlobalFtValAcc = 0,
    GlobalFtTestAcc = 1,
    GlobalFtValLoss = 2,
    PredTestAcc = 3,
    PredValAcc = 4,
    PredValLoss = 5,
    AvgLocalTrainAcc = 6,
    AvgLocalTestAcc = 7,
    AvgLocalTrainLoss = 8,
    AvgLocalTrainTimeS = 9,
    CommTimeS = 10,
}

/// Result summary of one BB84 demo exchange.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QflQkdSummary {
    pub transmitted_qubits: usize,
    pub sifted_bits: usize,
    pub tested_bits: usize,
    pub error_count: usize,
    pub sift_fraction: f64,
    pub qber: f64,
    /// 1 when the test-bit comparison stayed within `n_allowed`.
    pub passed: u8,
}

/// Opaque experiment configuration handle.
pub struct QflConfig(ExperimentConfig);

/// Opaque per-round metrics handle.
pub struct QflMetrics(Vec<RoundMetrics>);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message);
}

fn status_of(error: &Error) -> QflStatus {
    match error {
        Error::InvalidConfig { .. }
        | Error::DimensionMismatch(_)
        | Error::MalformedPayload(_) => QflStatus::InvalidConfig,
        Error::Io(_) | Error::Csv(_) => QflStatus::Io,
        _ => QflStatus::RuntimeAbort,
    }
}

fn fail(error: &Error) -> QflStatus {
    set_error(&error.to_string());
    status_of(error)
}

/// # Safety
/// `ptr` must be NULL or a NUL-terminated string valid for the call.
unsafe fn cstr_arg(ptr: *const c_char) -> Result<PathBuf, QflStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(QflStatus::NullArgument);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(text) => Ok(PathBuf::from(text)),
        Err(_) => {
            set_error("string argument is not valid UTF-8");
            Err(QflStatus::InvalidConfig)
        }
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qfl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qfl_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Load and validate an experiment config from a TOML file. Returns NULL on
/// failure (see [`qfl_last_error`]). Free with [`qfl_config_free`].
///
/// # Safety
/// `path` must be a NUL-terminated string valid for the call.
#[no_mangle]
pub unsafe extern "C" fn qfl_config_load(path: *const c_char) -> *mut QflConfig {
    let Ok(path) = cstr_arg(path) else {
        return std::ptr::null_mut();
    };
    match ExperimentConfig::load(&path).and_then(|c| c.validate().map(|()| c)) {
        Ok(config) => Box::into_raw(Box::new(QflConfig(config))),
        Err(e) => {
            fail(&e);
            std::ptr::null_mut()
        }
    }
}

/// Parse and validate an experiment config from TOML text. Returns NULL on
/// failure. Free with [`qfl_config_free`].
///
/// # Safety
/// `text` must be a NUL-terminated string valid for the call.
#[no_mangle]
pub unsafe extern "C" fn qfl_config_from_toml(text: *const c_char) -> *mut QflConfig {
    if text.is_null() {
        set_error("null string argument");
        return std::ptr::null_mut();
    }
    let Ok(text) = CStr::from_ptr(text).to_str() else {
        set_error("string argument is not valid UTF-8");
        return std::ptr::null_mut();
    };
    match ExperimentConfig::from_toml_str(text).and_then(|c| c.validate().map(|()| c)) {
        Ok(config) => Box::into_raw(Box::new(QflConfig(config))),
        Err(e) => {
            fail(&e);
            std::ptr::null_mut()
        }
    }
}

/// Clone a config with the device count replaced (sweep expansion).
///
/// # Safety
/// `config` must be a live pointer from a `qfl_config_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn qfl_config_with_devices(
    config: *const QflConfig,
    devices: usize,
) -> *mut QflConfig {
    if config.is_null() {
        set_error("null config");
        return std::ptr::null_mut();
    }
    Box::into_raw(Box::new(QflConfig((*config).0.with_devices(devices))))
}

/// # Safety
/// `config` must be NULL or a pointer from a `qfl_config_*` constructor,
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qfl_config_free(config: *mut QflConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Run the experiment described by `config` and hand back a metrics handle
/// through `out`. The config must carry a single device count.
///
/// # Safety
/// `config` must be a live config pointer; `out` must be a valid location
/// to store the handle.
#[no_mangle]
pub unsafe extern "C" fn qfl_run(
    config: *const QflConfig,
    out: *mut *mut QflMetrics,
) -> QflStatus {
    if config.is_null() || out.is_null() {
        set_error("null argument");
        return QflStatus::NullArgument;
    }
    let config = &(*config).0;
    let outcome = catch_unwind(AssertUnwindSafe(|| run_experiment(config)));
    match outcome {
        Ok(Ok(metrics)) => {
            *out = Box::into_raw(Box::new(QflMetrics(metrics)));
            QflStatus::Ok
        }
        Ok(Err(e)) => fail(&e),
        Err(_) => {
            set_error("panic inside run_experiment");
            QflStatus::RuntimeAbort
        }
    }
}

/// Number of completed rounds in a metrics handle.
///
/// # Safety
/// `metrics` must be NULL or a live pointer from [`qfl_run`].
#[no_mangle]
pub unsafe extern "C" fn qfl_metrics_rounds(metrics: *const QflMetrics) -> usize {
    if metrics.is_null() {
        return 0;
    }
    (*metrics).0.len()
}

/// Fetch one metric value by round index (0-based) and column.
///
/// # Safety
/// `metrics` must be a live pointer from [`qfl_run`]; `out` must be valid
/// for one f64 write.
#[no_mangle]
pub unsafe extern "C" fn qfl_metrics_value(
    metrics: *const QflMetrics,
    round_index: usize,
    column: QflMetricColumn,
    out: *mut f64,
) -> QflStatus {
    if metrics.is_null() || out.is_null() {
        set_error("null argument");
        return QflStatus::NullArgument;
    }
    let rows = &(*metrics).0;
    let Some(row) = rows.get(round_index) else {
        set_error("round index out of range");
        return QflStatus::InvalidConfig;
    };
    *out = match column {
        QflMetricColumn::GlobalFtValAcc => row.global_ft_val_acc,
        QflMetricColumn::GlobalFtTestAcc => row.global_ft_test_acc,
        QflMetricColumn::GlobalFtValLoss => row.global_ft_val_loss,
        QflMetricColumn::PredTestAcc => row.pred_test_acc,
        QflMetricColumn::PredValAcc => row.pred_val_acc,
        QflMetricColumn::PredValLoss => row.pred_val_loss,
        QflMetricColumn::AvgLocalTrainAcc => row.avg_local_train_acc,
        QflMetricColumn::AvgLocalTestAcc => row.avg_local_test_acc,
        QflMetricColumn::AvgLocalTrainLoss => row.avg_local_train_loss,
        QflMetricColumn::AvgLocalTrainTimeS => row.avg_local_train_time_s,
        QflMetricColumn::CommTimeS => row.comm_time_s,
    };
    QflStatus::Ok
}

/// Write the metrics CSV (fixed header, 6-decimal floats) to `path`.
///
/// # Safety
/// `metrics` must be a live pointer from [`qfl_run`]; `path` must be a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qfl_metrics_write_csv(
    metrics: *const QflMetrics,
    path: *const c_char,
) -> QflStatus {
    if metrics.is_null() {
        set_error("null metrics");
        return QflStatus::NullArgument;
    }
    let path = match cstr_arg(path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    match write_metrics_csv(&path, &(*metrics).0) {
        Ok(()) => QflStatus::Ok,
        Err(e) => fail(&e),
    }
}

/// # Safety
/// `metrics` must be NULL or a pointer from [`qfl_run`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qfl_metrics_free(metrics: *mut QflMetrics) {
    if !metrics.is_null() {
        drop(Box::from_raw(metrics));
    }
}

/// One seeded BB84 exchange plus test-bit verification.
///
/// # Safety
/// `out` must be valid for one [`QflQkdSummary`] write.
#[no_mangle]
pub unsafe extern "C" fn qfl_bb84_demo(
    num_qubits: usize,
    eve: QflEve,
    eve_seed: u64,
    flip_probability: f64,
    test_fraction: f64,
    n_allowed: usize,
    seed: u64,
    out: *mut QflQkdSummary,
) -> QflStatus {
    if out.is_null() {
        set_error("null output pointer");
        return QflStatus::NullArgument;
    }
    if num_qubits == 0 {
        set_error("num_qubits must be >= 1");
        return QflStatus::InvalidConfig;
    }
    let channel = ChannelConfig { flip_probability };
    if let Err(e) = channel.validate() {
        return fail(&e);
    }
    let eve = EveModel {
        kind: match eve {
            QflEve::None => EveKind::None,
            QflEve::InterceptResend => EveKind::InterceptResend,
            QflEve::Swap => EveKind::Swap,
            QflEve::HalfSwap => EveKind::HalfSwap,
        },
        seed: eve_seed,
    };
    let mut stream = rng::stream(seed, "qkd-demo", &[]);
    let session = bb84_exchange(num_qubits, &eve, &channel, &mut stream);
    let report = match run_test(&session, test_fraction, n_allowed, &mut stream) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    *out = QflQkdSummary {
        transmitted_qubits: session.n,
        sifted_bits: session.sifted_indices.len(),
        tested_bits: report.tested_indices.len(),
        error_count: report.error_count,
        sift_fraction: session.sifted_indices.len() as f64 / session.n as f64,
        qber: report.qber,
        passed: u8::from(report.passed),
    };
    QflStatus::Ok
}

/// Calibrated DP noise scale; `delta` is ignored by the Laplace mechanism.
///
/// # Safety
/// `out` must be valid for one f64 write.
#[no_mangle]
pub unsafe extern "C" fn qfl_dp_noise_scale(
    mechanism: QflDpMechanism,
    epsilon: f64,
    delta: f64,
    sensitivity: f64,
    out: *mut f64,
) -> QflStatus {
    if out.is_null() {
        set_error("null output pointer");
        return QflStatus::NullArgument;
    }
    let cfg = DpConfig {
        mechanism: match mechanism {
            QflDpMechanism::Laplace => DpMechanism::Laplace,
            QflDpMechanism::Gaussian => DpMechanism::Gaussian,
        },
        epsilon,
        delta: (mechanism == QflDpMechanism::Gaussian).then_some(delta),
        sensitivity,
        clip_nonnegative: false,
        decimals: None,
    };
    match noise_scale(&cfg) {
        Ok(scale) => {
            *out = scale;
            QflStatus::Ok
        }
        Err(e) => fail(&e),
    }
}
