//! C ABI over the asdbench library.
//!
//! Datasets and models are opaque heap handles released with their `_free`
//! function. Every fallible call returns an [`AsdStatus`]; on failure the
//! message is available from [`asd_last_error`] on the same thread until the
//! next failing call. Strings handed to the caller are NUL-terminated UTF-8
//! and must be released with [`asd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use asdbench::classifiers::FittedModel;
use asdbench::ingest::{drop_missing, encode, parse_arff, split, EncodeOptions, ParseOptions};
use asdbench::metrics::{auc, roc_points};
use asdbench::runner::{run_experiment, write_outputs, ExperimentConfig, RunError};
use asdbench::{ClassifierSpec, Dataset, Matrix};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    /// Malformed or out-of-range configuration or model document.
    Config = 4,
    /// Unreadable, malformed or unusable data.
    Data = 5,
    /// A learner failed to fit or evaluate.
    Training = 6,
    /// A Rust panic was caught at the boundary.
    Internal = 7,
}

/// Encoded feature matrix with binary labels.
pub struct AsdDataset {
    inner: Dataset,
}

/// Fitted classifier together with its input standardisation.
pub struct AsdModel {
    inner: FittedModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(AsdStatus, String);

type Outcome = Result<(), Failure>;

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(body: impl FnOnce() -> Outcome) -> AsdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => AsdStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal error: {message}"));
            AsdStatus::Internal
        }
    }
}

fn fail<T>(status: AsdStatus, message: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, message.into()))
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        fail(AsdStatus::NullPointer, format!("`{what}` is null"))
    } else {
        Ok(())
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    non_null(p, what)?;
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(AsdStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(p, what)?;
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    non_null(p, what)?;
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("NUL bytes removed")
        .into_raw()
}

fn run_status(e: &RunError) -> AsdStatus {
    match e.exit_code() {
        1 => AsdStatus::Config,
        2 => AsdStatus::Data,
        _ => AsdStatus::Training,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn asd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or null when none occurred.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn asd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string obtained from this library that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn asd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses ARFF text, drops rows with missing cells and encodes the rest
/// with the default exclusions (`result`, `age_desc`). `class_attribute`
/// may be null for the default. `dropped` may be null.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn asd_dataset_from_arff(
    text: *const c_char,
    class_attribute: *const c_char,
    out: *mut *mut AsdDataset,
    dropped: *mut usize,
) -> AsdStatus {
    guard(|| {
        non_null(out, "out")?;
        let text = read_str(text, "text")?;
        let class_attribute = if class_attribute.is_null() {
            None
        } else {
            Some(read_str(class_attribute, "class_attribute")?.to_string())
        };
        let data_err = |e: asdbench::IngestError| Failure(AsdStatus::Data, e.to_string());
        let table = parse_arff(text, &ParseOptions { class_attribute }).map_err(data_err)?;
        let (clean, n_dropped) = drop_missing(&table);
        if clean.is_empty() {
            return fail(AsdStatus::Data, "no complete rows");
        }
        let (inner, _) = encode(&clean, &EncodeOptions::default()).map_err(data_err)?;
        if !dropped.is_null() {
            *dropped = n_dropped;
        }
        *out = Box::into_raw(Box::new(AsdDataset { inner }));
        Ok(())
    })
}

/// Builds a dataset from a row-major `rows x cols` matrix and labels in
/// {0, 1}. Feature names are `f0`, `f1`, ….
///
/// # Safety
/// `features` must hold `rows * cols` values, `labels` `rows` values, and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn asd_dataset_from_arrays(
    features: *const f64,
    rows: usize,
    cols: usize,
    labels: *const u8,
    out: *mut *mut AsdDataset,
) -> AsdStatus {
    guard(|| {
        non_null(out, "out")?;
        let Some(len) = rows.checked_mul(cols) else {
            return fail(AsdStatus::InvalidArgument, "rows * cols overflows");
        };
        let x = slice(features, len, "features")?.to_vec();
        let y = slice(labels, rows, "labels")?.to_vec();
        let names = (0..cols).map(|j| format!("f{j}")).collect();
        let inner = Dataset::new(Matrix::from_vec(rows, cols, x), y, names)
            .map_err(|e| Failure(AsdStatus::InvalidArgument, e.to_string()))?;
        *out = Box::into_raw(Box::new(AsdDataset { inner }));
        Ok(())
    })
}

/// Row count; 0 for null.
///
/// # Safety
/// `data` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn asd_dataset_rows(data: *const AsdDataset) -> usize {
    data.as_ref().map_or(0, |d| d.inner.len())
}

/// Feature count; 0 for null.
///
/// # Safety
/// `data` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn asd_dataset_cols(data: *const AsdDataset) -> usize {
    data.as_ref().map_or(0, |d| d.inner.dim())
}

/// Copies the row-major feature matrix into `features` (`rows * cols`
/// values) and the labels into `labels` (`rows` values). Either may be null.
///
/// # Safety
/// `data` must be a live handle and non-null buffers must be large enough.
#[no_mangle]
pub unsafe extern "C" fn asd_dataset_copy(
    data: *const AsdDataset,
    features: *mut f64,
    labels: *mut u8,
) -> AsdStatus {
    guard(|| {
        non_null(data, "data")?;
        let d = &(*data).inner;
        if !features.is_null() {
            let src = d.features.as_slice();
            slice_mut(features, src.len(), "features")?.copy_from_slice(src);
        }
        if !labels.is_null() {
            slice_mut(labels, d.len(), "labels")?.copy_from_slice(&d.labels);
        }
        Ok(())
    })
}

/// Seeded holdout split into two new datasets.
///
/// # Safety
/// `data` must be a live handle; `train` and `test` must be writable.
#[no_mangle]
pub unsafe extern "C" fn asd_dataset_split(
    data: *const AsdDataset,
    train_fraction: f64,
    seed: u64,
    train: *mut *mut AsdDataset,
    test: *mut *mut AsdDataset,
) -> AsdStatus {
    guard(|| {
        non_null(data, "data")?;
        non_null(train, "train")?;
        non_null(test, "test")?;
        let s = split(&(*data).inner, train_fraction, seed)
            .map_err(|e| Failure(AsdStatus::InvalidArgument, e.to_string()))?;
        *train = Box::into_raw(Box::new(AsdDataset { inner: s.train }));
        *test = Box::into_raw(Box::new(AsdDataset { inner: s.test }));
        Ok(())
    })
}

/// Releases a dataset. Null is ignored.
///
/// # Safety
/// `data` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn asd_dataset_free(data: *mut AsdDataset) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// Fits the learner described by `spec_json`, e.g. `{"type":"knn","k":5}`.
/// Kernel SVM, kNN, logistic and MLP inputs are standardised internally.
///
/// # Safety
/// `data` must be a live handle, `spec_json` NUL-terminated and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn asd_model_fit(
    data: *const AsdDataset,
    spec_json: *const c_char,
    out: *mut *mut AsdModel,
) -> AsdStatus {
    guard(|| {
        non_null(data, "data")?;
        non_null(out, "out")?;
        let spec: ClassifierSpec = serde_json::from_str(read_str(spec_json, "spec_json")?)
            .map_err(|e| Failure(AsdStatus::Config, e.to_string()))?;
        let inner = FittedModel::fit(&(*data).inner, &spec)
            .map_err(|e| Failure(AsdStatus::Training, e.to_string()))?;
        *out = Box::into_raw(Box::new(AsdModel { inner }));
        Ok(())
    })
}

/// Input width the model expects; 0 for null.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn asd_model_dim(model: *const AsdModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.model.dim())
}

/// Predicts `rows` row-major inputs of width `cols`. `labels` and `scores`
/// receive `rows` values each; either may be null.
///
/// # Safety
/// `model` must be a live handle, `features` must hold `rows * cols`
/// values and non-null outputs must hold `rows` values.
#[no_mangle]
pub unsafe extern "C" fn asd_model_predict(
    model: *const AsdModel,
    features: *const f64,
    rows: usize,
    cols: usize,
    labels: *mut u8,
    scores: *mut f64,
) -> AsdStatus {
    guard(|| {
        non_null(model, "model")?;
        let m = &(*model).inner;
        if cols != m.model.dim() {
            return fail(
                AsdStatus::InvalidArgument,
                format!("model expects {} columns, got {cols}", m.model.dim()),
            );
        }
        let Some(len) = rows.checked_mul(cols) else {
            return fail(AsdStatus::InvalidArgument, "rows * cols overflows");
        };
        let x = slice(features, len, "features")?;
        let mut labels = (!labels.is_null())
            .then(|| slice_mut(labels, rows, "labels"))
            .transpose()?;
        let mut scores = (!scores.is_null())
            .then(|| slice_mut(scores, rows, "scores"))
            .transpose()?;
        for r in 0..rows {
            let p = m
                .predict(&x[r * cols..(r + 1) * cols])
                .map_err(|e| Failure(AsdStatus::InvalidArgument, e.to_string()))?;
            if let Some(l) = labels.as_deref_mut() {
                l[r] = p.label;
            }
            if let Some(s) = scores.as_deref_mut() {
                s[r] = p.score;
            }
        }
        Ok(())
    })
}

/// Versioned JSON document of the model. Free with [`asd_string_free`].
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn asd_model_to_json(
    model: *const AsdModel,
    out: *mut *mut c_char,
) -> AsdStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(out, "out")?;
        *out = into_c_string((*model).inner.to_json());
        Ok(())
    })
}

/// Restores a model saved with [`asd_model_to_json`].
///
/// # Safety
/// `text` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn asd_model_from_json(
    text: *const c_char,
    out: *mut *mut AsdModel,
) -> AsdStatus {
    guard(|| {
        non_null(out, "out")?;
        let inner = FittedModel::from_json(read_str(text, "text")?)
            .map_err(|e| Failure(AsdStatus::Config, e.to_string()))?;
        *out = Box::into_raw(Box::new(AsdModel { inner }));
        Ok(())
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn asd_model_free(model: *mut AsdModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Area under the ROC curve of `n` scores against labels in {0, 1}.
///
/// # Safety
/// `scores` and `labels` must hold `n` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn asd_auc(
    scores: *const f64,
    labels: *const u8,
    n: usize,
    out: *mut f64,
) -> AsdStatus {
    guard(|| {
        non_null(out, "out")?;
        let s = slice(scores, n, "scores")?;
        let y = slice(labels, n, "labels")?;
        let curve =
            roc_points(s, y).map_err(|e| Failure(AsdStatus::InvalidArgument, e.to_string()))?;
        *out = auc(&curve);
        Ok(())
    })
}

/// Runs an experiment from config JSON. Relative data paths resolve
/// against `base_dir` (null for the working directory). When `output_dir`
/// is non-null every report file is written there. The report JSON is
/// returned in `report_json`, which may be null.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `report_json` must be
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn asd_run_experiment(
    config_json: *const c_char,
    base_dir: *const c_char,
    output_dir: *const c_char,
    report_json: *mut *mut c_char,
) -> AsdStatus {
    guard(|| {
        let text = read_str(config_json, "config_json")?;
        let base = if base_dir.is_null() {
            PathBuf::new()
        } else {
            PathBuf::from(read_str(base_dir, "base_dir")?)
        };
        let run_err = |e: RunError| Failure(run_status(&e), e.to_string());
        let cfg = ExperimentConfig::from_json(text, base).map_err(run_err)?;
        let bundle = run_experiment(&cfg).map_err(run_err)?;
        if !output_dir.is_null() {
            write_outputs(&bundle, read_str(output_dir, "output_dir")?).map_err(run_err)?;
        }
        if !report_json.is_null() {
            *report_json = into_c_string(bundle.to_json());
        }
        Ok(())
    })
}
