//! C interface to `faim-core`.
//!
//! Datasets and models are opaque heap handles released with their `_free`
//! function. Every fallible call returns a [`FaimStatus`]; on failure the
//! message is available from [`faim_last_error_message`] on the same thread
//! until the next failing call.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use faim_core::{Error, GroupedDataset, Record, ScoreGrid, ScoreHistogram, ThetaWeights};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// A class is empty in a group that puts weight on balancing it.
    DegenerateClass = 3,
    UnknownGroup = 4,
    Io = 5,
    /// Malformed model file or input data.
    Format = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> FaimStatus {
    match err {
        Error::DegenerateClass { .. } | Error::EmptyGroup(_) => FaimStatus::DegenerateClass,
        Error::UnknownGroup(_) | Error::MissingTheta(_) => FaimStatus::UnknownGroup,
        Error::Io { .. } => FaimStatus::Io,
        Error::ModelFormat { .. } | Error::Parse { .. } | Error::Csv(_) => FaimStatus::Format,
        _ => FaimStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Utf8(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> FaimStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => FaimStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            FaimStatus::NullPointer
        }
        Ok(Err(Failure::Utf8(what))) => {
            set_error(format!("{what} is not valid UTF-8"));
            FaimStatus::InvalidArgument
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            FaimStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Utf8(what))
}

unsafe fn slot<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn floats<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Records collected before fitting.
pub struct FaimDataset {
    records: Vec<Record>,
}

/// A fitted model.
pub struct FaimModel {
    inner: faim_core::FaimModel,
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn faim_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn faim_dataset_new() -> *mut FaimDataset {
    Box::into_raw(Box::new(FaimDataset { records: Vec::new() }))
}

/// # Safety
/// `dataset` must come from [`faim_dataset_new`] and not be freed; `id` and
/// `group` must be nul-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn faim_dataset_push(
    dataset: *mut FaimDataset,
    id: *const c_char,
    group: *const c_char,
    raw_score: f64,
    positive: bool,
) -> FaimStatus {
    guard(|| {
        let ds = slot(dataset, "dataset")?;
        let record =
            Record { id: text(id, "id")?.to_string(), group: text(group, "group")?.to_string(), raw_score, positive };
        ds.records.push(record);
        Ok(())
    })
}

/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn faim_dataset_len(dataset: *const FaimDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.records.len())
}

/// # Safety
/// `dataset` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn faim_dataset_free(dataset: *mut FaimDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Fit a model. `groups` holds `n_groups` labels and `thetas` holds
/// `3 * n_groups` weights, `(a, b, c)` per label in the same order.
///
/// # Safety
/// All pointers must be valid for the stated lengths; `out` receives a handle
/// to free with [`faim_model_free`].
#[no_mangle]
pub unsafe extern "C" fn faim_fit(
    dataset: *const FaimDataset,
    stepsize: f64,
    groups: *const *const c_char,
    thetas: *const f64,
    n_groups: usize,
    out: *mut *mut FaimModel,
) -> FaimStatus {
    guard(|| {
        let out = slot(out, "out")?;
        *out = ptr::null_mut();
        let ds = handle(dataset, "dataset")?;
        if groups.is_null() && n_groups > 0 {
            return Err(Failure::Null("groups"));
        }
        let weights = floats(thetas, 3 * n_groups, "thetas")?;
        let mut map = BTreeMap::new();
        for i in 0..n_groups {
            let label = text(*groups.add(i), "group label")?;
            let w = &weights[3 * i..3 * i + 3];
            map.insert(label.to_string(), ThetaWeights::new(w[0], w[1], w[2])?);
        }
        let grid = ScoreGrid::new(stepsize)?;
        let data = GroupedDataset::new(ds.records.clone())?;
        let model = faim_core::faim::fit(&data, &grid, &map)?;
        *out = Box::into_raw(Box::new(FaimModel { inner: model }));
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle, `group` a nul-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn faim_apply(
    model: *const FaimModel,
    group: *const c_char,
    raw_score: f64,
    out: *mut f64,
) -> FaimStatus {
    guard(|| {
        let out = slot(out, "out")?;
        let m = handle(model, "model")?;
        *out = faim_core::faim::apply(&m.inner, text(group, "group")?, raw_score)?;
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle and `path` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn faim_model_save(model: *const FaimModel, path: *const c_char) -> FaimStatus {
    guard(|| {
        let m = handle(model, "model")?;
        m.inner.save(Path::new(text(path, "path")?))?;
        Ok(())
    })
}

/// # Safety
/// `path` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn faim_model_load(path: *const c_char, out: *mut *mut FaimModel) -> FaimStatus {
    guard(|| {
        let out = slot(out, "out")?;
        *out = ptr::null_mut();
        let inner = faim_core::FaimModel::load(Path::new(text(path, "path")?))?;
        *out = Box::into_raw(Box::new(FaimModel { inner }));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn faim_model_free(model: *mut FaimModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Wasserstein-2 distance between two normalized histograms with `bins`
/// equal bins on `[0, 1]`.
///
/// # Safety
/// `a` and `b` must point to `bins` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn faim_wasserstein2(a: *const f64, b: *const f64, bins: usize, out: *mut f64) -> FaimStatus {
    guard(|| {
        let out = slot(out, "out")?;
        let grid = ScoreGrid::with_bins(bins)?;
        let ha = ScoreHistogram::from_mass(grid, floats(a, bins, "a")?.to_vec())?;
        let hb = ScoreHistogram::from_mass(grid, floats(b, bins, "b")?.to_vec())?;
        *out = faim_core::ot::wasserstein2(&ha, &hb)?;
        Ok(())
    })
}

/// `(N1 - n1) * n2 - (N2 - n2) * n1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn faim_incompatibility_determinant(
    n1_total: u64,
    n1_positive: u64,
    n2_total: u64,
    n2_positive: u64,
    out: *mut f64,
) -> FaimStatus {
    guard(|| {
        let out = slot(out, "out")?;
        *out = faim_core::faim::incompatibility_determinant(n1_total, n1_positive, n2_total, n2_positive)?.determinant;
        Ok(())
    })
}
