use std::ffi::{CStr, CString};
use std::ptr;

use faim_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = faim_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn dataset(n: usize) -> *mut FaimDataset {
    let ds = faim_dataset_new();
    for i in 0..n {
        let group = if i % 2 == 0 { "a" } else { "b" };
        let score = ((i * 31) % 97) as f64 / 96.0;
        let positive = (i * 7) % 5 < 2 + (i % 2);
        let (id, g) = (cstr(&i.to_string()), cstr(group));
        let st = unsafe { faim_dataset_push(ds, id.as_ptr(), g.as_ptr(), score, positive) };
        assert_eq!(st, FaimStatus::Ok);
    }
    ds
}

fn fit(ds: *const FaimDataset, thetas: &[f64; 6]) -> (FaimStatus, *mut FaimModel) {
    let (a, b) = (cstr("a"), cstr("b"));
    let labels = [a.as_ptr(), b.as_ptr()];
    let mut model = ptr::null_mut();
    let st = unsafe { faim_fit(ds, 0.05, labels.as_ptr(), thetas.as_ptr(), 2, &mut model) };
    (st, model)
}

#[test]
fn fit_apply_save_load() {
    let ds = dataset(400);
    assert_eq!(unsafe { faim_dataset_len(ds) }, 400);
    let (st, model) = fit(ds, &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0, 1.0, 0.0]);
    assert_eq!(st, FaimStatus::Ok);
    assert!(!model.is_null());

    let g = cstr("a");
    let mut before = 0.0;
    assert_eq!(unsafe { faim_apply(model, g.as_ptr(), 0.37, &mut before) }, FaimStatus::Ok);
    assert!((0.0..=1.0).contains(&before));

    let dir = tempfile::tempdir().unwrap();
    let path = cstr(dir.path().join("m.faim").to_str().unwrap());
    assert_eq!(unsafe { faim_model_save(model, path.as_ptr()) }, FaimStatus::Ok);
    let mut loaded = ptr::null_mut();
    assert_eq!(unsafe { faim_model_load(path.as_ptr(), &mut loaded) }, FaimStatus::Ok);
    let mut after = 0.0;
    assert_eq!(unsafe { faim_apply(loaded, g.as_ptr(), 0.37, &mut after) }, FaimStatus::Ok);
    assert_eq!(before.to_bits(), after.to_bits());

    unsafe {
        faim_model_free(model);
        faim_model_free(loaded);
        faim_dataset_free(ds);
    }
}

#[test]
fn error_codes() {
    let ds = dataset(100);
    let (st, model) = fit(ds, &[0.5, 0.6, 0.0, 1.0, 0.0, 0.0]);
    assert_eq!(st, FaimStatus::InvalidArgument);
    assert!(model.is_null());
    assert!(last_error().contains("theta"), "{}", last_error());

    let (st, model) = fit(ds, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    assert_eq!(st, FaimStatus::Ok);
    let (unknown, mut out) = (cstr("zzz"), 0.0);
    assert_eq!(unsafe { faim_apply(model, unknown.as_ptr(), 0.5, &mut out) }, FaimStatus::UnknownGroup);
    assert_eq!(unsafe { faim_apply(model, ptr::null(), 0.5, &mut out) }, FaimStatus::NullPointer);
    let g = cstr("a");
    assert_eq!(unsafe { faim_apply(model, g.as_ptr(), 1.5, &mut out) }, FaimStatus::InvalidArgument);

    let missing = cstr("/nonexistent/dir/model.faim");
    let mut loaded = ptr::null_mut();
    assert_eq!(unsafe { faim_model_load(missing.as_ptr(), &mut loaded) }, FaimStatus::Io);
    assert!(loaded.is_null());

    unsafe {
        faim_model_free(model);
        faim_dataset_free(ds);
    }
}

#[test]
fn degenerate_class() {
    let ds = faim_dataset_new();
    for (i, (g, s, p)) in [("a", 0.1, false), ("a", 0.9, true), ("b", 0.3, false), ("b", 0.4, false)].iter().enumerate() {
        let (id, g) = (cstr(&i.to_string()), cstr(g));
        unsafe { faim_dataset_push(ds, id.as_ptr(), g.as_ptr(), *s, *p) };
    }
    let (st, model) = fit(ds, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
    assert_eq!(st, FaimStatus::DegenerateClass);
    assert!(model.is_null());
    assert!(last_error().contains("positive"), "{}", last_error());
    unsafe { faim_dataset_free(ds) };
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        faim_dataset_free(ptr::null_mut());
        faim_model_free(ptr::null_mut());
        assert_eq!(faim_dataset_len(ptr::null()), 0);
    }
}

#[test]
fn helpers() {
    let a = [0.5, 0.5, 0.0, 0.0];
    let b = [0.0, 0.0, 0.5, 0.5];
    let mut w = 0.0;
    assert_eq!(unsafe { faim_wasserstein2(a.as_ptr(), b.as_ptr(), 4, &mut w) }, FaimStatus::Ok);
    assert!((w - 0.5).abs() < 1e-12);
    let bad = [0.5, 0.1, 0.0, 0.0];
    assert_eq!(unsafe { faim_wasserstein2(a.as_ptr(), bad.as_ptr(), 4, &mut w) }, FaimStatus::InvalidArgument);

    let mut d = 0.0;
    assert_eq!(unsafe { faim_incompatibility_determinant(100, 30, 100, 50, &mut d) }, FaimStatus::Ok);
    assert_eq!(d, 2000.0);
    assert_eq!(unsafe { faim_incompatibility_determinant(0, 0, 1, 0, &mut d) }, FaimStatus::InvalidArgument);
}
