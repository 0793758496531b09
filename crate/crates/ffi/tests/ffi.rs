use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use compalg_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = compalg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn class(name: &str, hbar: &str) -> *mut CompalgClass {
    let mut out = ptr::null_mut();
    let st = unsafe { compalg_class_new(c(name).as_ptr(), c(hbar).as_ptr(), &mut out) };
    assert_eq!(st, CompalgStatus::Ok);
    out
}

fn parse(cls: *const CompalgClass, text: &str) -> *mut CompalgElement {
    let mut out = ptr::null_mut();
    let st = unsafe { compalg_element_parse(cls, c(text).as_ptr(), 0, &mut out) };
    assert_eq!(st, CompalgStatus::Ok, "{}", last_error());
    out
}

fn owned(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { compalg_string_free(s) };
    out
}

#[test]
fn products_through_handles() {
    let cls = class("elliptic", "formal");
    let (q, p) = (parse(cls, "q"), parse(cls, "p"));
    let mut plus = ptr::null_mut();
    let mut minus = ptr::null_mut();
    unsafe {
        assert_eq!(compalg_element_product(CompalgProduct::BetaPlus, q, p, &mut plus), CompalgStatus::Ok);
        assert_eq!(compalg_element_product(CompalgProduct::BetaMinus, p, q, &mut minus), CompalgStatus::Ok);
        let mut eq = false;
        assert_eq!(compalg_element_equal(plus, minus, &mut eq), CompalgStatus::Ok);
        assert!(eq);
        assert_eq!(owned(compalg_element_to_string(plus)), "q*p + 1/2*J*hbar");
        let mut zero = true;
        assert_eq!(compalg_element_is_zero(plus, &mut zero), CompalgStatus::Ok);
        assert!(!zero);
        for e in [q, p, plus, minus] {
            compalg_element_free(e);
        }
        compalg_class_free(cls);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut out = ptr::null_mut();
    let st = unsafe { compalg_class_new(c("elliptic").as_ptr(), c("-1").as_ptr(), &mut out) };
    assert_eq!(st, CompalgStatus::Unsupported);
    assert!(out.is_null());
    assert!(last_error().contains("positive"));

    let st = unsafe { compalg_class_new(ptr::null(), c("1").as_ptr(), &mut out) };
    assert_eq!(st, CompalgStatus::NullPointer);

    let cls = class("elliptic", "1");
    let mut e = ptr::null_mut();
    let st = unsafe { compalg_element_parse(cls, c("q^").as_ptr(), 0, &mut e) };
    assert_eq!(st, CompalgStatus::Parse);
    assert!(last_error().contains("offset 2"));

    let other = class("hyperbolic", "1");
    let (a, b) = (parse(cls, "[[0,1],[1,0]]"), parse(other, "[[0,1],[1,0]]"));
    let mut r = ptr::null_mut();
    let st = unsafe { compalg_element_product(CompalgProduct::Alpha, a, b, &mut r) };
    assert_eq!(st, CompalgStatus::ClassMismatch);
    assert!(r.is_null());

    let mut audit = ptr::null_mut();
    let par = class("parabolic", "1");
    let st = unsafe { compalg_audit_run(par, c("matrix").as_ptr(), 1, 0, &mut audit) };
    assert_eq!(st, CompalgStatus::Unsupported);
    unsafe {
        compalg_element_free(a);
        compalg_element_free(b);
        compalg_class_free(cls);
        compalg_class_free(other);
        compalg_class_free(par);
        compalg_class_free(ptr::null_mut());
    }
}

#[test]
fn audit_and_solver() {
    let cls = class("elliptic", "1");
    let mut audit = ptr::null_mut();
    let st = unsafe { compalg_audit_run(cls, c("matrix").as_ptr(), 5, 42, &mut audit) };
    assert_eq!(st, CompalgStatus::Ok);
    assert!(unsafe { compalg_audit_passed(audit) });
    let json = owned(unsafe { compalg_audit_to_json(audit) });
    assert!(json.contains("\"schema\": 1"));
    unsafe { compalg_audit_free(audit) };

    let mut sol = ptr::null_mut();
    let st = unsafe { compalg_solve_coproduct(cls, c("matrix").as_ptr(), 1, &mut sol) };
    assert_eq!(st, CompalgStatus::Ok, "{}", last_error());
    let entry = |name: &str| {
        let (mut fixed, mut n, mut d) = (false, 0i64, 0i64);
        let st = unsafe { compalg_solution_entry(sol, c(name).as_ptr(), &mut fixed, &mut n, &mut d) };
        assert_eq!(st, CompalgStatus::Ok);
        fixed.then_some((n, d))
    };
    assert_eq!(entry("a11"), Some((0, 1)));
    assert_eq!(entry("a12"), Some((1, 1)));
    assert_eq!(entry("b22"), Some((1, 1)));
    assert_eq!(entry("b11"), None);
    let (mut fixed, mut n, mut d) = (false, 0i64, 0i64);
    let st = unsafe { compalg_solution_entry(sol, c("z9").as_ptr(), &mut fixed, &mut n, &mut d) };
    assert_eq!(st, CompalgStatus::Unsupported);
    assert!(owned(unsafe { compalg_solution_to_json(sol) }).contains("\"free\""));
    unsafe {
        compalg_solution_free(sol);
        compalg_class_free(cls);
    }
}

#[test]
fn chsh_values() {
    let angles = [0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_4, 3.0 * std::f64::consts::FRAC_PI_4];
    let mut v = 0.0;
    assert_eq!(unsafe { compalg_chsh_quantum(angles.as_ptr(), &mut v) }, CompalgStatus::Ok);
    assert!((v.abs() - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    assert_eq!(compalg_chsh_classical_max(), 2.0);
    assert_eq!(unsafe { compalg_chsh_quantum(ptr::null(), &mut v) }, CompalgStatus::NullPointer);
}

fn target_dir() -> PathBuf {
    // .../target/<profile>/deps/ffi-<hash>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_header() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = manifest.join("include/compalg.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["compalg_class_new", "compalg_element_parse", "compalg_audit_run", "compalg_solve_coproduct", "COMPALG_STATUS_OK"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let lib = target_dir().join("libcompalg_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let out = std::env::temp_dir().join(format!("compalg_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).contains("ok"));
}
