use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use freearr_ffi::*;

fn catalog(name: &str) -> *mut FreearrArrangement {
    let name = CString::new(name).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { freearr_catalog_get(name.as_ptr(), &mut h) }, FreearrStatus::Ok);
    h
}

fn parse(text: &str) -> (FreearrStatus, *mut FreearrArrangement) {
    let text = CString::new(text).unwrap();
    let mut h = ptr::null_mut();
    let s = unsafe { freearr_arrangement_parse(text.as_ptr(), true, &mut h) };
    (s, h)
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(freearr_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn parse_emit_round_trip() {
    let (s, h) = parse("dim 3\n# braid\n1 -1 0\n0 1 -1\n1 0 -1\n");
    assert_eq!(s, FreearrStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { freearr_arrangement_emit(h, &mut out) }, FreearrStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    assert_eq!(text, "dim 3\n1 -1 0\n0 1 -1\n1 0 -1\n");
    unsafe {
        freearr_string_free(out);
        freearr_arrangement_free(h);
    }
}

#[test]
fn error_codes() {
    let (s, h) = parse("dim 2\n1 0\n2 0\n");
    assert_eq!(s, FreearrStatus::Parse);
    assert!(h.is_null());
    assert!(last_error().contains("line 3"), "{}", last_error());

    let name = CString::new("nope").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { freearr_catalog_get(name.as_ptr(), &mut h) }, FreearrStatus::UnknownCatalogEntry);
    assert_eq!(unsafe { freearr_arrangement_parse(ptr::null(), false, &mut h) }, FreearrStatus::NullPointer);

    let d = catalog("D");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { freearr_delete(d, 21, &mut out) }, FreearrStatus::IndexOutOfRange);
    let off = [1i64, 1, 1, 1, 1];
    let mut i = 0usize;
    assert_eq!(unsafe { freearr_index_of(d, off.as_ptr(), &mut i) }, FreearrStatus::NotMember);
    unsafe { freearr_arrangement_free(d) };
}

#[test]
fn char_poly_and_freeness() {
    let dpp = catalog("Dpp");
    let mut buf = [0i64; 5];
    let mut n = 0;
    assert_eq!(unsafe { freearr_char_poly(dpp, buf.as_mut_ptr(), 5, &mut n) }, FreearrStatus::Ok);
    // (t − 1)(t − 5)^3
    assert_eq!(&buf[..n], &[125, -200, 90, -16, 1]);
    let mut free = false;
    let mut exps = [0u32; 4];
    assert_eq!(unsafe { freearr_is_free(dpp, &mut free, exps.as_mut_ptr(), 4, &mut n, ptr::null_mut()) }, FreearrStatus::Ok);
    assert!(free);
    assert_eq!(exps, [1, 5, 5, 5]);
    unsafe { freearr_arrangement_free(dpp) };
}

#[test]
fn restriction_and_classes() {
    let d = catalog("D");
    let x4 = [0i64, 0, 0, 1, 0];
    let mut i = 0usize;
    assert_eq!(unsafe { freearr_index_of(d, x4.as_ptr(), &mut i) }, FreearrStatus::Ok);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { freearr_restrict(d, &i, 1, &mut r) }, FreearrStatus::Ok);
    assert_eq!(unsafe { freearr_arrangement_len(r) }, 16);
    let dpp = catalog("Dpp");
    let mut iso = false;
    assert_eq!(unsafe { freearr_isomorphic(r, dpp, false, &mut iso) }, FreearrStatus::Ok);
    assert!(iso);

    let mut v = FreearrVerdict::Undecided;
    let mut art = ptr::null_mut();
    assert_eq!(unsafe { freearr_classify(dpp, FreearrClass::Additional, 10_000, &mut v, &mut art) }, FreearrStatus::Ok);
    assert_eq!(v, FreearrVerdict::NonMember);
    let json = unsafe { CStr::from_ptr(art) }.to_str().unwrap().to_owned();
    assert!(json.contains("\"non_member\""));
    unsafe {
        freearr_string_free(art);
        freearr_arrangement_free(r);
        freearr_arrangement_free(dpp);
        freearr_arrangement_free(d);
    }
}

#[test]
fn product_and_localization() {
    let (_, a) = parse("dim 2\n1 0\n0 1\n1 1\n");
    let (_, b) = parse("dim 1\n1\n");
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { freearr_product(a, b, &mut p) }, FreearrStatus::Ok);
    assert_eq!(unsafe { freearr_arrangement_dim(p) }, 3);
    assert_eq!(unsafe { freearr_arrangement_len(p) }, 4);
    let mut l = ptr::null_mut();
    assert_eq!(unsafe { freearr_localize(p, [0usize, 1].as_ptr(), 2, &mut l) }, FreearrStatus::Ok);
    assert_eq!(unsafe { freearr_arrangement_len(l) }, 3);
    let mut normal = [0i64; 3];
    let mut n = 0;
    assert_eq!(unsafe { freearr_arrangement_normal(p, 3, normal.as_mut_ptr(), 3, &mut n) }, FreearrStatus::Ok);
    assert_eq!(normal, [0, 0, 1]);
    unsafe {
        for h in [a, b, p, l] {
            freearr_arrangement_free(h);
        }
    }
}

/// Compiles a C program against the generated header and the static
/// library.
#[test]
fn c_program_links_against_header() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(header_dir.join("freearr.h").exists(), "header not generated");
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libfreearr_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out = tempfile::tempdir().unwrap();
    let bin = out.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
