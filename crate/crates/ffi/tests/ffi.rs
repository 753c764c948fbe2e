//! The C ABI exercised from Rust, plus a C program compiled against the
//! generated header and the static library.

use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use cfgkat_ffi::*;

fn fixture(name: &str) -> CString {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

fn last_error() -> String {
    let p = cfgkat_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn load(src: &CString, function: &str) -> *mut CfgkatProgram {
    let name = CString::new(function).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { cfgkat_program_from_c(src.as_ptr(), name.as_ptr(), ptr::null(), &mut out) };
    assert_eq!(status, CfgkatStatus::Ok, "{}", last_error());
    assert!(!out.is_null());
    out
}

#[test]
fn equivalent_and_inequivalent_pairs() {
    let a = load(&fixture("prog1.c"), "two_state");
    let b = load(&fixture("prog3.c"), "two_state");
    let c = load(&fixture("assign_assert_1.c"), "check");
    let d = load(&fixture("assign_assert_0.c"), "check");
    let mut eq = false;
    unsafe {
        assert!(cfgkat_program_size(a) > 0);
        assert_eq!(cfgkat_equiv(a, b, &mut eq), CfgkatStatus::Ok);
        assert!(eq);
        assert_eq!(cfgkat_equiv(c, d, &mut eq), CfgkatStatus::Ok);
        assert!(!eq);
        for p in [a, b, c, d] {
            cfgkat_program_free(p);
        }
    }
}

#[test]
fn report_json_parses() {
    let a = load(&fixture("factor_inside.c"), "factor");
    let b = load(&fixture("factor_outside.c"), "factor");
    let mut json: *mut c_char = ptr::null_mut();
    unsafe {
        assert_eq!(cfgkat_equiv_report_json(a, b, &mut json), CfgkatStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        cfgkat_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["verdict"], serde_json::Value::Bool(true));
        assert!(v["per_indicator"].get("*").is_some());
        cfgkat_program_free(a);
        cfgkat_program_free(b);
    }
}

#[test]
fn error_codes_and_messages() {
    let name = CString::new("f").unwrap();
    let mut out = ptr::null_mut();
    unsafe {
        let bad = CString::new("void f() {\n  switch (x) { }\n}").unwrap();
        assert_eq!(cfgkat_program_from_c(bad.as_ptr(), name.as_ptr(), ptr::null(), &mut out), CfgkatStatus::Frontend);
        assert!(out.is_null());
        assert!(last_error().contains("2:3: unsupported construct: switch"), "{}", last_error());

        let goto = CString::new("void f() { goto nowhere; }").unwrap();
        assert_eq!(
            cfgkat_program_from_c(goto.as_ptr(), name.as_ptr(), ptr::null(), &mut out),
            CfgkatStatus::InvalidProgram
        );

        let missing = CString::new("g").unwrap();
        let ok = CString::new("void f() { pact(1); }").unwrap();
        assert_eq!(cfgkat_program_from_c(ok.as_ptr(), missing.as_ptr(), ptr::null(), &mut out), CfgkatStatus::Frontend);

        assert_eq!(cfgkat_program_from_c(ptr::null(), name.as_ptr(), ptr::null(), &mut out), CfgkatStatus::NullArgument);
        let mut eq = false;
        assert_eq!(cfgkat_equiv(ptr::null(), ptr::null(), &mut eq), CfgkatStatus::NullArgument);
        assert_eq!(cfgkat_program_size(ptr::null()), 0);
        cfgkat_program_free(ptr::null_mut());
        cfgkat_string_free(ptr::null_mut());

        let invalid = [0xffu8, 0];
        assert_eq!(
            cfgkat_program_from_c(invalid.as_ptr().cast(), name.as_ptr(), ptr::null(), &mut out),
            CfgkatStatus::InvalidUtf8
        );
    }
}

#[test]
fn indicator_argument() {
    let src = CString::new("void f() { int a = 0; a = 1; if (a == 1) pact(1); }").unwrap();
    let name = CString::new("f").unwrap();
    let none = CString::new("").unwrap();
    let named = CString::new("a").unwrap();
    let mut out = ptr::null_mut();
    unsafe {
        // without an indicator, `a = 1` is outside the subset
        assert_eq!(cfgkat_program_from_c(src.as_ptr(), name.as_ptr(), none.as_ptr(), &mut out), CfgkatStatus::Frontend);
        assert_eq!(cfgkat_program_from_c(src.as_ptr(), name.as_ptr(), named.as_ptr(), &mut out), CfgkatStatus::Ok);
        cfgkat_program_free(out);
    }
}

#[test]
fn sources_with_auto_blinding() {
    let a = CString::new("void g() { mpz_set(y, x); if (mpz_cmp_ui(n,1) != 0) a++; }").unwrap();
    let b = CString::new("void g() {\n  mpz_set(y,  x);\n  if (mpz_cmp_ui(n,1)\n != 0) { a++; }\n}").unwrap();
    let name = CString::new("g").unwrap();
    let mut eq = false;
    unsafe {
        assert_eq!(cfgkat_equiv_sources(a.as_ptr(), b.as_ptr(), name.as_ptr(), false, &mut eq), CfgkatStatus::Frontend);
        assert_eq!(cfgkat_equiv_sources(a.as_ptr(), b.as_ptr(), name.as_ptr(), true, &mut eq), CfgkatStatus::Ok);
        assert!(eq);
        let fig = fixture("fig2b_blinded.c");
        let mutant = fixture("fig3a_ghidra_mutant.c");
        let name = CString::new("mp_factor_using_pollard_rho").unwrap();
        assert_eq!(cfgkat_equiv_sources(fig.as_ptr(), mutant.as_ptr(), name.as_ptr(), false, &mut eq), CfgkatStatus::Ok);
        assert!(!eq);
    }
}

/// `target/<profile>`, found from the test executable in `deps/`.
fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_header() {
    let lib = target_dir().join("libcfgkat_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let main = dir.path().join("main.c");
    std::fs::write(
        &main,
        r#"#include <stdio.h>
#include "cfgkat.h"

int main(void) {
    const char *a = "void f(void) { while (pbool(1)) { pact(1); if (!pbool(1)) pact(2); else break; } }";
    const char *b = "void f(void) { L: if (!pbool(1)) goto E; pact(1); if (pbool(1)) goto E; pact(2); goto L; E: ; }";
    CfgkatProgram *pa = NULL, *pb = NULL;
    if (cfgkat_program_from_c(a, "f", NULL, &pa) != CFGKAT_STATUS_OK) return 10;
    if (cfgkat_program_from_c(b, "f", NULL, &pb) != CFGKAT_STATUS_OK) return 11;
    bool eq = false;
    if (cfgkat_equiv(pa, pb, &eq) != CFGKAT_STATUS_OK || !eq) return 12;
    CfgkatProgram *bad = NULL;
    if (cfgkat_program_from_c("void f() { goto x; }", "f", NULL, &bad) != CFGKAT_STATUS_INVALID_PROGRAM) return 13;
    printf("%s\n", cfgkat_last_error_message());
    cfgkat_program_free(pa);
    cfgkat_program_free(pb);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("main");
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let cc = Command::new("cc")
        .arg(&main)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .expect("a C compiler");
    assert!(cc.status.success(), "{}", String::from_utf8_lossy(&cc.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stdout));
    assert!(String::from_utf8_lossy(&run.stdout).contains("undefined label"));
}
