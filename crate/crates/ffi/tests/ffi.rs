use std::ffi::{CStr, CString};
use std::ptr;

use fermi_ent_ffi::*;

fn last_error() -> String {
    let p = fe_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn ghz_entropy_and_spectrum() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(fe_state_ghz(8, 2, &mut s), FeStatus::Ok);
        let mut e = 0.0;
        assert_eq!(fe_entropy(s, 1, &mut e), FeStatus::Ok);
        assert!((e - 4.0 * 2f64.ln()).abs() < 1e-12);

        let mut written = 0;
        assert_eq!(
            fe_spectrum(s, 2, ptr::null_mut(), 0, &mut written),
            FeStatus::BufferTooSmall
        );
        assert_eq!(written, 28);
        let mut buf = vec![0.0; written];
        assert_eq!(
            fe_spectrum(s, 2, buf.as_mut_ptr(), buf.len(), &mut written),
            FeStatus::Ok
        );
        assert!((buf.iter().sum::<f64>() - 6.0).abs() < 1e-12);

        let (mut d, mut n, mut t) = (0, 0, 0);
        assert_eq!(fe_state_shape(s, &mut d, &mut n, &mut t), FeStatus::Ok);
        assert_eq!((d, n, t), (8, 4, 2));
        fe_state_free(s);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(fe_state_ghz(5, 2, &mut s), FeStatus::InvalidArgument);
        assert!(s.is_null());
        assert!(last_error().contains("does not divide"));
        let mut e = 0.0;
        assert_eq!(fe_entropy(ptr::null(), 1, &mut e), FeStatus::NullPointer);
        let bad = CString::new("{\"D\": 4,").unwrap();
        assert_eq!(
            fe_state_from_json(bad.as_ptr(), false, &mut s),
            FeStatus::Parse
        );
        let unnormalised = CString::new(
            r#"{"D": 4, "N": 2, "terms": [{"orbitals": [1, 2], "re": 2.0, "im": 0.0}]}"#,
        )
        .unwrap();
        assert_eq!(
            fe_state_from_json(unnormalised.as_ptr(), false, &mut s),
            FeStatus::Validation
        );
        assert_eq!(
            fe_state_from_json(unnormalised.as_ptr(), true, &mut s),
            FeStatus::Ok
        );
        assert!(fe_last_error().is_null());
        fe_state_free(s);
    }
}

#[test]
fn json_round_trip() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(fe_state_paired(8, 2, &mut s), FeStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(fe_state_to_json(s, &mut json), FeStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(fe_state_from_json(json, false, &mut back), FeStatus::Ok);
        let mut ok = false;
        let mut dev = 1.0;
        assert_eq!(
            fe_verify_maximal(back, 1, 1e-10, &mut ok, &mut dev),
            FeStatus::Ok
        );
        assert!(ok && dev < 1e-12);
        fe_string_free(json);
        fe_state_free(s);
        fe_state_free(back);
    }
}

#[test]
fn search_and_constants() {
    unsafe {
        let mut v = FeVerdict::Unknown;
        let mut s = ptr::null_mut();
        let mut report = ptr::null_mut();
        assert_eq!(
            fe_search(13, 4, 2, 0, 0.0, &mut v, &mut s, &mut report),
            FeStatus::Ok
        );
        assert_eq!(v, FeVerdict::ExistsSteinerOnly);
        let mut ok = false;
        let mut dev = 1.0;
        assert_eq!(
            fe_verify_maximal(s, 2, 1e-10, &mut ok, &mut dev),
            FeStatus::Ok
        );
        assert!(ok);
        let text = CStr::from_ptr(report).to_str().unwrap();
        let json: serde_json::Value = serde_json::from_str(text).unwrap();
        assert_eq!(json["verdict"], "ExistsSteinerOnly");
        fe_string_free(report);
        fe_state_free(s);

        assert_eq!(
            fe_search(7, 2, 1, 0, 0.0, &mut v, ptr::null_mut(), ptr::null_mut()),
            FeStatus::Ok
        );
        assert_eq!(v, FeVerdict::ExhaustedNoSolution);

        let mut a2 = 0.0;
        assert_eq!(fe_compute_a2(&mut a2), FeStatus::Ok);
        assert!((a2 + 0.055393).abs() < 1e-5);
        let ver = CStr::from_ptr(fe_version()).to_str().unwrap();
        assert_eq!(ver, env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn random_states_are_reproducible() {
    unsafe {
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(fe_state_random(6, 3, 42, &mut a), FeStatus::Ok);
        assert_eq!(fe_state_random(6, 3, 42, &mut b), FeStatus::Ok);
        let (mut ja, mut jb) = (ptr::null_mut(), ptr::null_mut());
        fe_state_to_json(a, &mut ja);
        fe_state_to_json(b, &mut jb);
        assert_eq!(CStr::from_ptr(ja), CStr::from_ptr(jb));
        fe_string_free(ja);
        fe_string_free(jb);
        fe_state_free(a);
        fe_state_free(b);
    }
}

/// Compiles and runs a small C program against the generated header and the static library.
#[test]
fn header_compiles_and_links() {
    let Ok(cc) = which_cc() else { return };
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header_dir = root.join("include");
    // the staticlib sits next to the test binary's deps directory
    let exe = std::env::current_exe().unwrap();
    let target_dir = exe.parent().unwrap().parent().unwrap();
    let lib = target_dir.join("libfermi_ent_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let src = dir.join("smoke.c");
    std::fs::write(
        &src,
        r#"#include "fermi_ent.h"
#include <stdio.h>
int main(void) {
    FeState *s = NULL;
    if (fe_state_ghz(8, 2, &s) != FE_STATUS_OK) return 1;
    double e = 0.0;
    if (fe_entropy(s, 2, &e) != FE_STATUS_OK) return 2;
    fe_state_free(s);
    printf("%.12f\n", e);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.join("smoke");
    let status = std::process::Command::new(&cc)
        .arg(&src)
        .arg(format!("-I{}", header_dir.display()))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&bin).output().unwrap();
    assert!(out.status.success());
    let e: f64 = String::from_utf8(out.stdout)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!((e - 6.0 * 2f64.ln()).abs() < 1e-9);
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if std::process::Command::new(cc)
            .arg("--version")
            .output()
            .is_ok()
        {
            return Ok(cc.to_string());
        }
    }
    Err(())
}
