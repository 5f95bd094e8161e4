use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use vvmf_ffi::*;

fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { vvmf_string_free(p) };
    s
}

fn last_error() -> String {
    let p = vvmf_last_error();
    assert!(!p.is_null(), "expected an error message");
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn named(name: &str, order: i64) -> *mut VvmfSeries {
    let c = CString::new(name).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { vvmf_series_named(c.as_ptr(), order, &mut out) }, VvmfStatus::Ok);
    out
}

#[test]
fn series_round_trip_and_identity() {
    let e4 = named("E4", 16);
    let e6 = named("E6", 16);
    let delta = named("Delta", 16);
    let (mut e4_3, mut e6_2, mut diff) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(vvmf_series_pow(e4, 3, &mut e4_3), VvmfStatus::Ok);
        assert_eq!(vvmf_series_pow(e6, 2, &mut e6_2), VvmfStatus::Ok);
        assert_eq!(vvmf_series_binary(VvmfSeriesOp::Sub, e4_3, e6_2, &mut diff), VvmfStatus::Ok);
        let mut coeff = ptr::null_mut();
        assert_eq!(vvmf_series_coefficient(diff, 2, 1, &mut coeff), VvmfStatus::Ok);
        // 1728·τ(2) = 1728·(−24)
        assert_eq!(take_string(coeff), r#"{"order":1,"coeffs":["-41472"]}"#);

        let mut json = ptr::null_mut();
        assert_eq!(vvmf_series_to_json(delta, &mut json), VvmfStatus::Ok);
        let json = CString::new(take_string(json)).unwrap();
        let mut back = ptr::null_mut();
        assert_eq!(vvmf_series_from_json(json.as_ptr(), &mut back), VvmfStatus::Ok);
        let mut same = false;
        assert_eq!(vvmf_series_agree(back, delta, &mut same), VvmfStatus::Ok);
        assert!(same);
        for p in [e4, e6, delta, e4_3, e6_2, diff, back] {
            vvmf_series_free(p);
        }
    }
}

#[test]
fn errors_carry_status_and_message() {
    let bogus = CString::new("bogus").unwrap();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(vvmf_series_named(bogus.as_ptr(), 8, &mut out), VvmfStatus::InvalidArgument);
        assert!(out.is_null());
        assert!(last_error().contains("unknown form"));
        assert_eq!(vvmf_series_named(ptr::null(), 8, &mut out), VvmfStatus::NullPointer);

        let zero = CString::new(r#"{"grid":1,"lead":4,"valid_to":4,"coeffs":[]}"#).unwrap();
        let one = named("E4", 4);
        let mut z = ptr::null_mut();
        assert_eq!(vvmf_series_from_json(zero.as_ptr(), &mut z), VvmfStatus::Ok);
        let mut q = ptr::null_mut();
        assert_eq!(vvmf_series_binary(VvmfSeriesOp::Div, one, z, &mut q), VvmfStatus::DivisionByZero);
        vvmf_series_free(one);
        vvmf_series_free(z);

        let bad_rep = CString::new(
            r#"{"name":"bad","dimension":1,"cyclotomic_order":1,
                "S":[[{"order":1,"coeffs":["1"]}]],"T":[[{"order":1,"coeffs":["2"]}]]}"#,
        )
        .unwrap();
        let mut rep = ptr::null_mut();
        assert_eq!(vvmf_rep_from_json(bad_rep.as_ptr(), &mut rep), VvmfStatus::RelationFailed);
        assert!(last_error().contains("(S T^-1)^3 = I"));
        assert_eq!(vvmf_rep_from_json(c"{".as_ptr(), &mut rep), VvmfStatus::Parse);
    }
}

#[test]
fn representations_and_determinants() {
    unsafe {
        let (mut k1, mut k5, mut sum, mut back) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(vvmf_rep_kappa(1, &mut k1), VvmfStatus::Ok);
        assert_eq!(vvmf_rep_kappa(5, &mut k5), VvmfStatus::Ok);
        assert_eq!(vvmf_rep_direct_sum(k1, k5, &mut sum), VvmfStatus::Ok);
        let mut d = 0usize;
        let mut eps = 0i64;
        assert_eq!(vvmf_rep_dimension(sum, &mut d), VvmfStatus::Ok);
        assert_eq!(vvmf_rep_epsilon(sum, &mut eps), VvmfStatus::Ok);
        assert_eq!((d, eps), (2, 1));
        assert_eq!(vvmf_rep_twist(sum, -1, &mut back), VvmfStatus::Ok);
        assert_eq!(vvmf_rep_epsilon(back, &mut eps), VvmfStatus::Ok);
        assert_eq!(eps, 0);

        let mut report = ptr::null_mut();
        assert_eq!(vvmf_rep_analyze(sum, true, 0, 3, false, 0, &mut report), VvmfStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take_string(report)).unwrap();
        assert_eq!(report["multiplicities"]["beta2"], 1);
        assert_eq!(report["candidate_multisets"][0]["ks"], serde_json::json!([0, 2]));

        let mut mixed = ptr::null_mut();
        let mut triv = ptr::null_mut();
        assert_eq!(vvmf_rep_kappa(0, &mut triv), VvmfStatus::Ok);
        assert_eq!(vvmf_rep_direct_sum(k1, triv, &mut mixed), VvmfStatus::InvalidArgument);

        let mut det = ptr::null_mut();
        assert_eq!(vvmf_rep_det(k1, 2, 16, &mut det), VvmfStatus::InvalidArgument);
        assert_eq!(vvmf_rep_det(k1, 1, 16, &mut det), VvmfStatus::Ok);
        let delta = named("delta", 16);
        let mut same = false;
        assert_eq!(vvmf_series_agree(det, delta, &mut same), VvmfStatus::Ok);
        assert!(same);

        let mut json = ptr::null_mut();
        assert_eq!(vvmf_rep_to_json(sum, &mut json), VvmfStatus::Ok);
        assert!(take_string(json).contains("\"cyclotomic_order\":12"));

        vvmf_series_free(det);
        vvmf_series_free(delta);
        for r in [k1, k5, sum, back, triv] {
            vvmf_rep_free(r);
        }
    }
}

#[test]
fn suites_and_generators() {
    unsafe {
        let mut out = ptr::null_mut();
        let mut passed = false;
        assert_eq!(vvmf_verify_suite(c"kappa".as_ptr(), 8, 7, &mut out, &mut passed), VvmfStatus::Ok);
        assert!(passed);
        assert!(take_string(out).contains("\"suite\":\"kappa\""));
        assert_eq!(
            vvmf_verify_suite(c"nope".as_ptr(), 8, 7, &mut out, &mut passed),
            VvmfStatus::InvalidArgument
        );

        let gens = vvmf::detlab::diagonal_kappa_generators(&[2, 4], 16).unwrap();
        let file = vvmf::detlab::GeneratorsFile {
            rep_name: "k2+k4".into(),
            dimension: 2,
            generators: gens,
        };
        let json = CString::new(serde_json::to_string(&file).unwrap()).unwrap();
        assert_eq!(vvmf_check_generators(json.as_ptr(), 16, &mut out, &mut passed), VvmfStatus::Ok);
        assert!(passed);
        let report: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(report["expected_exponent"], "1/2");

        let mut same_cols = file.clone();
        same_cols.generators[1] = same_cols.generators[0].clone();
        let json = CString::new(serde_json::to_string(&same_cols).unwrap()).unwrap();
        assert_eq!(vvmf_check_generators(json.as_ptr(), 16, &mut out, &mut passed), VvmfStatus::Singular);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(vvmf_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn target_dir() -> PathBuf {
    // tests run from <target>/<profile>/deps
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_is_generated() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/vvmf.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["vvmf_series_named", "vvmf_rep_analyze", "vvmf_last_error", "typedef struct VvmfSeries VvmfSeries"] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn c_program_links_against_static_library() {
    // test builds only produce the rlib; build the static library explicitly
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let mut build = Command::new(cargo);
    build.args(["build", "--quiet", "--lib", "-p", "vvmf-ffi"]);
    if target_dir().ends_with("release") {
        build.arg("--release");
    }
    let built = build
        .env("CARGO_TARGET_DIR", target_dir().parent().unwrap())
        .status()
        .unwrap();
    assert!(built.success());
    let lib = target_dir().join("libvvmf_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c11")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
