use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use sawspec_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(sawspec_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn dedekind_through_abi() {
    let (mut n, mut d) = (0i64, 0i64);
    assert_eq!(unsafe { sawspec_dedekind_sum(101, 7, &mut n, &mut d) }, SawspecStatus::Ok);
    assert_eq!((n, d), (104, 101));
    assert_eq!(unsafe { sawspec_dedekind_sum(12, 5, &mut n, &mut d) }, SawspecStatus::Domain);
    assert_eq!(unsafe { sawspec_dedekind_sum(101, 7, ptr::null_mut(), &mut d) }, SawspecStatus::NullPointer);
    assert!(last_error().contains("num"));
}

#[test]
fn character_table_handle() {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { sawspec_character_table_new(101, 10_000, &mut t) }, SawspecStatus::Ok);
    assert_eq!(unsafe { sawspec_character_table_q(t) }, 101);
    let mut values = vec![0.0; 100];
    assert_eq!(unsafe { sawspec_ck_all(t, values.as_mut_ptr(), values.len()) }, SawspecStatus::Ok);
    for k in 1..100 {
        assert!((values[k - 1] + values[100 - k]).abs() < 1e-12);
    }
    let mut point = 0.0;
    assert_eq!(unsafe { sawspec_ck_point(t, 5, &mut point) }, SawspecStatus::Ok);
    assert!((point - values[4]).abs() < 1e-10);
    assert_eq!(unsafe { sawspec_ck_all(t, values.as_mut_ptr(), 10) }, SawspecStatus::BufferTooSmall);
    let mut c2 = 0.0;
    assert_eq!(unsafe { sawspec_c2_pair(t, 3, 3, &mut c2) }, SawspecStatus::Ok);
    assert!((c2 - 99.0 / 2.0 * (101.0 / (2.0 * std::f64::consts::PI)).ln()).abs() < 1e-10);
    let pattern = [1i64, 2];
    let (mut c1, mut c2p) = (0.0, 0.0);
    assert_eq!(
        unsafe { sawspec_pattern_constants(t, pattern.as_ptr(), 2, &mut c1, &mut c2p) },
        SawspecStatus::Ok
    );
    assert_eq!(c1, 0.5);
    unsafe { sawspec_character_table_free(t) };
    unsafe { sawspec_character_table_free(ptr::null_mut()) };
}

#[test]
fn composite_modulus_reports_domain() {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { sawspec_character_table_new(100, 10, &mut t) }, SawspecStatus::Domain);
    assert!(t.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn spectrum_handle() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { sawspec_spectrum_new(199, SawspecDft::ChirpZ, &mut s) }, SawspecStatus::Ok);
    let len = unsafe { sawspec_spectrum_len(s) };
    assert_eq!(len, 199);
    let mut v = vec![0.0; len];
    assert_eq!(unsafe { sawspec_spectrum_values(s, v.as_mut_ptr(), len) }, SawspecStatus::Ok);
    assert!((v[1] + v[198]).abs() < 1e-12);
    unsafe { sawspec_spectrum_free(s) };
}

#[test]
fn correlations_through_abi() {
    let moduli = [3u64, 1, 1, 1];
    let mut text = ptr::null_mut();
    let mut value = 0.0;
    assert_eq!(unsafe { sawspec_b_exact(moduli.as_ptr(), 4, &mut text, &mut value) }, SawspecStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(text) }.to_str().unwrap(), "1/240");
    unsafe { sawspec_string_free(text) };
    assert!((value - 1.0 / 240.0).abs() < 1e-16);
    let pair = [1u64, 1];
    let mut est = 0.0;
    assert_eq!(unsafe { sawspec_b_lattice(pair.as_ptr(), 2, 100, &mut est) }, SawspecStatus::Ok);
    assert!((est - 1.0 / 12.0).abs() < 1e-3);
    assert_eq!(unsafe { sawspec_discrete_correlation(7, pair.as_ptr(), 2, &mut est) }, SawspecStatus::Ok);
    assert!((est - 5.0 / 98.0).abs() < 1e-15);
    let big = [4u64, 4];
    assert_eq!(unsafe { sawspec_discrete_correlation(7, big.as_ptr(), 2, &mut est) }, SawspecStatus::Precondition);
}

#[test]
fn scalar_functions() {
    let mut v = 0.0;
    assert_eq!(unsafe { sawspec_log_integral(10.0, &mut v) }, SawspecStatus::Ok);
    assert!((v - 6.165_599_504_8).abs() < 1e-9);
    assert_eq!(unsafe { sawspec_log_integral(1.0, &mut v) }, SawspecStatus::Domain);
    assert_eq!(unsafe { sawspec_theoretical_moment(SawspecMomentKind::C, 3, 20, &mut v) }, SawspecStatus::Ok);
    assert_eq!(v, 0.0);
    assert_eq!(unsafe { sawspec_continuous_model(0.5, 1, &mut v) }, SawspecStatus::Ok);
    assert_eq!(v, 0.0);
    assert_eq!(unsafe { sawspec_rtilde_moment(10_000, 2, &mut v) }, SawspecStatus::Ok);
    assert!((v - 1.0 / (2.0 * std::f64::consts::PI.powi(2))).abs() < 0.01);
    let version = unsafe { CStr::from_ptr(sawspec_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn census_handle() {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { sawspec_census_new(30, 3, 2, &mut c) }, SawspecStatus::Ok);
    let mut n = 0u64;
    let key = [2u64, 1];
    assert_eq!(unsafe { sawspec_census_count(c, key.as_ptr(), 2, &mut n) }, SawspecStatus::Ok);
    assert_eq!(n, 4);
    assert_eq!(unsafe { sawspec_census_total(c, &mut n) }, SawspecStatus::Ok);
    assert_eq!(n, 8);
    assert_eq!(unsafe { sawspec_census_count(c, key.as_ptr(), 1, &mut n) }, SawspecStatus::InvalidArgument);
    unsafe { sawspec_census_free(c) };
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(manifest_dir().join("include/sawspec.h")).unwrap();
    for name in [
        "sawspec_last_error",
        "sawspec_dedekind_sum",
        "sawspec_character_table_new",
        "sawspec_character_table_free",
        "sawspec_ck_all",
        "sawspec_c2_pair",
        "sawspec_spectrum_new",
        "sawspec_b_exact",
        "sawspec_theoretical_moment",
        "sawspec_rtilde_moment",
        "sawspec_census_new",
        "typedef struct SawspecCharacterTable SawspecCharacterTable",
        "SAWSPEC_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

// Compiles a small C client against the header and the static library.
// Skipped when no C compiler or archive is available.
#[test]
fn c_client_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap().to_path_buf();
    let archive = profile_dir.join("libsawspec_ffi.a");
    if !archive.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no archive at {} or no cc", archive.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "sawspec.h"
int main(void) {
    int64_t n = 0, d = 0;
    if (sawspec_dedekind_sum(101, 7, &n, &d) != SAWSPEC_STATUS_OK) return 1;
    if (n != 104 || d != 101) return 2;
    SawspecCharacterTable *t = NULL;
    if (sawspec_character_table_new(12, 10, &t) != SAWSPEC_STATUS_DOMAIN) return 3;
    if (sawspec_character_table_new(11, 100, &t) != SAWSPEC_STATUS_OK) return 4;
    double c[10];
    if (sawspec_ck_all(t, c, 10) != SAWSPEC_STATUS_OK) return 5;
    sawspec_character_table_free(t);
    printf("%lld/%lld %.6f\n", (long long)n, (long long)d, c[0] + c[9]);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("client");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest_dir().join("include"))
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C client failed to compile");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C client exited with {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "104/101 0.000000");
}
