use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use noma_sat_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ns_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn rate_and_errors() {
    let mut r = 0.0;
    assert_eq!(ns_rate_ian(3.0, 0.0, &mut r), NsStatus::Ok);
    assert!((r - 2.0).abs() < 1e-12);
    assert_eq!(ns_rate_ian(f64::NAN, 0.0, &mut r), NsStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    assert_eq!(ns_rate_ian(1.0, 0.0, ptr::null_mut()), NsStatus::NullPointer);
    assert!(last_error().contains("out_rate"));
}

#[test]
fn region_handle_lifecycle() {
    let mut reg = ptr::null_mut();
    assert_eq!(
        ns_region_two_user(10.0, 10.0, 100.0, 100.0, NS_MODE_IAN, &mut reg),
        NsStatus::Ok
    );
    // a rectangle: the Pareto boundary is its corner
    let n = ns_region_len(reg);
    assert_eq!(n, 1);
    let (mut a, mut b) = (0.0, 0.0);
    assert_eq!(ns_region_point(reg, 0, &mut a, &mut b), NsStatus::Ok);
    let corner = (1.0 + 10.0 / 101.0f64).log2();
    assert!((a - corner).abs() < 1e-12 && (b - corner).abs() < 1e-12);
    assert_eq!(ns_region_point(reg, n, &mut a, &mut b), NsStatus::InvalidArgument);
    let mut inside = false;
    assert_eq!(ns_region_contains(reg, 0.01, 0.01, 1e-9, &mut inside), NsStatus::Ok);
    assert!(inside);
    assert_eq!(ns_region_contains(reg, 5.0, 5.0, 1e-9, &mut inside), NsStatus::Ok);
    assert!(!inside);
    ns_region_free(reg);
    ns_region_free(ptr::null_mut());
    assert_eq!(ns_region_len(ptr::null()), 0);
    assert_eq!(
        ns_region_two_user(1.0, 1.0, 1.0, 1.0, 9, &mut reg),
        NsStatus::InvalidArgument
    );
}

#[test]
fn hk_and_orthogonal_sum_rates() {
    let (mut hk, mut orth) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(ns_region_hk(10.0, 10.0, 0.0, 0.0, 0.1, &mut hk), NsStatus::Ok);
    assert_eq!(ns_region_orthogonal(10.0, 10.0, 0.0, 0.0, 0.1, &mut orth), NsStatus::Ok);
    let (mut a, mut b) = (0.0, 0.0);
    ns_region_max_sum(hk, &mut a);
    ns_region_max_sum(orth, &mut b);
    // without interference both reach 2 C(10) at best
    assert!((a - 2.0 * 11f64.log2()).abs() < 1e-9);
    assert!(b <= a + 1e-9);
    ns_region_free(hk);
    ns_region_free(orth);
}

#[test]
fn feeder_and_jain() {
    let mut hz = 0.0;
    assert_eq!(ns_feeder_bandwidth(NS_FEEDER_LDM, 245, 5e8, &mut hz), NsStatus::Ok);
    assert_eq!(hz, 2.45e11);
    assert_eq!(ns_feeder_bandwidth(7, 1, 1.0, &mut hz), NsStatus::InvalidArgument);
    let mut j = 0.0;
    let rates = [1.0, 3.0];
    assert_eq!(ns_jain_fairness(rates.as_ptr(), 2, &mut j), NsStatus::Ok);
    assert!((j - 0.8).abs() < 1e-15);
    let zeros = [0.0, 0.0];
    assert_eq!(ns_jain_fairness(zeros.as_ptr(), 2, &mut j), NsStatus::InvalidArgument);
}

#[test]
fn simulation_round_trip() {
    let toml = CString::new("k = 7\nn = 7\ndrops = 2\nseed = 5").unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(ns_sim_config_from_toml(toml.as_ptr(), &mut cfg), NsStatus::Ok);
    let mut s = ptr::null_mut();
    assert_eq!(ns_compare_schemes(cfg, &mut s), NsStatus::Ok);
    let n = ns_summary_len(s);
    assert_eq!(n, 5);
    let mut row = NsSummaryRow {
        scheme: 0,
        scheduler: 0,
        drops: 0,
        mean_bps: 0.0,
        median_bps: 0.0,
        p10_bps: 0.0,
        mean_jain: 0.0,
        gain_vs_four_color_pct: 0.0,
    };
    assert_eq!(ns_summary_row(s, 0, &mut row), NsStatus::Ok);
    assert_eq!(row.scheme, NS_SCHEME_FOUR_COLOR);
    assert_eq!(row.gain_vs_four_color_pct, 0.0);
    assert_eq!(ns_summary_row(s, 2, &mut row), NsStatus::Ok);
    assert_eq!((row.scheme, row.scheduler), (NS_SCHEME_MULTILAYER_NOMA, 0));
    assert_eq!(ns_summary_skipped(s), 0);
    ns_summary_free(s);
    ns_sim_config_free(cfg);

    let bad = CString::new("k = 3\nn = 2").unwrap();
    assert_eq!(ns_sim_config_from_toml(bad.as_ptr(), &mut cfg), NsStatus::Config);
    let junk = CString::new("k = [").unwrap();
    assert_eq!(ns_sim_config_from_toml(junk.as_ptr(), &mut cfg), NsStatus::Config);
}

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_declares_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/noma_sat.h")).unwrap();
    for f in [
        "ns_last_error",
        "ns_rate_ian",
        "ns_region_two_user",
        "ns_region_free",
        "ns_compare_schemes",
        "ns_summary_row",
        "typedef struct NsRegion NsRegion",
        "NS_STATUS_SINGULAR_CHANNEL",
    ] {
        assert!(header.contains(f), "{f} missing from header");
    }
}

#[test]
fn c_program_links_against_static_library() {
    let lib = target_dir().join("libnoma_sat_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = Path::new(env!("CARGO_TARGET_TMPDIR")).join("ffi_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("run C compiler");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
