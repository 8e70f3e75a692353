//! The C ABI exercised from Rust and from a C program linked against the
//! static library.

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use dislac_ffi::*;

fn last_error() -> String {
    let p = dislac_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn radar_metrics_through_the_abi() {
    let cfg = DislacOfdmConfig {
        delta_f: 1e3,
        n_subcarriers: 1024,
        n_symbols: 64,
        t_pri: 1e-3,
        fc: 1e9,
        cp: 1.6e-6,
        scs: 60e3,
    };
    let mut m = DislacRadarMetrics::default();
    assert_eq!(
        unsafe { dislac_radar_metrics(&cfg, &mut m) },
        DislacStatus::Ok
    );
    assert!((m.r_max / m.delta_r - 1024.0).abs() < 1e-9);
    assert!((m.r_max - 149.896229).abs() < 1e-6);

    let bad = DislacOfdmConfig {
        delta_f: -1.0,
        ..cfg
    };
    assert_eq!(
        unsafe { dislac_radar_metrics(&bad, &mut m) },
        DislacStatus::InvalidArgument
    );
    assert!(last_error().contains("delta_f"));
    assert_eq!(
        unsafe { dislac_radar_metrics(ptr::null(), &mut m) },
        DislacStatus::NullPointer
    );
    assert_eq!(
        unsafe { dislac_radar_metrics(&cfg, ptr::null_mut()) },
        DislacStatus::NullPointer
    );
}

#[test]
fn scalar_functions() {
    let mut b = DislacWaveformBounds::default();
    assert_eq!(
        unsafe { dislac_required_config(100.0, 7.5, 6.662e9, &mut b) },
        DislacStatus::Ok
    );
    assert!((b.delta_f_max - 1498.96229).abs() < 1e-6);

    let mut n = 0u64;
    assert_eq!(
        unsafe { dislac_overhead_model(DislacTopology::Star, DislacRole::Central, 16, 32, &mut n) },
        DislacStatus::Ok
    );
    assert_eq!(n, 16711680);
    assert_eq!(
        unsafe { dislac_overhead_model(DislacTopology::Ring, DislacRole::Central, 4, 4, &mut n) },
        DislacStatus::InvalidArgument
    );

    let label = CString::new("mc").unwrap();
    let mut seed = 0u64;
    assert_eq!(
        unsafe { dislac_derive_seed(0, label.as_ptr(), 0, &mut seed) },
        DislacStatus::Ok
    );
    assert_eq!(seed, 0x6f5b69ad1d358f73);
    assert_eq!(
        unsafe { dislac_derive_seed(0, ptr::null(), 0, &mut seed) },
        DislacStatus::NullPointer
    );
    let bad_utf8 = [0xffu8, 0];
    assert_eq!(
        unsafe { dislac_derive_seed(0, bad_utf8.as_ptr().cast(), 0, &mut seed) },
        DislacStatus::InvalidUtf8
    );

    let mut r = 0.0;
    assert_eq!(
        unsafe { dislac_slant_range(0.0, 600.0, 6371.0, &mut r) },
        DislacStatus::Ok
    );
    assert!((r - 600.0).abs() < 1e-9);
    assert_eq!(
        unsafe { dislac_slant_range(91.0, 600.0, 6371.0, &mut r) },
        DislacStatus::InvalidArgument
    );
}

#[test]
fn constellation_handle() {
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { dislac_constellation_new(50, 600.0, 7.5, 0.0, 5.0, 1, 0.0, 0.0, &mut h) },
        DislacStatus::Ok
    );
    assert_eq!(unsafe { dislac_constellation_len(h) }, 50);

    let mut written = 0usize;
    let mut short = vec![DislacProfileRow::default(); 10];
    let status = unsafe {
        dislac_constellation_profile(
            h,
            2e9,
            1.6e-6,
            60e3,
            0.1,
            short.as_mut_ptr(),
            short.len(),
            &mut written,
        )
    };
    assert_eq!(status, DislacStatus::BufferTooSmall);
    assert_eq!(written, 50);

    let mut rows = vec![DislacProfileRow::default(); 50];
    let status = unsafe {
        dislac_constellation_profile(
            h,
            2e9,
            1.6e-6,
            60e3,
            0.1,
            rows.as_mut_ptr(),
            rows.len(),
            &mut written,
        )
    };
    assert_eq!(status, DislacStatus::Ok);
    assert_eq!(written, 50);
    assert!(rows.iter().any(|r| r.differential_delay_us == 0.0));
    assert!(rows
        .iter()
        .all(|r| r.zenith_deg <= 5.0 + 1e-9 && r.doppler_ok));
    unsafe { dislac_constellation_free(h) };
    unsafe { dislac_constellation_free(ptr::null_mut()) };

    assert_eq!(
        unsafe { dislac_constellation_new(0, 600.0, 7.5, 0.0, 5.0, 1, 0.0, 0.0, &mut h) },
        DislacStatus::InvalidArgument
    );
    assert!(h.is_null());
}

#[test]
fn run_handle() {
    let dir = tempfile::tempdir().unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    let config =
        CString::new("experiment = \"waveform-sweep\"\n[waveform-sweep]\nlevels = 3\n").unwrap();
    let mut run = ptr::null_mut();
    assert_eq!(
        unsafe { dislac_run(config.as_ptr(), out.as_ptr(), &mut run) },
        DislacStatus::Ok
    );
    assert_eq!(unsafe { dislac_run_artifact_count(run) }, 1);
    let csv = unsafe { CStr::from_ptr(dislac_run_artifact_path(run, 0)) }
        .to_str()
        .unwrap()
        .to_string();
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 4);
    assert!(unsafe { dislac_run_artifact_path(run, 1) }.is_null());
    let manifest = unsafe { CStr::from_ptr(dislac_run_manifest_path(run)) }
        .to_str()
        .unwrap()
        .to_string();
    assert!(std::path::Path::new(&manifest).exists());
    assert!(unsafe { dislac_run_duration(run) } >= 0.0);
    unsafe { dislac_run_free(run) };

    let bad = CString::new("experiment = \"warp-drive\"\n").unwrap();
    assert_eq!(
        unsafe { dislac_run(bad.as_ptr(), out.as_ptr(), &mut run) },
        DislacStatus::InvalidArgument
    );
    assert!(run.is_null());
    assert!(last_error().contains("warp-drive"));
}

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_header_and_static_library() {
    let lib = target_dir().join("libdislac_ffi.a");
    assert!(
        lib.exists(),
        "static library not built at {}",
        lib.display()
    );
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "dislac.h"

int main(void) {
    uint64_t n = 0;
    if (dislac_overhead_model(DISLAC_TOPOLOGY_RING, DISLAC_ROLE_EDGE, 4, 32, &n) != DISLAC_STATUS_OK) return 1;
    DislacOfdmConfig cfg = {1e3, 1024, 64, 1e-3, 1e9, 1.6e-6, 60e3};
    DislacRadarMetrics m;
    if (dislac_radar_metrics(&cfg, &m) != DISLAC_STATUS_OK) return 2;
    double r;
    if (dislac_slant_range(95.0, 600.0, 6371.0, &r) != DISLAC_STATUS_INVALID_ARGUMENT) return 3;
    printf("%llu %.3f %s\n", (unsigned long long)n, m.r_max, dislac_last_error() ? "err" : "none");
    return 0;
}
"#,
    )
    .unwrap();
    let exe = tmp.path().join("smoke");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler (`cc`) is required for this test");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        "1114112 149.896 err\n"
    );
}
