use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use proptest::prelude::*;
use vicsek::{DecimationSystem, VicsekParams};
use vicsek_ffi::*;

fn system(n: u32) -> *mut VicsekSystem {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { vicsek_system_new(n, &mut s) }, VicsekStatus::Ok);
    s
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(vicsek_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn spectrum_matches_library() {
    let sys = system(2);
    let mut handle = ptr::null_mut();
    unsafe {
        assert_eq!(vicsek_spectrum_new(sys, 3, &mut handle), VicsekStatus::Ok);
        let table = DecimationSystem::new(VicsekParams::new(2).unwrap()).enumerate_spectrum(3).unwrap();
        assert_eq!(vicsek_spectrum_len(handle), table.len());
        let mut r = VicsekRecord {
            series: 9,
            birth_level: 0,
            word_len: 0,
            multiplicity: 0,
            value: 0.0,
        };
        let mut letters = [0u16; 8];
        for (i, want) in table.records().iter().enumerate() {
            assert_eq!(vicsek_spectrum_get(handle, i, &mut r), VicsekStatus::Ok);
            assert_eq!(r.value, want.value);
            assert_eq!(r.multiplicity, want.multiplicity);
            assert_eq!(r.word_len as usize, want.word.len());
            let mut len = 0;
            assert_eq!(vicsek_spectrum_word(handle, i, letters.as_mut_ptr(), 8, &mut len), VicsekStatus::Ok);
            assert_eq!(&letters[..len], &want.word[..]);
        }
        let mut count = 0;
        vicsek_spectrum_counting(handle, 3.0, &mut count);
        assert_eq!(count, 4);
        assert_eq!(vicsek_spectrum_get(handle, 10_000, &mut r), VicsekStatus::InvalidArgument);
        assert!(last_error().contains("out of range"));
        vicsek_spectrum_free(handle);
        vicsek_system_free(sys);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(vicsek_system_new(1, &mut s), VicsekStatus::InvalidArgument);
        assert!(s.is_null());
        assert!(last_error().contains("n must be"));
        assert_eq!(vicsek_system_new(2, ptr::null_mut()), VicsekStatus::NullPointer);
        let sys = system(2);
        let mut handle = ptr::null_mut();
        assert_eq!(vicsek_spectrum_new(sys, 40, &mut handle), VicsekStatus::Budget);
        assert!(handle.is_null());
        let mut v = 0.0;
        assert_eq!(vicsek_psi(ptr::null(), 0.5, &mut v), VicsekStatus::NullPointer);
        assert_eq!(vicsek_spectrum_len(ptr::null()), 0);
        vicsek_system_free(sys);
        vicsek_system_free(ptr::null_mut());
    }
}

#[test]
fn certificates_and_green() {
    unsafe {
        let sys = system(4);
        let mut c = VicsekClustering {
            t: 0.0,
            rprime: 0.0,
            rho: 0.0,
            certified: false,
        };
        assert_eq!(vicsek_clustering(sys, &mut c), VicsekStatus::Ok);
        assert!((c.t - 0.8891).abs() < 5e-5 && c.rho == 91.0 && c.certified);
        vicsek_system_free(sys);

        let sys = system(2);
        let (mut found, mut lo, mut hi) = (false, 0.0, 0.0);
        let st = vicsek_gap_containing(sys, 1, 15f64.sqrt(), &mut found, &mut lo, &mut hi);
        assert_eq!(st, VicsekStatus::Ok);
        assert!(found && (lo - 3.5370).abs() < 1e-3 && (hi - 4.2409).abs() < 1e-3);
        let mut rho = 0.0;
        vicsek_system_scales(sys, &mut rho, ptr::null_mut());
        assert_eq!(rho, 15.0);
        vicsek_system_free(sys);

        let q0 = VicsekSkeletonPoint {
            arm: 0,
            s: 0.0,
            offset: 0.0,
        };
        let y = VicsekSkeletonPoint {
            arm: 2,
            s: 0.5,
            offset: 0.0,
        };
        let mut g = 0.0;
        assert_eq!(vicsek_green(&q0, &y, &mut g), VicsekStatus::Ok);
        assert_eq!(g, 0.125);
        let off = VicsekSkeletonPoint { offset: 0.1, ..y };
        assert_eq!(vicsek_green(&off, &off, &mut g), VicsekStatus::InvalidArgument);
    }
}

#[test]
fn heat_trace_through_the_abi() {
    unsafe {
        let sys = system(2);
        let mut handle = ptr::null_mut();
        vicsek_spectrum_new(sys, 4, &mut handle);
        let mut alpha = 0.0;
        vicsek_system_scales(sys, ptr::null_mut(), &mut alpha);
        let ts = [1e-3, 1.0, 50.0];
        let mut tr = [0.0; 3];
        let mut sc = [0.0; 3];
        let st = vicsek_heat_trace(handle, alpha, ts.as_ptr(), 3, tr.as_mut_ptr(), sc.as_mut_ptr());
        assert_eq!(st, VicsekStatus::Ok);
        assert!((tr[2] - 1.0).abs() < 1e-12);
        assert!(tr[0] > tr[1] && tr[1] > tr[2]);
        assert_eq!(sc[1], tr[1]);
        let bad = [-1.0];
        assert_eq!(
            vicsek_heat_trace(handle, alpha, bad.as_ptr(), 1, tr.as_mut_ptr(), ptr::null_mut()),
            VicsekStatus::InvalidArgument
        );
        vicsek_spectrum_free(handle);
        vicsek_system_free(sys);
    }
}

#[test]
fn header_declares_every_export() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/vicsek.h")).unwrap();
    let src = std::fs::read_to_string(dir.join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|r| r.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 12);
    for f in exports {
        assert!(header.contains(&format!("{f}(")), "{f} missing from the header");
    }
}

/// Builds the C smoke program against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libvicsek_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let bin = tmp.path().join("smoke");
    let status = Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("n must be"));
}

proptest! {
    #[test]
    fn psi_matches_library(n in 2u32..6, t in 0.0f64..4.0 / 3.0) {
        let sys = system(n);
        let mut v = 0.0;
        let st = unsafe { vicsek_psi(sys, t, &mut v) };
        prop_assert_eq!(st, VicsekStatus::Ok);
        let want = DecimationSystem::new(VicsekParams::new(n as usize).unwrap()).psi(t).unwrap();
        prop_assert_eq!(v, want);
        unsafe { vicsek_system_free(sys) };
    }
}
