use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use mzak_ffi::*;

macro_rules! head {
    () => {
        "schema_version = 1\nmode = \"simulate\"\n"
    };
}

macro_rules! tables {
    () => {
        "[grid]\npoints = 16\n[sim]\ndt = 0.01\nt_end = 0.2\n"
    };
}

const SIM: &str = concat!(head!(), tables!());

fn parse(text: &str) -> (MzStatus, *mut MzConfig) {
    let text = CString::new(text).unwrap();
    let mut cfg = ptr::null_mut();
    let s = unsafe { mz_config_parse(text.as_ptr(), &mut cfg) };
    (s, cfg)
}

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    unsafe {
        mz_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn simulation(cfg: *const MzConfig) -> *mut MzSimulation {
    let mut sim = ptr::null_mut();
    assert_eq!(unsafe { mz_simulation_new(cfg, &mut sim) }, MzStatus::Ok);
    sim
}

fn invariants(sim: *const MzSimulation) -> MzInvariants {
    let mut q = MzInvariants::default();
    assert_eq!(
        unsafe { mz_simulation_invariants(sim, &mut q) },
        MzStatus::Ok
    );
    q
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(mz_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn simulation_through_handles() {
    let (s, cfg) = parse(SIM);
    assert_eq!(s, MzStatus::Ok);
    let sim = simulation(cfg);
    let q0 = invariants(sim);
    assert_eq!(unsafe { mz_simulation_advance(sim, 20) }, MzStatus::Ok);
    let q1 = invariants(sim);
    let (mut t, mut step) = (0.0, 0u64);
    assert_eq!(
        unsafe { mz_simulation_time(sim, &mut t, &mut step) },
        MzStatus::Ok
    );
    assert_eq!(step, 20);
    assert!((t - 0.2).abs() < 1e-12);
    assert!((q1.i1 - q0.i1).abs() <= 1e-12 * q0.i1);
    assert!((q1.i2 - q0.i2).abs() <= 1e-5 * q0.i2.abs());
    let mut r = 1.0;
    assert_eq!(
        unsafe { mz_simulation_conjugacy_residual(sim, &mut r) },
        MzStatus::Ok
    );
    assert!(r < 1e-12);
    unsafe {
        mz_simulation_free(sim);
        mz_config_free(cfg);
    }
}

#[test]
fn saved_state_resumes_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("mid.bin");
    let (_, cfg) = parse(SIM);
    let whole = simulation(cfg);
    let half = simulation(cfg);
    unsafe {
        assert_eq!(mz_simulation_advance(whole, 20), MzStatus::Ok);
        assert_eq!(mz_simulation_advance(half, 10), MzStatus::Ok);
        let p = CString::new(ck.to_str().unwrap()).unwrap();
        assert_eq!(mz_simulation_save(half, p.as_ptr()), MzStatus::Ok);
    }
    let (s, resumed_cfg) = parse(&format!(
        concat!(head!(), "resume_from = {:?}\n", tables!()),
        ck.to_str().unwrap()
    ));
    assert_eq!(s, MzStatus::Ok, "{}", last_error());
    let resumed = simulation(resumed_cfg);
    unsafe {
        assert_eq!(mz_simulation_advance(resumed, 10), MzStatus::Ok);
    }
    let (a, b) = (invariants(whole), invariants(resumed));
    assert_eq!(a, b);
    let mut step = 0;
    unsafe {
        mz_simulation_time(resumed, ptr::null_mut(), &mut step);
        mz_simulation_free(whole);
        mz_simulation_free(half);
        mz_simulation_free(resumed);
        mz_config_free(cfg);
        mz_config_free(resumed_cfg);
    }
    assert_eq!(step, 20);
}

#[test]
fn errors_map_to_status_codes() {
    let (s, cfg) = parse("schema_version = 1\nmode = \"simulate\"\nbogus = 1\n");
    assert_eq!(s, MzStatus::Config);
    assert!(cfg.is_null());
    assert!(last_error().contains("bogus"));

    let (s, _) = parse(
        "schema_version = 1\nmode = \"bourgain_check\"\n[grid]\ndimension = 3\npoints = 8\n\
         [bourgain]\nlemmas = [\"C\"]\nk = 0.0\nl = -1.0\nband = 1\n",
    );
    assert_eq!(s, MzStatus::Config);
    assert!(last_error().contains("(k,l)=(0,−1)"));

    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { mz_config_parse(ptr::null(), &mut out) },
        MzStatus::NullPointer
    );
    assert_eq!(
        unsafe { mz_simulation_advance(ptr::null_mut(), 1) },
        MzStatus::NullPointer
    );
    let bad = [0xffu8 as c_char, 0];
    assert_eq!(
        unsafe { mz_config_parse(bad.as_ptr(), &mut out) },
        MzStatus::InvalidUtf8
    );

    let mut m1 = 0.0;
    assert_eq!(
        unsafe { mz_smaller_root(1.0, 1.0, &mut m1) },
        MzStatus::InvalidArgument
    );
    assert_eq!(unsafe { mz_smaller_root(0.01, 1.0, &mut m1) }, MzStatus::Ok);
    assert!((m1 - 0.01 * m1 * m1 - 1.0).abs() < 1e-12);
    assert_eq!(last_error(), "");

    let (_, cfg) = parse(SIM);
    assert_eq!(
        unsafe { mz_config_set_seed(cfg, u64::MAX) },
        MzStatus::Config
    );
    let mut c0 = 0.0;
    assert_eq!(
        unsafe { mz_estimate_c0(cfg, 10, &mut c0) },
        MzStatus::InvalidArgument
    );
    unsafe { mz_config_free(cfg) };
}

#[test]
fn blow_up_is_reported() {
    let (_, cfg) = parse(
        "schema_version = 1\nmode = \"simulate\"\n[grid]\npoints = 16\n[sim]\ndt = 0.5\n\
         [initial]\nkind = \"gaussian_packet\"\namplitude = 100.0\n",
    );
    let sim = simulation(cfg);
    let s = unsafe { mz_simulation_advance(sim, 200) };
    assert_eq!(s, MzStatus::BlowUp, "{}", last_error());
    unsafe {
        mz_simulation_free(sim);
        mz_config_free(cfg);
    }
}

#[test]
fn run_writes_artifacts_and_reports_status() {
    let dir = tempfile::tempdir().unwrap();
    let (_, cfg) = parse(SIM);
    let d = CString::new(dir.path().to_str().unwrap()).unwrap();
    let mut status = -1;
    let mut hash = 0;
    unsafe {
        assert_eq!(mz_config_set_output_dir(cfg, d.as_ptr()), MzStatus::Ok);
        assert_eq!(mz_config_set_seed(cfg, 42), MzStatus::Ok);
        assert_eq!(mz_config_hash(cfg, &mut hash), MzStatus::Ok);
        assert_eq!(mz_run(cfg, &mut status), MzStatus::Ok);
        mz_config_free(cfg);
    }
    assert_eq!(status, 0);
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains(&format!("config_hash = {hash:016x}")));
    assert!(summary.contains("seed = 42"));
}

fn target_dir() -> PathBuf {
    // <target>/<profile>/deps/<test-binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = crate_dir.join("include/mzak.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "mz_config_parse",
        "mz_simulation_advance",
        "mz_last_error_message",
        "MZ_STATUS_BLOW_UP",
    ] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let lib = target_dir().join("libmzak_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");
    let cc = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(
        cc.status.success(),
        "{}",
        String::from_utf8_lossy(&cc.stderr)
    );
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
