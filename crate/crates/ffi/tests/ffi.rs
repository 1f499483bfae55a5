use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use bft_ffi::*;

fn noise(epsilon: f64, bias: f64) -> BftNoise {
    BftNoise { epsilon, epsilon_prime: epsilon / bias }
}

fn last_error() -> String {
    let p = bft_last_error_message();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { bft_string_free(p) };
    s
}

#[test]
fn bound_through_c_abi() {
    let mut out = BftBoundReport::default();
    let st = unsafe { bft_cnot_failure_bound(3, 3, 3, 3, BftNoise { epsilon: 1e-3, epsilon_prime: 1e-7 }, &mut out) };
    assert_eq!(st, BftStatus::Ok);
    assert!((out.eps_nd - 6.3e-6).abs() < 1e-12);
    assert!((out.eps_total - 1.1163e-3).abs() < 1e-9);

    let mut e = 0.0;
    assert_eq!(unsafe { bft_effective_noise(11, noise(2.5e-3, 1e4), &mut e) }, BftStatus::Ok);
    assert!(e > 6.5e-4 && e <= 6.7e-4);
}

#[test]
fn invalid_arguments_set_status_and_message() {
    let mut out = BftBoundReport::default();
    let st = unsafe { bft_cnot_failure_bound(4, 3, 3, 3, noise(1e-3, 1e4), &mut out) };
    assert_eq!(st, BftStatus::InvalidArgument);
    assert!(last_error().contains("odd"));

    let st = unsafe { bft_effective_noise(3, noise(1e-3, 1e4), ptr::null_mut()) };
    assert_eq!(st, BftStatus::NullPointer);
    assert!(last_error().contains("null"));
}

#[test]
fn threshold_injection_flagged() {
    let mut th = BftThreshold::default();
    assert_eq!(unsafe { bft_optimize_threshold(1e4, 0.67e-3, 3, 41, &mut th) }, BftStatus::Ok);
    assert_eq!(th.n, 11);
    assert!((th.eps_max - 2.50e-3).abs() < 0.01e-3);

    let mut inj = BftInjectionReport::default();
    assert_eq!(unsafe { bft_injection_bound(11, 11, noise(2.5e-3, 1e4), &mut inj) }, BftStatus::Ok);
    assert!(inj.pass && inj.eps_bm <= 3.02e-2);

    let mut f = BftFlaggedBounds::default();
    assert_eq!(unsafe { bft_flagged_bounds(7, 7, 5, noise(3.51e-3, 1e4), &mut f) }, BftStatus::Ok);
    assert!(f.denominator > 0.0 && f.eps_noflag <= f.eps_flag);
    assert_eq!(unsafe { bft_flagged_bounds(7, 7, 5, noise(0.05, 1e4), &mut f) }, BftStatus::Infeasible);
}

#[test]
fn circuit_handle_lifecycle() {
    let params = BftGadgetParams { kind: BftGadget::Cnot, n: 3, r: 3, r1: 3, r2: 5, t: 0 };
    let mut c: *mut BftCircuit = ptr::null_mut();
    assert_eq!(unsafe { bft_circuit_new(&params, 0, &mut c) }, BftStatus::Ok);
    assert!(!c.is_null());

    let mut stats = BftCircuitStats::default();
    assert_eq!(unsafe { bft_circuit_stats(c, &mut stats) }, BftStatus::Ok);
    assert_eq!(stats.cphase_count, (2 * 3 + 3 * 5) * 3);

    let mut text: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(unsafe { bft_circuit_to_text(c, &mut text) }, BftStatus::Ok);
    let s = unsafe { CStr::from_ptr(text) }.to_str().unwrap().to_owned();
    unsafe { bft_string_free(text) };
    assert_eq!(s.lines().count() as u64, stats.cphase_count + stats.prep_count + stats.meas_count);

    let mut a = BftSimResult::default();
    let mut b = BftSimResult::default();
    unsafe {
        assert_eq!(bft_circuit_simulate(c, noise(1e-2, 1e3), 20_000, 9, &mut a), BftStatus::Ok);
        assert_eq!(bft_circuit_simulate(c, noise(1e-2, 1e3), 20_000, 9, &mut b), BftStatus::Ok);
    }
    assert_eq!((a.failures, a.trials), (b.failures, 20_000));
    assert!(a.ci_lo <= a.failure_rate && a.failure_rate <= a.ci_hi);
    assert_eq!(unsafe { bft_circuit_simulate(c, noise(1e-2, 1e3), 0, 9, &mut a) }, BftStatus::InvalidArgument);

    unsafe { bft_circuit_free(c) };
    unsafe { bft_circuit_free(ptr::null_mut()) };
}

#[test]
fn bad_circuit_leaves_null_handle() {
    let params = BftGadgetParams { kind: BftGadget::MeasZl, n: 2, r: 3, r1: 0, r2: 0, t: 0 };
    let mut c: *mut BftCircuit = 8 as *mut BftCircuit;
    assert_eq!(unsafe { bft_circuit_new(&params, 0, &mut c) }, BftStatus::InvalidArgument);
    assert!(c.is_null());
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(bft_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/bft.h")
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(header()).unwrap();
    let src = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 12);
    for name in exports {
        assert!(h.contains(&format!("{name}(")), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(cc.status.success());
    let dir = std::env::temp_dir().join(format!("bft-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("use.c");
    std::fs::write(
        &src,
        "#include \"bft.h\"\n\
         int probe(void) {\n\
           BftBoundReport r;\n\
           BftNoise p = {1e-3, 1e-7};\n\
           BftCircuit *c = 0;\n\
           BftGadgetParams g = {BFT_GADGET_CNOT, 3, 3, 3, 3, 0};\n\
           if (bft_circuit_new(&g, 0, &c) != BFT_STATUS_OK) return 1;\n\
           bft_circuit_free(c);\n\
           return bft_cnot_failure_bound(3, 3, 3, 3, p, &r) == BFT_STATUS_OK ? 0 : 1;\n\
         }\n",
    )
    .unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-c", "-o"])
        .arg(dir.join("use.o"))
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .status()
        .unwrap();
    std::fs::remove_dir_all(&dir).ok();
    assert!(status.success());
}
