use latmod_ffi::*;
use std::ffi::CStr;
use std::ptr;

fn new(kind: LmLatticeKind, n: usize, lambda: f64) -> *mut LmLattice {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { lm_lattice_new(kind, n, lambda, &mut h) }, LmStatus::Ok);
    assert!(!h.is_null());
    h
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(lm_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn e8_fold_through_the_c_interface() {
    let h = new(LmLatticeKind::E8, 8, std::f64::consts::FRAC_1_SQRT_2);
    let x = [2.3, -3.1, 5.6, 1.2, -4.4, 3.1, 6.7, -2.2];
    let (mut r, mut p, mut q) = ([0.0; 8], [0.0; 8], [0.0; 8]);
    unsafe {
        assert_eq!(lm_fold(h, x.as_ptr(), 8, r.as_mut_ptr(), p.as_mut_ptr()), LmStatus::Ok);
        assert_eq!(lm_nearest_point(h, x.as_ptr(), 8, q.as_mut_ptr()), LmStatus::Ok);
        lm_lattice_free(h);
    }
    let want = [2.0, -3.0, 6.0, 1.0, -4.0, 3.0, 7.0, -2.0];
    for i in 0..8 {
        assert!((p[i] - want[i]).abs() < 1e-12 && (q[i] - want[i]).abs() < 1e-12);
        assert!((r[i] + p[i] - x[i]).abs() < 1e-12);
    }
}

#[test]
fn info_and_relevant_vectors() {
    for (kind, n, count) in [(LmLatticeKind::Zn, 2, 4), (LmLatticeKind::A2, 2, 6), (LmLatticeKind::Dn, 4, 24), (LmLatticeKind::E8, 8, 240)] {
        let h = new(kind, n, 0.5);
        let mut info = LmLatticeInfo::default();
        let mut c = 0usize;
        unsafe {
            assert_eq!(lm_lattice_info(h, &mut info), LmStatus::Ok);
            assert_eq!(lm_relevant_vectors(h, ptr::null_mut(), 0, &mut c), LmStatus::Ok);
        }
        assert_eq!((info.dim, c), (n, count));
        assert!((info.d_min - 1.0).abs() < 1e-12);
        let mut buf = vec![0.0; c * n];
        unsafe {
            assert_eq!(lm_relevant_vectors(h, buf.as_mut_ptr(), c - 1, &mut c), LmStatus::InvalidArgument);
            assert_eq!(lm_relevant_vectors(h, buf.as_mut_ptr(), c, &mut c), LmStatus::Ok);
            lm_lattice_free(h);
        }
        let shortest = buf.chunks(n).map(|v| v.iter().map(|a| a * a).sum::<f64>().sqrt()).fold(f64::INFINITY, f64::min);
        assert!((shortest - 1.0).abs() < 1e-12);
    }
}

#[test]
fn errors_are_reported() {
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(lm_lattice_new(LmLatticeKind::E8, 7, 1.0, &mut h), LmStatus::InvalidArgument);
        assert!(h.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(lm_lattice_new(LmLatticeKind::Zn, 2, 1.0, ptr::null_mut()), LmStatus::NullPointer);
        assert_eq!(lm_nearest_point(ptr::null(), ptr::null(), 0, ptr::null_mut()), LmStatus::NullPointer);
    }
    let h = new(LmLatticeKind::Dn, 6, 1.0);
    let x = [0.0; 6];
    let mut out = [0.0; 6];
    let mut c = 0;
    unsafe {
        assert_eq!(lm_relevant_vectors(h, ptr::null_mut(), 0, &mut c), LmStatus::Unsupported);
        assert_eq!(lm_nearest_point(h, x.as_ptr(), 5, out.as_mut_ptr()), LmStatus::InvalidArgument);
        assert!(last_error().contains("dimension"));
        assert_eq!(lm_nearest_point(h, x.as_ptr(), 6, out.as_mut_ptr()), LmStatus::Ok);
        assert!(last_error().is_empty());
        assert_eq!(lm_recover_hod(h, x.as_ptr(), 1, 2, out.as_mut_ptr(), ptr::null_mut()), LmStatus::InvalidArgument);
        lm_lattice_free(h);
        lm_lattice_free(ptr::null_mut());
    }
}

fn folded_tone(k: usize, amp: f64) -> (Vec<f64>, Vec<f64>) {
    // two channels, 2 cycles per record, heavily folded at λ = 1
    let f: Vec<f64> = (0..k)
        .flat_map(|i| {
            let t = i as f64 / k as f64;
            let w = (std::f64::consts::PI * t).sin().powi(2);
            let a = 2.0 * std::f64::consts::PI * 2.0 * t;
            [amp * w * a.cos(), amp * w * a.sin()]
        })
        .collect();
    let h = new(LmLatticeKind::A2, 2, 1.0);
    let mut y = vec![0.0; f.len()];
    for (xi, yi) in f.chunks(2).zip(y.chunks_mut(2)) {
        unsafe { lm_fold(h, xi.as_ptr(), 2, yi.as_mut_ptr(), ptr::null_mut()) };
    }
    unsafe { lm_lattice_free(h) };
    (f, y)
}

#[test]
fn recovery_through_the_c_interface() {
    let k = 200;
    let (f, y) = folded_tone(k, 4.0);
    let h = new(LmLatticeKind::A2, 2, 1.0);
    let info = LmRecordInfo { fs: k as f64, omega_max: 3.0, dynamic_range: 4.0, noise_var: 0.0, guard: 0.1, tail_fraction: 0.04 };
    let (mut fb, mut pb) = (vec![0.0; 2 * k], vec![0.0; 2 * k]);
    let mut fh = vec![0.0; 2 * k];
    unsafe {
        assert_eq!(lm_recover_b2r2(h, y.as_ptr(), k, &info, fb.as_mut_ptr(), pb.as_mut_ptr()), LmStatus::Ok, "{}", last_error());
        assert_eq!(lm_recover_hod(h, y.as_ptr(), k, 2, fh.as_mut_ptr(), ptr::null_mut()), LmStatus::Ok);
        assert_eq!(lm_recover_b2r2(h, y.as_ptr(), k, ptr::null(), fb.as_mut_ptr(), ptr::null_mut()), LmStatus::NullPointer);
        lm_lattice_free(h);
    }
    assert!(pb.iter().any(|&v| v != 0.0));
    for i in 0..2 * k {
        assert!((fb[i] - f[i]).abs() < 1e-9, "b2r2 at {i}");
        assert!((fh[i] - f[i]).abs() < 1e-9, "hod at {i}");
    }
}

#[test]
fn header_declares_the_interface() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/latmod.h")).unwrap();
    for name in [
        "lm_lattice_new", "lm_lattice_free", "lm_lattice_info", "lm_nearest_point", "lm_fold",
        "lm_relevant_vectors", "lm_recover_b2r2", "lm_recover_hod", "lm_last_error", "LM_STATUS_PANIC",
        "typedef struct LmLattice LmLattice",
    ] {
        assert!(h.contains(name), "{name}");
    }
}
