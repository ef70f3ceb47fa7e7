//! C interface to the lattice quantizers and the unfolding algorithms.
//!
//! Lattices are opaque handles created by `lm_lattice_new` and released with
//! `lm_lattice_free`. Every call returns an `LmStatus`; on failure a message
//! is available from `lm_last_error` on the same thread. Records are passed
//! as row-major `k × n` arrays of `double`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use latmod::recovery::{recover, Algorithm, B2r2Options, RecordInfo};
use latmod::{Error, LatticeKind, ScaledLattice};
use ndarray::{Array2, ArrayView2};

/// Result of every `lm_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unsupported = 3,
    Numerical = 4,
    /// A Rust panic was caught at the boundary; the message says where.
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmLatticeKind {
    /// Integer lattice (square / hypercube fold), any dimension.
    Zn = 0,
    /// Hexagonal lattice, dimension 2.
    A2 = 1,
    /// Checkerboard lattice, dimension ≥ 2.
    Dn = 2,
    /// Gosset lattice, dimension 8.
    E8 = 3,
}

impl From<LmLatticeKind> for LatticeKind {
    fn from(k: LmLatticeKind) -> Self {
        match k {
            LmLatticeKind::Zn => LatticeKind::Zn,
            LmLatticeKind::A2 => LatticeKind::A2,
            LmLatticeKind::Dn => LatticeKind::Dn,
            LmLatticeKind::E8 => LatticeKind::E8,
        }
    }
}

/// Opaque lattice handle.
pub struct LmLattice {
    inner: ScaledLattice,
}

/// Geometry of a scaled lattice.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LmLatticeInfo {
    pub dim: usize,
    /// Packing radius; the minimum distance is `2·lambda`.
    pub lambda: f64,
    pub d_min: f64,
    /// Volume of the Voronoi cell.
    pub volume: f64,
    pub covering_radius: f64,
    /// Largest coordinate magnitude inside the cell.
    pub coordinate_extent: f64,
}

/// What B²R² needs to know about a record besides its samples.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmRecordInfo {
    /// Sampling rate.
    pub fs: f64,
    /// Highest signal frequency.
    pub omega_max: f64,
    /// Peak amplitude bound of the unfolded signal.
    pub dynamic_range: f64,
    /// Per-coordinate variance of any distortion on the samples; 0 if clean.
    pub noise_var: f64,
    /// Relative guard band above `omega_max` left out of the residual (e.g. 0.1).
    pub guard: f64,
    /// Fraction of samples at each end assumed fold-free (e.g. 0.04).
    pub tail_fraction: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: LmStatus, msg: &str) -> LmStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> LmStatus {
    match e {
        Error::Unsupported(_) => LmStatus::Unsupported,
        Error::Numerical { .. } => LmStatus::Numerical,
        _ => LmStatus::InvalidArgument,
    }
}

fn guard(name: &str, f: impl FnOnce() -> Result<(), (LmStatus, String)>) -> LmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            LmStatus::Ok
        }
        Ok(Err((s, m))) => fail(s, &m),
        Err(p) => {
            let what = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_default();
            fail(LmStatus::Panic, &format!("panic in {name}: {what}"))
        }
    }
}

fn lib_err(e: Error) -> (LmStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (LmStatus, String) {
    (LmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn lattice_ref<'a>(h: *const LmLattice) -> Result<&'a ScaledLattice, (LmStatus, String)> {
    h.as_ref().map(|l| &l.inner).ok_or_else(|| null("lattice"))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], (LmStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], (LmStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn check_len(len: usize, dim: usize) -> Result<(), (LmStatus, String)> {
    if len != dim {
        return Err((LmStatus::InvalidArgument, format!("length {len} does not match lattice dimension {dim}")));
    }
    Ok(())
}

/// Message for the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next `lm_*` call on the same thread.
#[no_mangle]
pub extern "C" fn lm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a lattice of the given family and dimension with packing radius
/// `lambda`, storing the handle in `*out`.
///
/// # Safety
/// `kind` must be one of the `LmLatticeKind` values, and `out` null or valid
/// for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn lm_lattice_new(kind: LmLatticeKind, n: usize, lambda: f64, out: *mut *mut LmLattice) -> LmStatus {
    guard("lm_lattice_new", || {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let inner = ScaledLattice::new(kind.into(), n, lambda).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(LmLattice { inner }));
        Ok(())
    })
}

/// Releases a handle from `lm_lattice_new`. Null is ignored.
///
/// # Safety
/// `lattice` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lm_lattice_free(lattice: *mut LmLattice) {
    if !lattice.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(lattice))));
    }
}

/// # Safety
/// `lattice` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lm_lattice_info(lattice: *const LmLattice, out: *mut LmLatticeInfo) -> LmStatus {
    guard("lm_lattice_info", || {
        let l = lattice_ref(lattice)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = LmLatticeInfo {
            dim: l.dim(),
            lambda: l.lambda(),
            d_min: l.d_min(),
            volume: l.volume(),
            covering_radius: l.covering_radius(),
            coordinate_extent: l.coordinate_extent(),
        };
        Ok(())
    })
}

/// Writes the lattice point closest to `x` into `out`; both hold `len`
/// values, which must equal the lattice dimension.
///
/// # Safety
/// `x` must be readable and `out` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lm_nearest_point(lattice: *const LmLattice, x: *const f64, len: usize, out: *mut f64) -> LmStatus {
    guard("lm_nearest_point", || {
        let l = lattice_ref(lattice)?;
        check_len(len, l.dim())?;
        let x = slice(x, len, "x")?.to_vec();
        l.nearest_point_into(&x, slice_mut(out, len, "out")?);
        Ok(())
    })
}

/// Splits `x` into `residue + offset` with `offset` the nearest lattice point.
/// Either output may be null if not wanted.
///
/// # Safety
/// `x` must be readable for `len` doubles; non-null outputs writable for `len`.
#[no_mangle]
pub unsafe extern "C" fn lm_fold(
    lattice: *const LmLattice,
    x: *const f64,
    len: usize,
    residue: *mut f64,
    offset: *mut f64,
) -> LmStatus {
    guard("lm_fold", || {
        let l = lattice_ref(lattice)?;
        check_len(len, l.dim())?;
        let (r, p) = l.fold(slice(x, len, "x")?);
        if !residue.is_null() {
            slice_mut(residue, len, "residue")?.copy_from_slice(&r);
        }
        if !offset.is_null() {
            slice_mut(offset, len, "offset")?.copy_from_slice(&p);
        }
        Ok(())
    })
}

/// Relevant vectors (facet normals of the Voronoi cell). `*count` receives
/// their number; if `out` is non-null and `capacity` rows suffice, they are
/// written row-major as `count × dim` doubles.
///
/// # Safety
/// `count` must be writable; `out`, if non-null, writable for
/// `capacity · dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn lm_relevant_vectors(
    lattice: *const LmLattice,
    out: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> LmStatus {
    guard("lm_relevant_vectors", || {
        let l = lattice_ref(lattice)?;
        let count = count.as_mut().ok_or_else(|| null("count"))?;
        let rv = l.relevant_vectors().map_err(lib_err)?;
        *count = rv.len();
        if out.is_null() {
            return Ok(());
        }
        if capacity < rv.len() {
            return Err((LmStatus::InvalidArgument, format!("capacity {capacity} < {} vectors", rv.len())));
        }
        let n = l.dim();
        let buf = slice_mut(out, rv.len() * n, "out")?;
        for (chunk, v) in buf.chunks_exact_mut(n).zip(&rv) {
            chunk.copy_from_slice(v);
        }
        Ok(())
    })
}

unsafe fn record<'a>(y: *const f64, k: usize, n: usize) -> Result<ArrayView2<'a, f64>, (LmStatus, String)> {
    let data = slice(y, k * n, "y")?;
    ArrayView2::from_shape((k, n), data).map_err(|e| (LmStatus::InvalidArgument, e.to_string()))
}

unsafe fn write_result(
    f_hat: *mut f64,
    p_hat: *mut f64,
    f: &Array2<f64>,
    p: &Array2<f64>,
) -> Result<(), (LmStatus, String)> {
    let len = f.len();
    if !f_hat.is_null() {
        slice_mut(f_hat, len, "f_hat")?.iter_mut().zip(f.iter()).for_each(|(o, v)| *o = *v);
    }
    if !p_hat.is_null() {
        slice_mut(p_hat, len, "p_hat")?.iter_mut().zip(p.iter()).for_each(|(o, v)| *o = *v);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
unsafe fn run_recovery(
    lattice: *const LmLattice,
    y: *const f64,
    k: usize,
    info: &RecordInfo,
    alg: &Algorithm,
    guard_band: f64,
    f_hat: *mut f64,
    p_hat: *mut f64,
) -> Result<(), (LmStatus, String)> {
    let l = lattice_ref(lattice)?;
    let y = record(y, k, l.dim())?.to_owned();
    let r = recover(&y, l, info, alg, guard_band).map_err(lib_err)?;
    write_result(f_hat, p_hat, &r.f_hat, &r.p_hat.0)
}

/// Unfolds a `k × dim` record with sequential B²R². `f_hat` receives the
/// unfolded samples and `p_hat` the lattice offsets; either may be null.
///
/// # Safety
/// `y` must be readable for `k · dim` doubles, `info` readable, and non-null
/// outputs writable for `k · dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn lm_recover_b2r2(
    lattice: *const LmLattice,
    y: *const f64,
    k: usize,
    info: *const LmRecordInfo,
    f_hat: *mut f64,
    p_hat: *mut f64,
) -> LmStatus {
    guard("lm_recover_b2r2", || {
        let i = info.as_ref().ok_or_else(|| null("info"))?;
        let rec = RecordInfo { fs: i.fs, omega_max: i.omega_max, dynamic_range: i.dynamic_range, noise_var: i.noise_var };
        let alg = Algorithm::B2r2(B2r2Options { tail_fraction: i.tail_fraction, ..Default::default() });
        run_recovery(lattice, y, k, &rec, &alg, i.guard, f_hat, p_hat)
    })
}

/// Unfolds a `k × dim` record by `order`-th order differences.
///
/// # Safety
/// As for `lm_recover_b2r2`.
#[no_mangle]
pub unsafe extern "C" fn lm_recover_hod(
    lattice: *const LmLattice,
    y: *const f64,
    k: usize,
    order: usize,
    f_hat: *mut f64,
    p_hat: *mut f64,
) -> LmStatus {
    guard("lm_recover_hod", || {
        // HOD ignores the record description.
        let rec = RecordInfo { fs: 1.0, omega_max: 0.0, dynamic_range: 0.0, noise_var: 0.0 };
        run_recovery(lattice, y, k, &rec, &Algorithm::Hod { order }, 0.0, f_hat, p_hat)
    })
}
