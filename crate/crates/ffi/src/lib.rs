//! C ABI for the `vicsek` crate.
//!
//! Objects are opaque handles created by `*_new` functions and released by
//! the matching `*_free`. Every fallible function returns a [`VicsekStatus`]
//! and writes its results through out-pointers; on failure the message is
//! available from [`vicsek_last_error`] on the same thread. Panics never
//! cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vicsek::gaps::{clustering_certificate, gap_containing};
use vicsek::green::{green_eval, SkeletonPoint};
use vicsek::kernels::heat_trace;
use vicsek::{DecimationSystem, Series, SpectrumTable, VicsekParams, VsError};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VicsekStatus {
    Ok = 0,
    InvalidArgument = 1,
    Budget = 2,
    NoConvergence = 3,
    Singular = 4,
    NullPointer = 5,
    Panic = 6,
}

/// Decimation data for one arm parameter `n`.
pub struct VicsekSystem(DecimationSystem);

/// Distinct eigenvalues through some depth, ascending.
pub struct VicsekSpectrum(SpectrumTable);

/// One row of a spectrum. `series` is 0 for the 0-series and 1 for the
/// 4/3-series.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VicsekRecord {
    pub series: u32,
    pub birth_level: u32,
    pub word_len: u32,
    pub multiplicity: u64,
    pub value: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VicsekClustering {
    pub t: f64,
    pub rprime: f64,
    pub rho: f64,
    pub certified: bool,
}

/// A point described by the arm (0..4) and distance `s` of its attachment
/// to the main cross, and its distance `offset` from there. Two points in
/// the same attached tree cannot be evaluated through this struct.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VicsekSkeletonPoint {
    pub arm: u32,
    pub s: f64,
    pub offset: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &VsError) -> VicsekStatus {
    match e {
        VsError::Budget { .. } => VicsekStatus::Budget,
        VsError::NoConvergence(_) => VicsekStatus::NoConvergence,
        VsError::Singular(_) => VicsekStatus::Singular,
        _ => VicsekStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), VicsekStatus>) -> VicsekStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VicsekStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            VicsekStatus::Panic
        }
    }
}

fn lib<T>(r: vicsek::Result<T>) -> Result<T, VicsekStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, VicsekStatus> {
    p.as_ref().ok_or_else(|| {
        set_error(format!("{what} is null"));
        VicsekStatus::NullPointer
    })
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, VicsekStatus> {
    p.as_mut().ok_or_else(|| {
        set_error(format!("{what} is null"));
        VicsekStatus::NullPointer
    })
}

/// Message of the last failure on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn vicsek_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `out_sys` must be null or point to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn vicsek_system_new(n: u32, out_sys: *mut *mut VicsekSystem) -> VicsekStatus {
    guard(|| {
        let slot = out(out_sys, "out_sys")?;
        let p = lib(VicsekParams::new(n as usize))?;
        *slot = Box::into_raw(Box::new(VicsekSystem(DecimationSystem::new(p))));
        Ok(())
    })
}

/// # Safety
/// `sys` must be null or a handle from [`vicsek_system_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vicsek_system_free(sys: *mut VicsekSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// `ρ = (4n − 3)(2n − 1)` and `α = ln(4n − 3)/ln ρ`.
///
/// # Safety
/// `sys` must be a live handle; the out-pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn vicsek_system_scales(
    sys: *const VicsekSystem,
    rho: *mut f64,
    alpha: *mut f64,
) -> VicsekStatus {
    guard(|| {
        let s = &deref(sys, "sys")?.0;
        if let Some(r) = rho.as_mut() {
            *r = s.rho();
        }
        if let Some(a) = alpha.as_mut() {
            *a = s.params().alpha();
        }
        Ok(())
    })
}

/// `ψ_n(t)` for `t ∈ [0, 4/3]`.
///
/// # Safety
/// `sys` must be a live handle and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn vicsek_psi(sys: *const VicsekSystem, t: f64, value: *mut f64) -> VicsekStatus {
    guard(|| {
        let s = &deref(sys, "sys")?.0;
        *out(value, "value")? = lib(s.psi(t))?;
        Ok(())
    })
}

/// # Safety
/// `sys` must be a live handle and `out_spec` writable.
#[no_mangle]
pub unsafe extern "C" fn vicsek_spectrum_new(
    sys: *const VicsekSystem,
    depth: u32,
    out_spec: *mut *mut VicsekSpectrum,
) -> VicsekStatus {
    guard(|| {
        let s = &deref(sys, "sys")?.0;
        let slot = out(out_spec, "out_spec")?;
        let t = lib(s.enumerate_spectrum(depth as usize))?;
        *slot = Box::into_raw(Box::new(VicsekSpectrum(t)));
        Ok(())
    })
}

/// # Safety
/// `table` must be null or a handle from [`vicsek_spectrum_new`] not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn vicsek_spectrum_free(table: *mut VicsekSpectrum) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of distinct eigenvalues; 0 for a null handle.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vicsek_spectrum_len(table: *const VicsekSpectrum) -> usize {
    table.as_ref().map_or(0, |s| s.0.len())
}

/// # Safety
/// `table` must be a live handle and `record` writable.
#[no_mangle]
pub unsafe extern "C" fn vicsek_spectrum_get(
    table: *const VicsekSpectrum,
    index: usize,
    record: *mut VicsekRecord,
) -> VicsekStatus {
    guard(|| {
        let s = &deref(table, "table")?.0;
        let slot = out(record, "record")?;
        let Some(r) = s.records().get(index) else {
            set_error(format!("index {index} out of range 0..{}", s.len()));
            return Err(VicsekStatus::InvalidArgument);
        };
        *slot = VicsekRecord {
            series: match r.series {
                Series::Zero => 0,
                Series::FourThirds => 1,
            },
            birth_level: r.birth_level as u32,
            word_len: r.word.len() as u32,
            multiplicity: r.multiplicity,
            value: r.value,
        };
        Ok(())
    })
}

/// Copies up to `cap` letters of the record's word into `letters` and
/// stores the full length in `len`.
///
/// # Safety
/// `table` must be a live handle, `letters` must hold `cap` values (or be
/// null with `cap == 0`), and `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vicsek_spectrum_word(
    table: *const VicsekSpectrum,
    index: usize,
    letters: *mut u16,
    cap: usize,
    len: *mut usize,
) -> VicsekStatus {
    guard(|| {
        let s = &deref(table, "table")?.0;
        let n = out(len, "len")?;
        let Some(r) = s.records().get(index) else {
            set_error(format!("index {index} out of range 0..{}", s.len()));
            return Err(VicsekStatus::InvalidArgument);
        };
        *n = r.word.len();
        let k = cap.min(r.word.len());
        if k > 0 {
            if letters.is_null() {
                set_error("letters is null".into());
                return Err(VicsekStatus::NullPointer);
            }
            ptr::copy_nonoverlapping(r.word.as_ptr(), letters, k);
        }
        Ok(())
    })
}

/// Eigenvalue counting function with multiplicities.
///
/// # Safety
/// `table` must be a live handle and `count` writable.
#[no_mangle]
pub unsafe extern "C" fn vicsek_spectrum_counting(
    table: *const VicsekSpectrum,
    x: f64,
    count: *mut u64,
) -> VicsekStatus {
    guard(|| {
        let s = &deref(table, "table")?.0;
        *out(count, "count")? = s.counting(x);
        Ok(())
    })
}

/// `Σ m(λ) e^{−tλ}` at `len` times; `t^α` times the trace goes to `scaled`
/// when it is not null.
///
/// # Safety
/// `ts` and `trace` must hold `len` values; `scaled` must be null or hold
/// `len` values.
#[no_mangle]
pub unsafe extern "C" fn vicsek_heat_trace(
    table: *const VicsekSpectrum,
    alpha: f64,
    ts: *const f64,
    len: usize,
    trace: *mut f64,
    scaled: *mut f64,
) -> VicsekStatus {
    guard(|| {
        let s = &deref(table, "table")?.0;
        if len == 0 {
            return Ok(());
        }
        let ts = std::slice::from_raw_parts(deref(ts, "ts")?, len);
        let tr = std::slice::from_raw_parts_mut(out(trace, "trace")?, len);
        let pts = lib(heat_trace(s, alpha, ts))?;
        for (o, p) in tr.iter_mut().zip(&pts) {
            *o = p.trace;
        }
        if !scaled.is_null() {
            let sc = std::slice::from_raw_parts_mut(scaled, len);
            for (o, p) in sc.iter_mut().zip(&pts) {
                *o = p.scaled;
            }
        }
        Ok(())
    })
}

/// Looks for a certified gap of word length `ell` around a ratio in
/// `[1, ρ]`. `found` is set to false when the point is covered.
///
/// # Safety
/// `sys` must be a live handle; `found`, `lo` and `hi` writable.
#[no_mangle]
pub unsafe extern "C" fn vicsek_gap_containing(
    sys: *const VicsekSystem,
    ell: u32,
    point: f64,
    found: *mut bool,
    lo: *mut f64,
    hi: *mut f64,
) -> VicsekStatus {
    guard(|| {
        let s = &deref(sys, "sys")?.0;
        let (f, l, h) = (out(found, "found")?, out(lo, "lo")?, out(hi, "hi")?);
        match lib(gap_containing(s, ell as usize, point))? {
            Some((a, b)) => {
                (*f, *l, *h) = (true, a, b);
            }
            None => {
                (*f, *l, *h) = (false, f64::NAN, f64::NAN);
            }
        }
        Ok(())
    })
}

/// # Safety
/// `sys` must be a live handle and `cert` writable.
#[no_mangle]
pub unsafe extern "C" fn vicsek_clustering(sys: *const VicsekSystem, cert: *mut VicsekClustering) -> VicsekStatus {
    guard(|| {
        let s = &deref(sys, "sys")?.0;
        let c = clustering_certificate(s);
        *out(cert, "cert")? = VicsekClustering {
            t: c.t,
            rprime: c.rprime,
            rho: c.rho,
            certified: c.certified,
        };
        Ok(())
    })
}

fn skeleton(p: &VicsekSkeletonPoint) -> SkeletonPoint {
    SkeletonPoint {
        arm: p.arm as usize,
        s: p.s,
        offset: p.offset,
        branch_path: (p.offset == 0.0).then(Vec::new),
    }
}

/// Green's function of the Dirichlet problem at the four corners.
///
/// # Safety
/// `x` and `y` must be readable and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn vicsek_green(
    x: *const VicsekSkeletonPoint,
    y: *const VicsekSkeletonPoint,
    value: *mut f64,
) -> VicsekStatus {
    guard(|| {
        let (x, y) = (deref(x, "x")?, deref(y, "y")?);
        *out(value, "value")? = lib(green_eval(&skeleton(x), &skeleton(y)))?;
        Ok(())
    })
}
