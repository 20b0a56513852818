//! C ABI over the `spinring` library.
//!
//! Every function returns a [`SpinringStatus`] and writes results through
//! out-pointers. On failure the message is kept per thread and can be read
//! with [`spinring_last_error`]. Rings are opaque handles created with
//! [`spinring_ring_new`] and released with [`spinring_ring_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use spinring::amplitude::{amplitude, AmplitudeQuery, Method};
use spinring::blockage::verify_blockage;
use spinring::entangler::entropy_at;
use spinring::optimizer::{search_transfer, SearchSpec};
use spinring::{bessel_j, Error, RingConfig, SiteVector};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinringStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidConfig = 2,
    InvalidArgument = 3,
    SizeGuard = 4,
    Truncation = 5,
    Unphysical = 6,
    EmptyWindow = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinringMethod {
    Spectral = 0,
    Bessel = 1,
    Oracle = 2,
}

impl From<SpinringMethod> for Method {
    fn from(m: SpinringMethod) -> Self {
        match m {
            SpinringMethod::Spectral => Method::Spectral,
            SpinringMethod::Bessel => Method::Bessel,
            SpinringMethod::Oracle => Method::Oracle,
        }
    }
}

/// Opaque ring configuration.
pub struct SpinringRing {
    config: RingConfig,
}

/// Real and imaginary parts of an amplitude plus its magnitude.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SpinringAmplitude {
    pub re: f64,
    pub im: f64,
    pub xi: f64,
}

/// Optimal twist, scaled time and quality for one offset.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SpinringOptimum {
    pub f: f64,
    pub beta: f64,
    pub xi: f64,
    pub fidelity: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn status_of(err: &Error) -> SpinringStatus {
    match err {
        Error::InvalidConfig(_) => SpinringStatus::InvalidConfig,
        Error::InvalidArgument(_) | Error::DuplicateSite(_) => SpinringStatus::InvalidArgument,
        Error::SizeGuard { .. } => SpinringStatus::SizeGuard,
        Error::Truncation { .. } => SpinringStatus::Truncation,
        Error::Unphysical(_) => SpinringStatus::Unphysical,
        Error::EmptyWindow(_) => SpinringStatus::EmptyWindow,
    }
}

fn guard<F>(body: F) -> SpinringStatus
where
    F: FnOnce() -> Result<(), SpinringStatus> + UnwindSafe,
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(body) {
        Ok(Ok(())) => SpinringStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic".to_string());
            SpinringStatus::Panic
        }
    }
}

fn lift<T>(r: spinring::Result<T>) -> Result<T, SpinringStatus> {
    r.map_err(|e| {
        let status = status_of(&e);
        set_error(e.to_string());
        status
    })
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), SpinringStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        Err(SpinringStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// Create a ring of `n` sites with coupling, field and twist.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn spinring_ring_new(
    n: usize,
    coupling: f64,
    field: f64,
    twist: f64,
    out: *mut *mut SpinringRing,
) -> SpinringStatus {
    guard(|| {
        non_null(out, "out")?;
        let config = lift(RingConfig::with_params(n, coupling, field, twist))?;
        let handle = Box::into_raw(Box::new(SpinringRing { config }));
        unsafe { *out = handle };
        Ok(())
    })
}

/// Release a ring. Null is accepted and ignored.
///
/// # Safety
/// `ring` must come from [`spinring_ring_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn spinring_ring_free(ring: *mut SpinringRing) {
    if !ring.is_null() {
        drop(unsafe { Box::from_raw(ring) });
    }
}

/// Number of sites of a ring.
///
/// # Safety
/// `ring` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spinring_ring_sites(ring: *const SpinringRing, out: *mut usize) -> SpinringStatus {
    guard(|| {
        non_null(ring, "ring")?;
        non_null(out, "out")?;
        unsafe { *out = (*ring).config.n() };
        Ok(())
    })
}

/// Transfer magnitude for receiver offset `d` at scaled time `beta`.
///
/// # Safety
/// `ring` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spinring_xi(ring: *const SpinringRing, d: i64, beta: f64, out: *mut f64) -> SpinringStatus {
    guard(|| {
        non_null(ring, "ring")?;
        non_null(out, "out")?;
        let config = unsafe { &(*ring).config };
        let query = lift(AmplitudeQuery::from_offset(*config, d, beta))?;
        let result = lift(amplitude(&query, Method::Spectral))?;
        unsafe { *out = result.xi };
        Ok(())
    })
}

/// Amplitude from 1-based `sender` to `receiver` with a chosen method.
///
/// # Safety
/// `ring` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spinring_amplitude(
    ring: *const SpinringRing,
    receiver: usize,
    sender: usize,
    beta: f64,
    method: SpinringMethod,
    out: *mut SpinringAmplitude,
) -> SpinringStatus {
    guard(|| {
        non_null(ring, "ring")?;
        non_null(out, "out")?;
        let config = unsafe { &(*ring).config };
        let query = lift(AmplitudeQuery::new(*config, receiver, sender, beta))?;
        let result = lift(amplitude(&query, method.into()))?;
        unsafe {
            *out = SpinringAmplitude {
                re: result.value.re,
                im: result.value.im,
                xi: result.xi,
            }
        };
        Ok(())
    })
}

/// Bessel function of the first kind `J_n(x)` for `n >= 0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinring_bessel_j(n: i64, x: f64, out: *mut f64) -> SpinringStatus {
    guard(|| {
        non_null(out, "out")?;
        let value = lift(bessel_j(n, x))?;
        unsafe { *out = value };
        Ok(())
    })
}

/// Best twist and time for offset `d` on an `n`-site ring over
/// `[beta_min, beta_max]` with grid spacing `beta_step`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinring_optimize(
    n: usize,
    d: usize,
    beta_min: f64,
    beta_max: f64,
    beta_step: f64,
    out: *mut SpinringOptimum,
) -> SpinringStatus {
    guard(|| {
        non_null(out, "out")?;
        let spec = SearchSpec::default()
            .with_window(beta_min, beta_max)
            .with_step(beta_step);
        let best = lift(search_transfer(n, d, &spec))?.best;
        let fidelity = best.fidelity.unwrap_or(f64::NAN);
        unsafe {
            *out = SpinringOptimum {
                f: best.f,
                beta: best.beta,
                xi: best.xi,
                fidelity,
            }
        };
        Ok(())
    })
}

/// Largest diametric transfer magnitude of the `4 nn`-site ring at half
/// flux over `count` scaled times. `holds` is set to 1 when blocked.
///
/// # Safety
/// `betas` must point to `count` readable doubles; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinring_blockage(
    nn: usize,
    betas: *const f64,
    count: usize,
    max_xi: *mut f64,
    holds: *mut i32,
) -> SpinringStatus {
    guard(|| {
        non_null(max_xi, "max_xi")?;
        non_null(holds, "holds")?;
        let samples: &[f64] = if count == 0 {
            &[]
        } else {
            non_null(betas, "betas")?;
            unsafe { std::slice::from_raw_parts(betas, count) }
        };
        let report = lift(verify_blockage(nn, samples))?;
        unsafe {
            *max_xi = report.max_xi_over_samples;
            *holds = i32::from(report.holds());
        }
        Ok(())
    })
}

/// Flux/ring entanglement in ebits and branch overlap for an excitation
/// started on `site` (1-based) of an `n`-site ring.
///
/// # Safety
/// Outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinring_entanglement(
    n: usize,
    site: usize,
    beta: f64,
    entropy: *mut f64,
    overlap: *mut f64,
) -> SpinringStatus {
    guard(|| {
        non_null(entropy, "entropy")?;
        non_null(overlap, "overlap")?;
        let start = lift(SiteVector::localized(n, site))?;
        let reading = lift(entropy_at(&start, beta))?;
        unsafe {
            *entropy = reading.entropy_ebits;
            *overlap = reading.branch_overlap;
        }
        Ok(())
    })
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn spinring_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a nul-terminated string.
#[no_mangle]
pub extern "C" fn spinring_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
