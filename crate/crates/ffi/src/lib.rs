//! C ABI for `xyquench`.
//!
//! Every fallible function returns an [`XyqStatus`] and writes its result
//! through an out-pointer. On failure a description of the last error on the
//! calling thread is available from [`xyq_last_error_message`]. Objects
//! created by the library are opaque handles released with the matching
//! `_free` function.
//!
//! Inverse temperatures are passed as `double`; `INFINITY` selects the
//! ground state.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use xyquench::entanglement::correlators_log_negativity;
use xyquench::scan::RowStatus;
use xyquench::{
    eq_correlators, match_beta, quench_correlators, time_series, Beta, Correlators, Error, ModelParams,
    QuadratureSpec, ScanResult,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XyqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonConvergence = 3,
    NoBracket = 4,
    NonPhysical = 5,
    Io = 6,
    Panic = 7,
}

/// Status of one scan row.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XyqRowStatus {
    Ok = 0,
    NonConverged = 1,
    NonPhysical = 2,
}

/// Nearest-neighbour correlators and the transverse magnetization.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct XyqCorrelators {
    pub m_z: f64,
    pub t_xx: f64,
    pub t_yy: f64,
    pub t_zz: f64,
    pub t_xy: f64,
}

/// Correlators together with the derived observables.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct XyqObservables {
    pub correlators: XyqCorrelators,
    pub log_negativity: f64,
    pub energy: f64,
}

/// Outcome of the energy-matching solve.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct XyqBetaMatch {
    /// `INFINITY` when the state matches the ground state.
    pub beta: f64,
    pub quench_energy: f64,
    pub eq_energy_at_beta: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// One row of a scan. Fields are `NAN` where the row carries no value.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XyqScanRow {
    pub axis_value: f64,
    pub observables: XyqObservables,
    pub m_z_equilibrium: f64,
    pub log_negativity_equilibrium: f64,
    pub status: XyqRowStatus,
}

/// Opaque quench description: model parameters plus quadrature settings.
pub struct XyqModel {
    params: ModelParams,
    spec: QuadratureSpec,
    solver_tol: f64,
}

/// Opaque scan result.
pub struct XyqScan {
    inner: ScanResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> XyqStatus {
    match err {
        Error::Domain(_) | Error::InvalidParameter { .. } | Error::Format(_) => XyqStatus::InvalidArgument,
        Error::NonConvergence { .. } => XyqStatus::NonConvergence,
        Error::NoBracket { .. } => XyqStatus::NoBracket,
        Error::NonPhysical { .. } => XyqStatus::NonPhysical,
        Error::Io(_) => XyqStatus::Io,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), XyqError>>(f: F) -> XyqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => XyqStatus::Ok,
        Ok(Err(XyqError::Null(what))) => {
            set_last_error(format!("null pointer passed for `{what}`"));
            XyqStatus::NullPointer
        }
        Ok(Err(XyqError::Core(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            XyqStatus::Panic
        }
    }
}

enum XyqError {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for XyqError {
    fn from(e: Error) -> Self {
        XyqError::Core(e)
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, XyqError> {
    p.as_mut().ok_or(XyqError::Null(what))
}

unsafe fn in_ref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, XyqError> {
    p.as_ref().ok_or(XyqError::Null(what))
}

fn beta_from(field: &'static str, v: f64) -> Result<Beta, Error> {
    Beta::new(v).map_err(|e| match e {
        Error::InvalidParameter { reason, .. } => Error::InvalidParameter { field, reason },
        other => other,
    })
}

fn beta_to(b: Beta) -> f64 {
    b.as_f64()
}

impl From<Correlators> for XyqCorrelators {
    fn from(c: Correlators) -> Self {
        XyqCorrelators {
            m_z: c.m_z,
            t_xx: c.t_xx,
            t_yy: c.t_yy,
            t_zz: c.t_zz,
            t_xy: c.t_xy,
        }
    }
}

impl From<XyqCorrelators> for Correlators {
    fn from(c: XyqCorrelators) -> Self {
        Correlators {
            m_z: c.m_z,
            t_xx: c.t_xx,
            t_yy: c.t_yy,
            t_zz: c.t_zz,
            t_xy: c.t_xy,
        }
    }
}

fn observables(c: Correlators, gamma: f64, h: f64) -> Result<XyqObservables, Error> {
    Ok(XyqObservables {
        correlators: c.into(),
        log_negativity: correlators_log_negativity(&c)?,
        energy: c.energy(gamma, h),
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn xyq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message describing the last failure on this thread, or NULL if none.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn xyq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Creates a quench handle with default tolerances.
#[no_mangle]
pub unsafe extern "C" fn xyq_model_new(
    gamma: f64,
    field_a: f64,
    field_b: f64,
    alpha: f64,
    out: *mut *mut XyqModel,
) -> XyqStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let params = ModelParams::new(gamma, field_a, field_b, beta_from("alpha", alpha)?)?;
        *out = Box::into_raw(Box::new(XyqModel {
            params,
            spec: QuadratureSpec::default(),
            solver_tol: xyquench::thermo::DEFAULT_SOLVER_TOL,
        }));
        Ok(())
    })
}

/// Releases a handle from [`xyq_model_new`]. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn xyq_model_free(model: *mut XyqModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Overrides the quadrature tolerances and subdivision budget.
#[no_mangle]
pub unsafe extern "C" fn xyq_model_set_tolerances(
    model: *mut XyqModel,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> XyqStatus {
    guard(|| {
        let model = out_ref(model, "model")?;
        let spec = QuadratureSpec {
            abs_tol,
            rel_tol,
            max_subdivisions,
            freq_hint: 0.0,
        };
        spec.validate()?;
        model.spec = spec;
        Ok(())
    })
}

/// Overrides the energy residual tolerance of [`xyq_match_beta`].
#[no_mangle]
pub unsafe extern "C" fn xyq_model_set_solver_tolerance(model: *mut XyqModel, solver_tol: f64) -> XyqStatus {
    guard(|| {
        let model = out_ref(model, "model")?;
        xyquench::thermo::check_solver_tol(solver_tol)?;
        model.solver_tol = solver_tol;
        Ok(())
    })
}

/// Thermal-state observables at inverse temperature `beta` and field `h`.
#[no_mangle]
pub unsafe extern "C" fn xyq_equilibrium(gamma: f64, beta: f64, h: f64, out: *mut XyqObservables) -> XyqStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let c = eq_correlators(beta_from("beta", beta)?, h, gamma, &QuadratureSpec::default())?;
        *out = observables(c, gamma, h)?;
        Ok(())
    })
}

/// Observables of the evolved state at time `t >= 0`.
#[no_mangle]
pub unsafe extern "C" fn xyq_quench_observables(model: *const XyqModel, t: f64, out: *mut XyqObservables) -> XyqStatus {
    guard(|| {
        let model = in_ref(model, "model")?;
        let out = out_ref(out, "out")?;
        let p = &model.params;
        let c = quench_correlators(p, t, &model.spec)?;
        *out = observables(c, p.gamma, p.field_at(t))?;
        Ok(())
    })
}

/// Inverse temperature whose equilibrium energy at the final field equals
/// the conserved post-quench energy.
#[no_mangle]
pub unsafe extern "C" fn xyq_match_beta(model: *const XyqModel, out: *mut XyqBetaMatch) -> XyqStatus {
    guard(|| {
        let model = in_ref(model, "model")?;
        let out = out_ref(out, "out")?;
        let m = match_beta(&model.params, &model.spec, model.solver_tol)?;
        *out = XyqBetaMatch {
            beta: beta_to(m.beta),
            quench_energy: m.quench_energy,
            eq_energy_at_beta: m.eq_energy_at_beta,
            residual: m.residual,
            iterations: m.iterations,
        };
        Ok(())
    })
}

/// Logarithmic negativity of the two-site state built from `correlators`.
#[no_mangle]
pub unsafe extern "C" fn xyq_log_negativity(correlators: *const XyqCorrelators, out: *mut f64) -> XyqStatus {
    guard(|| {
        let c = *in_ref(correlators, "correlators")?;
        let out = out_ref(out, "out")?;
        *out = correlators_log_negativity(&c.into())?;
        Ok(())
    })
}

/// Time series over the inclusive grid `start, start + step, ..., stop`.
#[no_mangle]
pub unsafe extern "C" fn xyq_time_series(
    model: *const XyqModel,
    start: f64,
    stop: f64,
    step: f64,
    out: *mut *mut XyqScan,
) -> XyqStatus {
    guard(|| {
        let model = in_ref(model, "model")?;
        let out = out_ref(out, "out")?;
        let grid = xyquench::scan::uniform_grid(start, stop, step)?;
        let inner = time_series(&model.params, &grid, &model.spec)?;
        *out = Box::into_raw(Box::new(XyqScan { inner }));
        Ok(())
    })
}

/// Number of rows in a scan; 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn xyq_scan_len(scan: *const XyqScan) -> usize {
    scan.as_ref().map_or(0, |s| s.inner.rows.len())
}

/// Copies row `index` of a scan.
#[no_mangle]
pub unsafe extern "C" fn xyq_scan_row(scan: *const XyqScan, index: usize, out: *mut XyqScanRow) -> XyqStatus {
    guard(|| {
        let scan = in_ref(scan, "scan")?;
        let out = out_ref(out, "out")?;
        let row = scan.inner.rows.get(index).ok_or_else(|| Error::InvalidParameter {
            field: "index",
            reason: format!("{index} out of range for {} rows", scan.inner.rows.len()),
        })?;
        let nan = f64::NAN;
        let obs = match row.correlators {
            Some(c) => XyqObservables {
                correlators: c.into(),
                log_negativity: row.e_n.unwrap_or(nan),
                energy: row.energy.unwrap_or(nan),
            },
            None => XyqObservables {
                correlators: XyqCorrelators {
                    m_z: nan,
                    t_xx: nan,
                    t_yy: nan,
                    t_zz: nan,
                    t_xy: nan,
                },
                log_negativity: nan,
                energy: nan,
            },
        };
        *out = XyqScanRow {
            axis_value: row.axis_value,
            observables: obs,
            m_z_equilibrium: row.m_z_equilibrium.unwrap_or(nan),
            log_negativity_equilibrium: row.e_n_equilibrium.unwrap_or(nan),
            status: match row.status {
                RowStatus::Ok => XyqRowStatus::Ok,
                RowStatus::NonConverged => XyqRowStatus::NonConverged,
                RowStatus::NonPhysical => XyqRowStatus::NonPhysical,
            },
        };
        Ok(())
    })
}

/// Releases a scan. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn xyq_scan_free(scan: *mut XyqScan) {
    if !scan.is_null() {
        drop(Box::from_raw(scan));
    }
}
