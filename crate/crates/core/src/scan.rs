//! Parameter sweeps: time series after the quench, sweeps over the initial
//! temperature at a fixed time, and long-time averages.
//!
//! Rows are evaluated in parallel on the current rayon pool and assembled in
//! grid order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::correlators_log_negativity;
use crate::equilibrium::{eq_correlators, Correlators};
use crate::error::{Error, Result};
use crate::model::{check_finite, check_gamma, Beta, ModelParams, QuadratureSpec};
use crate::quench::{quench_correlators, stationary_correlators};
use crate::thermo::{match_beta, BetaMatch, DEFAULT_SOLVER_TOL};

/// Default time grid of the time-series preset.
pub const DEFAULT_TIME_GRID: (f64, f64, f64) = (0.0, 10.0, 0.02);
/// Default inverse-temperature grid of the temperature-sweep preset.
pub const DEFAULT_BETA_GRID: (f64, f64, f64) = (0.05, 2.0, 0.05);
/// Default averaging window `[t_min, t_max]` and step.
pub const DEFAULT_AVERAGING: (f64, f64, f64) = (20.0, 100.0, 0.1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Time,
    Beta,
}

impl Axis {
    pub fn column(self) -> &'static str {
        match self {
            Axis::Time => "t",
            Axis::Beta => "beta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    NonConverged,
    NonPhysical,
}

/// One grid point; failed rows keep their axis value and carry no observables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub axis_value: f64,
    pub correlators: Option<Correlators>,
    pub energy: Option<f64>,
    pub e_n: Option<f64>,
    pub m_z_equilibrium: Option<f64>,
    pub e_n_equilibrium: Option<f64>,
    pub status: RowStatus,
}

impl ScanRow {
    fn failed(axis_value: f64, err: &Error) -> Self {
        let status = match err {
            Error::NonPhysical { .. } => RowStatus::NonPhysical,
            _ => RowStatus::NonConverged,
        };
        log::warn!("row at {axis_value}: {err}");
        ScanRow {
            axis_value,
            correlators: None,
            energy: None,
            e_n: None,
            m_z_equilibrium: None,
            e_n_equilibrium: None,
            status,
        }
    }
}

/// Provenance recorded with every scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanMetadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub axis: Axis,
    pub gamma: f64,
    pub field_a: f64,
    pub field_b: f64,
    /// Initial inverse temperature; absent for sweeps over it.
    pub alpha: Option<Beta>,
    pub fixed_time: Option<f64>,
    pub quadrature: QuadratureSpec,
    /// Energy-matched β of the comparison equilibrium state, full precision.
    pub matched_beta: Option<Beta>,
    pub averaging_window: Option<[f64; 3]>,
}

impl ScanMetadata {
    fn new(command: &str, axis: Axis, gamma: f64, field_a: f64, field_b: f64, spec: &QuadratureSpec) -> Self {
        ScanMetadata {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            axis,
            gamma,
            field_a,
            field_b,
            alpha: None,
            fixed_time: None,
            quadrature: *spec,
            matched_beta: None,
            averaging_window: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub metadata: ScanMetadata,
    pub rows: Vec<ScanRow>,
}

impl ScanResult {
    pub fn axis(&self) -> Axis {
        self.metadata.axis
    }

    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.status != RowStatus::Ok).count()
    }
}

/// `start, start + step, …` up to and including `stop` (within round-off).
pub fn uniform_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    check_finite("grid start", start)?;
    check_finite("grid stop", stop)?;
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidParameter {
            field: "step",
            reason: format!("grid step must be > 0, got {step}"),
        });
    }
    if stop < start {
        return Err(Error::InvalidParameter {
            field: "grid stop",
            reason: format!("stop {stop} precedes start {start}"),
        });
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + step * i as f64).collect())
}

fn check_increasing(grid: &[f64], field: &'static str, min_exclusive: Option<f64>) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter {
            field,
            reason: "grid is empty".into(),
        });
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter {
            field,
            reason: "grid must be strictly increasing".into(),
        });
    }
    for &v in grid {
        check_finite(field, v)?;
    }
    match min_exclusive {
        Some(lo) if grid[0] <= lo => Err(Error::InvalidParameter {
            field,
            reason: format!("grid values must be > {lo}"),
        }),
        None if grid[0] < 0.0 => Err(Error::InvalidParameter {
            field,
            reason: "grid values must be >= 0".into(),
        }),
        _ => Ok(()),
    }
}

/// Equilibrium reference values `(m_z, E_N)`.
fn reference(beta: Beta, h: f64, gamma: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let c = eq_correlators(beta, h, gamma, spec)?;
    Ok((c.m_z, correlators_log_negativity(&c)?))
}

fn evolved_row(params: &ModelParams, t: f64, spec: &QuadratureSpec) -> Result<(Correlators, f64, f64)> {
    let c = quench_correlators(params, t, spec)?;
    let e_n = correlators_log_negativity(&c)?;
    let field = if t > 0.0 { params.field_b } else { params.field_a };
    Ok((c, c.energy(params.gamma, field), e_n))
}

/// Evolved observables on `t_grid`, alongside the equilibrium state that
/// shares the energy: `(α, a)` at `t = 0`, `(β_matched, b)` for `t > 0`.
///
/// The energy column is measured with the field in force at `t`, so it is
/// constant over `t > 0`.
pub fn time_series(params: &ModelParams, t_grid: &[f64], spec: &QuadratureSpec) -> Result<ScanResult> {
    params.validate()?;
    spec.validate()?;
    check_increasing(t_grid, "t_grid", None)?;

    let mut metadata = ScanMetadata::new("time_series", Axis::Time, params.gamma, params.field_a, params.field_b, spec);
    metadata.alpha = Some(params.alpha);

    let matched: Option<BetaMatch> = match match_beta(params, spec, DEFAULT_SOLVER_TOL) {
        Ok(m) => Some(m),
        Err(e) => {
            log::warn!("energy matching failed, equilibrium columns left empty: {e}");
            None
        }
    };
    metadata.matched_beta = matched.map(|m| m.beta);

    let initial_ref = reference(params.alpha, params.field_a, params.gamma, spec).ok();
    let post_ref = matched.and_then(|m| reference(m.beta, params.field_b, params.gamma, spec).ok());

    let rows = t_grid
        .par_iter()
        .map(|&t| {
            let eq = if t > 0.0 { post_ref } else { initial_ref };
            match evolved_row(params, t, spec) {
                Ok((c, energy, e_n)) => ScanRow {
                    axis_value: t,
                    correlators: Some(c),
                    energy: Some(energy),
                    e_n: Some(e_n),
                    m_z_equilibrium: eq.map(|r| r.0),
                    e_n_equilibrium: eq.map(|r| r.1),
                    status: RowStatus::Ok,
                },
                Err(e) => ScanRow::failed(t, &e),
            }
        })
        .collect();

    Ok(ScanResult {
        metadata,
        rows,
    })
}

/// Evolved observables at `t_fixed` as the initial inverse temperature α
/// runs over `beta_grid`.
pub fn temperature_sweep(
    gamma: f64,
    field_a: f64,
    field_b: f64,
    t_fixed: f64,
    beta_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<ScanResult> {
    check_gamma(gamma)?;
    check_finite("field_a", field_a)?;
    check_finite("field_b", field_b)?;
    spec.validate()?;
    if !(t_fixed >= 0.0) || !t_fixed.is_finite() {
        return Err(Error::InvalidParameter {
            field: "t",
            reason: format!("time must be finite and >= 0, got {t_fixed}"),
        });
    }
    check_increasing(beta_grid, "beta_grid", Some(0.0))?;

    let mut metadata = ScanMetadata::new("temperature_sweep", Axis::Beta, gamma, field_a, field_b, spec);
    metadata.fixed_time = Some(t_fixed);

    let rows = beta_grid
        .par_iter()
        .map(|&alpha| {
            let row = ModelParams::new(gamma, field_a, field_b, Beta::Finite(alpha))
                .and_then(|p| evolved_row(&p, t_fixed, spec));
            match row {
                Ok((c, energy, e_n)) => ScanRow {
                    axis_value: alpha,
                    correlators: Some(c),
                    energy: Some(energy),
                    e_n: Some(e_n),
                    m_z_equilibrium: None,
                    e_n_equilibrium: None,
                    status: RowStatus::Ok,
                },
                Err(e) => ScanRow::failed(alpha, &e),
            }
        })
        .collect();

    Ok(ScanResult {
        metadata,
        rows,
    })
}

/// Uniform time averages over a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongTimeAverage {
    pub mean_m_z: f64,
    pub mean_e_n: f64,
    pub samples: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub step: f64,
}

/// Means of `M_z(t)` and `E_N(t)` over `t_min, t_min + step, …, t_max`.
pub fn long_time_average(
    params: &ModelParams,
    window: (f64, f64),
    step: f64,
    spec: &QuadratureSpec,
) -> Result<LongTimeAverage> {
    params.validate()?;
    spec.validate()?;
    let (t_min, t_max) = window;
    if !(t_min < t_max) || t_min < 0.0 {
        return Err(Error::InvalidParameter {
            field: "window",
            reason: format!("need 0 <= t_min < t_max, got [{t_min}, {t_max}]"),
        });
    }
    let grid = uniform_grid(t_min, t_max, step)?;
    let samples: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&t| {
            let c = quench_correlators(params, t, spec)?;
            Ok((c.m_z, correlators_log_negativity(&c)?))
        })
        .collect::<Result<_>>()?;
    let n = samples.len() as f64;
    let (sum_m, sum_e) = samples.iter().fold((0.0, 0.0), |(m, e), s| (m + s.0, e + s.1));
    Ok(LongTimeAverage {
        mean_m_z: sum_m / n,
        mean_e_n: sum_e / n,
        samples: samples.len(),
        t_min,
        t_max,
        step,
    })
}

/// Windowed means next to the dephased asymptote and the energy-matched
/// equilibrium values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErgodicityReport {
    pub average: LongTimeAverage,
    pub stationary_m_z: f64,
    pub stationary_e_n: f64,
    pub matched: BetaMatch,
    pub m_z_equilibrium: f64,
    pub e_n_equilibrium: f64,
}

pub fn ergodicity_report(
    params: &ModelParams,
    window: (f64, f64),
    step: f64,
    spec: &QuadratureSpec,
) -> Result<ErgodicityReport> {
    let average = long_time_average(params, window, step, spec)?;
    let stationary = stationary_correlators(params, spec)?;
    let matched = match_beta(params, spec, DEFAULT_SOLVER_TOL)?;
    let (m_z_equilibrium, e_n_equilibrium) = reference(matched.beta, params.field_b, params.gamma, spec)?;
    Ok(ErgodicityReport {
        average,
        stationary_m_z: stationary.m_z,
        stationary_e_n: correlators_log_negativity(&stationary)?,
        matched,
        m_z_equilibrium,
        e_n_equilibrium,
    })
}
