//! Closed-form thermodynamic-limit observables of the infinite XY chain in a
//! transverse field after a sudden change of the field: magnetization,
//! nearest-neighbor correlators, two-site logarithmic negativity, and the
//! energy-matched equilibrium temperature.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod entanglement;
pub mod equilibrium;
pub mod error;
pub mod model;
pub mod output;
pub mod quadrature;
pub mod quench;
pub mod scan;
pub mod thermo;

pub use entanglement::{assemble, log_negativity, partial_transpose, trace_norm, TwoSiteState};
pub use equilibrium::{eq_correlators, eq_g, eq_magnetization, Correlators, Offset};
pub use error::{Error, Result};
pub use model::{dispersion, thermal_weight, Beta, ModelParams, QuadratureSpec};
pub use quadrature::{integrate, integrate_oscillatory, IntegrationResult};
pub use quench::{
    post_quench_energy, quench_correlators, quench_energy, quench_g, quench_magnetization, quench_s, quench_snapshot,
    stationary_correlators, QuenchSnapshot,
};
pub use scan::{long_time_average, temperature_sweep, time_series, LongTimeAverage, ScanResult, ScanRow};
pub use thermo::{eq_energy, match_beta, BetaMatch};
