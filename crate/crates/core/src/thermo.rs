//! Energy matching: the inverse temperature of the thermal state at the
//! post-quench field whose energy equals that of the evolved state.

use serde::{Deserialize, Serialize};

use crate::equilibrium::eq_correlators;
use crate::error::{Error, Result};
use crate::model::{Beta, ModelParams, QuadratureSpec};
use crate::quench::{post_quench_energy, quench_energy};

/// Default residual tolerance on the per-site energy.
pub const DEFAULT_SOLVER_TOL: f64 = 1e-8;

/// Initial search bracket for β.
pub const BETA_BRACKET: (f64, f64) = (1e-6, 1e3);

const MAX_ITERATIONS: usize = 200;

/// Result of [`match_beta`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaMatch {
    pub beta: Beta,
    pub quench_energy: f64,
    pub eq_energy_at_beta: f64,
    /// `eq_energy_at_beta − quench_energy`
    pub residual: f64,
    /// Final bracket `[β_lo, β_hi]`; both ends equal `+∞` for a ground-state match.
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Per-site energy of the thermal state at field `h`; decreases from 0 at
/// β → 0 to the ground-state energy.
pub fn eq_energy(beta: Beta, h: f64, gamma: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(eq_correlators(beta, h, gamma, spec)?.energy(gamma, h))
}

/// Solves `eq_energy(β, b, γ) = quench_energy(params)` for β.
///
/// The target is the conserved post-quench energy (initial state measured
/// with `H(b)`).
pub fn match_beta(params: &ModelParams, spec: &QuadratureSpec, solver_tol: f64) -> Result<BetaMatch> {
    check_solver_tol(solver_tol)?;
    let target = post_quench_energy(params, spec)?;
    match_energy(target, params.field_b, params.gamma, spec, solver_tol)
}

/// As [`match_beta`], evaluating the evolved-state energy at a time `t > 0`.
pub fn match_beta_at(params: &ModelParams, t: f64, spec: &QuadratureSpec, solver_tol: f64) -> Result<BetaMatch> {
    check_solver_tol(solver_tol)?;
    if !(t > 0.0) {
        return Err(Error::InvalidParameter {
            field: "t",
            reason: format!("energy matching needs a post-quench time t > 0, got {t}"),
        });
    }
    let target = quench_energy(params, t, spec)?;
    match_energy(target, params.field_b, params.gamma, spec, solver_tol)
}

/// Rejects non-positive or non-finite solver tolerances.
pub fn check_solver_tol(solver_tol: f64) -> Result<()> {
    if !(solver_tol > 0.0) {
        return Err(Error::InvalidParameter {
            field: "solver_tol",
            reason: format!("must be > 0, got {solver_tol}"),
        });
    }
    Ok(())
}

/// Finds β with `eq_energy(β, h, γ) = target`.
pub fn match_energy(target: f64, h: f64, gamma: f64, spec: &QuadratureSpec, solver_tol: f64) -> Result<BetaMatch> {
    let energy = |beta: f64| eq_energy(Beta::Finite(beta), h, gamma, spec);
    let ground = eq_energy(Beta::Infinite, h, gamma, spec)?;
    let no_bracket = || Error::NoBracket {
        target,
        ground,
        high_temperature: 0.0,
    };

    if target > solver_tol || target < ground - solver_tol {
        return Err(no_bracket());
    }
    let ground_match = |iterations| BetaMatch {
        beta: Beta::Infinite,
        quench_energy: target,
        eq_energy_at_beta: ground,
        residual: ground - target,
        bracket: (f64::INFINITY, f64::INFINITY),
        iterations,
    };
    if (target - ground).abs() <= solver_tol {
        return Ok(ground_match(0));
    }

    // f(β) = E(β) − target is decreasing: f(lo) > 0 > f(hi).
    let (mut lo, mut hi) = BETA_BRACKET;
    let mut f_lo = energy(lo)? - target;
    while f_lo < 0.0 {
        lo *= 1e-3;
        if lo < 1e-300 {
            return Err(no_bracket());
        }
        f_lo = energy(lo)? - target;
    }
    let mut f_hi = energy(hi)? - target;
    while f_hi > 0.0 {
        hi *= 10.0;
        if hi > 1e12 {
            return Ok(ground_match(0));
        }
        f_hi = energy(hi)? - target;
    }

    let mut iterations = 0;
    let finish = |beta: f64, f: f64, lo: f64, hi: f64, iterations| BetaMatch {
        beta: Beta::Finite(beta),
        quench_energy: target,
        eq_energy_at_beta: f + target,
        residual: f,
        bracket: (lo, hi),
        iterations,
    };
    if f_lo.abs() <= solver_tol {
        return Ok(finish(lo, f_lo, lo, hi, iterations));
    }
    if f_hi.abs() <= solver_tol {
        return Ok(finish(hi, f_hi, lo, hi, iterations));
    }

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        // Geometric bisection while the bracket spans decades, then secant
        // steps kept strictly inside the bracket.
        let mut next = if hi / lo > 1.5 {
            (lo * hi).sqrt()
        } else {
            lo - f_lo * (hi - lo) / (f_hi - f_lo)
        };
        let margin = 1e-3 * (hi - lo);
        if !(next > lo + margin && next < hi - margin) {
            next = 0.5 * (lo + hi);
        }
        let f_next = energy(next)? - target;
        if f_next.abs() <= solver_tol {
            return Ok(finish(next, f_next, lo, hi, iterations));
        }
        if f_next > 0.0 {
            lo = next;
            f_lo = f_next;
        } else {
            hi = next;
            f_hi = f_next;
        }
        if (hi - lo) <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    let (beta, f) = if f_lo.abs() < f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    if f.abs() <= solver_tol {
        Ok(finish(beta, f, lo, hi, iterations))
    } else {
        Err(Error::NonConvergence {
            quantity: "energy-matched beta",
            value: beta,
            error_estimate: f.abs(),
        })
    }
}
