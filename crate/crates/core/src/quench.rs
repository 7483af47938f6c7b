//! Observables of the state evolved from the equilibrium state at `(α, a)`
//! under the post-quench field `b`.
//!
//! Every integrand shares the factor `tanh(αΛ(a)/2) / (Λ(a) Λ(b)²)`; the
//! time dependence enters only through `cos(2Λ(b)t)` and `sin(2Λ(b)t)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::equilibrium::{checked, Correlators, Offset};
use crate::error::{Error, Result};
use crate::model::{lambda_sc, weight_over_lambda, ModelParams, QuadratureSpec};
use crate::quadrature::{integrate, integrate_oscillatory};

/// Evolved-state correlators at one time together with the conserved energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchSnapshot {
    pub time: f64,
    pub correlators: Correlators,
    /// Per-site energy under the post-quench Hamiltonian.
    pub energy: f64,
}

/// Pieces of the integrands that do not depend on time.
struct Kernel {
    s: f64,
    c: f64,
    lambda_b: f64,
    /// `tanh(αΛ(a)/2) / (Λ(a) Λ(b)²)`
    prefactor: f64,
}

fn kernel(p: &ModelParams, phi: f64) -> Kernel {
    let (s, c) = phi.sin_cos();
    let lambda_a = lambda_sc(p.field_a, p.gamma, s, c);
    let lambda_b = lambda_sc(p.field_b, p.gamma, s, c);
    Kernel {
        s,
        c,
        lambda_b,
        prefactor: weight_over_lambda(p.alpha, lambda_a) / (lambda_b * lambda_b),
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter {
            field: "t",
            reason: format!("time must be finite and >= 0, got {t}"),
        });
    }
    Ok(())
}

fn max_freq(p: &ModelParams, t: f64) -> f64 {
    2.0 * t * p.max_post_quench_dispersion()
}

/// How the oscillating factors are treated.
#[derive(Clone, Copy)]
enum Clock {
    At(f64),
    /// Long-time limit: oscillating terms dephase to zero.
    Dephased,
}

impl Clock {
    fn cos(self, lambda_b: f64) -> f64 {
        match self {
            Clock::At(t) => (2.0 * lambda_b * t).cos(),
            Clock::Dephased => 0.0,
        }
    }

    fn sin(self, lambda_b: f64) -> f64 {
        match self {
            Clock::At(t) => (2.0 * lambda_b * t).sin(),
            Clock::Dephased => 0.0,
        }
    }

    fn run<F: Fn(f64) -> f64>(self, f: F, p: &ModelParams, spec: &QuadratureSpec) -> crate::quadrature::IntegrationResult {
        match self {
            Clock::At(t) => integrate_oscillatory(f, spec, t, max_freq(p, t)),
            Clock::Dephased => integrate(f, spec),
        }
    }
}

fn magnetization_at(p: &ModelParams, clock: Clock, spec: &QuadratureSpec) -> Result<f64> {
    let (a, b, g2) = (p.field_a, p.field_b, p.gamma * p.gamma);
    let r = clock.run(
        |phi| {
            let k = kernel(p, phi);
            let s2 = k.s * k.s;
            let osc = clock.cos(k.lambda_b) * g2 * (a - b) * s2;
            let stat = (k.c - b) * ((k.c - a) * (k.c - b) + g2 * s2);
            k.prefactor * (osc - stat)
        },
        p,
        spec,
    );
    Ok(checked(r, "evolved magnetization")? / (2.0 * PI))
}

fn g_at(offset: Offset, p: &ModelParams, clock: Clock, spec: &QuadratureSpec) -> Result<f64> {
    let (a, b, gamma) = (p.field_a, p.field_b, p.gamma);
    let g2 = gamma * gamma;
    let r_sign = offset.sign();
    let r = clock.run(
        |phi| {
            let k = kernel(p, phi);
            let s2 = k.s * k.s;
            let cos_t = clock.cos(k.lambda_b);
            let base = g2 * s2 + (k.c - a) * (k.c - b);
            // sin(Rφ) sin φ = R sin²φ and cos(Rφ) = cos φ for R = ±1
            let odd = gamma * r_sign * s2 * (base + (a - b) * (k.c - b) * cos_t);
            let even = k.c * (base * (k.c - b) - (a - b) * g2 * s2 * cos_t);
            k.prefactor * (odd - even)
        },
        p,
        spec,
    );
    Ok(checked(r, "evolved G")? / PI)
}

fn s_amplitude_at(offset: Offset, p: &ModelParams, clock: Clock, spec: &QuadratureSpec) -> Result<f64> {
    let (a, b, gamma) = (p.field_a, p.field_b, p.gamma);
    let at_switch = matches!(clock, Clock::At(t) if t == 0.0);
    if a == b || at_switch || matches!(clock, Clock::Dephased) {
        return Ok(0.0);
    }
    let r_sign = offset.sign();
    let r = clock.run(
        |phi| {
            let k = kernel(p, phi);
            // prefactor · Λ(b) = tanh(αΛ(a)/2) / (Λ(a) Λ(b))
            r_sign * k.s * k.s * clock.sin(k.lambda_b) * k.prefactor * k.lambda_b
        },
        p,
        spec,
    );
    Ok(checked(r, "evolved S")? * gamma * (a - b) / PI)
}

fn correlators_at(p: &ModelParams, clock: Clock, spec: &QuadratureSpec) -> Result<Correlators> {
    let m_z = magnetization_at(p, clock, spec)?;
    let g_plus = g_at(Offset::Plus, p, clock, spec)?;
    let g_minus = g_at(Offset::Minus, p, clock, spec)?;
    let s_plus = s_amplitude_at(Offset::Plus, p, clock, spec)?;
    let s_minus = s_amplitude_at(Offset::Minus, p, clock, spec)?;
    Ok(Correlators {
        m_z,
        t_xx: -g_minus,
        t_yy: -g_plus,
        // S(1)S(−1) = (i·s₊)(i·s₋) = −s₊s₋
        t_zz: 4.0 * m_z * m_z - g_plus * g_minus - s_plus * s_minus,
        t_xy: s_plus,
    })
}

/// Evolved magnetization `M_z(t)`.
pub fn quench_magnetization(params: &ModelParams, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    params.validate()?;
    check_time(t)?;
    magnetization_at(params, Clock::At(t), spec)
}

/// Evolved nearest-neighbor function `G(R, t)`.
pub fn quench_g(offset: Offset, params: &ModelParams, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    params.validate()?;
    check_time(t)?;
    g_at(offset, params, Clock::At(t), spec)
}

/// Real amplitude `S(R, t)/i`; `T_xy = quench_s(+1)`.
///
/// Carries the initial-state weight `tanh(αΛ(a)/2)` like every other evolved
/// observable, so an infinite-temperature initial state stays uncorrelated.
pub fn quench_s(offset: Offset, params: &ModelParams, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    params.validate()?;
    check_time(t)?;
    s_amplitude_at(offset, params, Clock::At(t), spec)
}

/// Evolved correlator snapshot at time `t`.
pub fn quench_correlators(params: &ModelParams, t: f64, spec: &QuadratureSpec) -> Result<Correlators> {
    params.validate()?;
    check_time(t)?;
    correlators_at(params, Clock::At(t), spec)
}

/// Per-site energy `tr(H(t) ρ(t))/N` of the evolved state.
///
/// For `t > 0` the Hamiltonian is `H(b)` and the value is conserved; at
/// `t = 0` the field is still `a`.
pub fn quench_energy(params: &ModelParams, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(quench_correlators(params, t, spec)?.energy(params.gamma, params.field_at(t)))
}

/// The conserved post-quench energy: the initial state measured with `H(b)`.
pub fn post_quench_energy(params: &ModelParams, spec: &QuadratureSpec) -> Result<f64> {
    Ok(quench_correlators(params, 0.0, spec)?.energy(params.gamma, params.field_b))
}

/// Correlators, energy and time in one record.
pub fn quench_snapshot(params: &ModelParams, t: f64, spec: &QuadratureSpec) -> Result<QuenchSnapshot> {
    let correlators = quench_correlators(params, t, spec)?;
    Ok(QuenchSnapshot {
        time: t,
        correlators,
        energy: correlators.energy(params.gamma, params.field_at(t)),
    })
}

/// `t → ∞` limit of the evolved correlators: the oscillating terms average
/// to zero and `T_xy` vanishes.
pub fn stationary_correlators(params: &ModelParams, spec: &QuadratureSpec) -> Result<Correlators> {
    params.validate()?;
    correlators_at(params, Clock::Dephased, spec)
}
