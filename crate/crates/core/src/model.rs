//! Model parameters of the anisotropic XY chain in a transverse field and the
//! single-quasiparticle dispersion shared by every integrand.
//!
//! The chain is
//!
//! ```text
//! H(t) = Σ_i [ (1+γ) S^x_i S^x_{i+1} + (1−γ) S^y_i S^y_{i+1} − h(t) S^z_i ]
//! ```
//!
//! with `S = σ/2`, `ħ = k_B = 1`, and a sudden switch `h = a` for `t ≤ 0`,
//! `h = b` for `t > 0`. Every quantity is dimensionless.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Distance from γ = 1 below which persistent revivals are reported.
pub const ISING_WARNING_WIDTH: f64 = 1e-6;
/// Half-width of the window around |b| = 1 that triggers a criticality warning.
pub const CRITICAL_WARNING_WIDTH: f64 = 1e-3;

/// Inverse temperature. The ground state is a distinct value rather than a
/// large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beta {
    Finite(f64),
    Infinite,
}

impl Beta {
    /// Accepts any `β > 0`; `+∞` maps to [`Beta::Infinite`].
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::InvalidParameter {
                field: "beta",
                reason: format!("inverse temperature must be > 0, got {value}"),
            });
        }
        if value.is_infinite() {
            Ok(Beta::Infinite)
        } else {
            Ok(Beta::Finite(value))
        }
    }

    /// `f64` view; `Infinite` becomes `f64::INFINITY`.
    pub fn as_f64(self) -> f64 {
        match self {
            Beta::Finite(b) => b,
            Beta::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Beta::Infinite)
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Finite(b) => write!(f, "{b}"),
            Beta::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Beta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinite" | "infinity" | "∞" | "ground" => Ok(Beta::Infinite),
            other => {
                let v: f64 = other.parse().map_err(|_| Error::InvalidParameter {
                    field: "beta",
                    reason: format!("cannot parse `{s}` as an inverse temperature"),
                })?;
                Beta::new(v)
            }
        }
    }
}

impl Serialize for Beta {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Beta::Finite(b) => serializer.serialize_f64(*b),
            Beta::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Beta {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        let beta = match Repr::deserialize(deserializer)? {
            Repr::Number(v) => Beta::new(v),
            Repr::Text(s) => s.parse(),
        };
        beta.map_err(serde::de::Error::custom)
    }
}

/// Physical parameters of one sudden quench.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Anisotropy γ; the x and y couplings are 1 ± γ.
    pub gamma: f64,
    /// Field before the switch, `a`.
    pub field_a: f64,
    /// Field after the switch, `b`.
    pub field_b: f64,
    /// Inverse temperature α of the initial equilibrium state.
    pub alpha: Beta,
}

impl ModelParams {
    pub fn new(gamma: f64, field_a: f64, field_b: f64, alpha: Beta) -> Result<Self> {
        let params = ModelParams {
            gamma,
            field_a,
            field_b,
            alpha,
        };
        params.validate()?;
        for w in params.warnings() {
            log::warn!("{w}");
        }
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        check_finite("field_a", self.field_a)?;
        check_finite("field_b", self.field_b)?;
        if let Beta::Finite(a) = self.alpha {
            if a.is_nan() || a <= 0.0 {
                return Err(Error::InvalidParameter {
                    field: "alpha",
                    reason: format!("initial inverse temperature must be > 0, got {a}"),
                });
            }
        }
        Ok(())
    }

    /// Non-fatal diagnostics for slow-converging or near-critical regimes.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if (self.gamma.abs() - 1.0).abs() < ISING_WARNING_WIDTH {
            out.push(format!(
                "gamma = {} is at the Ising point: revivals persist for all times and \
                 time averages converge slowly",
                self.gamma
            ));
        }
        if (self.field_b.abs() - 1.0).abs() <= CRITICAL_WARNING_WIDTH {
            out.push(format!(
                "post-quench field b = {} is within {CRITICAL_WARNING_WIDTH} of the critical \
                 field; the gap closes at the interval endpoint",
                self.field_b
            ));
        }
        out
    }

    /// Field in force at time `t`: `a` up to and including the switch, `b` after.
    pub fn field_at(&self, t: f64) -> f64 {
        if t > 0.0 {
            self.field_b
        } else {
            self.field_a
        }
    }

    /// `sup_φ Λ(b, φ)` on `[0, π]`, used to size oscillatory quadrature panels.
    pub fn max_post_quench_dispersion(&self) -> f64 {
        max_dispersion(self.field_b, self.gamma)
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if !gamma.is_finite() || gamma == 0.0 {
        return Err(Error::InvalidParameter {
            field: "gamma",
            reason: format!("anisotropy must be finite and non-zero, got {gamma}"),
        });
    }
    Ok(())
}

pub(crate) fn check_finite(field: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::InvalidParameter {
            field,
            reason: format!("must be finite, got {v}"),
        });
    }
    Ok(())
}

/// Tolerances and budget for the adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Total phase `2·t·sup Λ(b)` swept by the oscillatory factor; sizes the
    /// initial panels.
    pub freq_hint: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 4096,
            freq_hint: 0.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |field, reason: &str| {
            Err(Error::InvalidParameter {
                field,
                reason: reason.to_string(),
            })
        };
        if !(self.abs_tol >= 0.0) || !self.abs_tol.is_finite() {
            return bad("abs_tol", "must be a finite value >= 0");
        }
        if !(self.rel_tol >= 0.0) || !self.rel_tol.is_finite() {
            return bad("rel_tol", "must be a finite value >= 0");
        }
        if self.abs_tol == 0.0 && self.rel_tol == 0.0 {
            return bad("abs_tol", "at least one of abs_tol, rel_tol must be positive");
        }
        if self.max_subdivisions == 0 {
            return bad("max_subdivisions", "must be positive");
        }
        if !(self.freq_hint >= 0.0) || !self.freq_hint.is_finite() {
            return bad("freq_hint", "must be a finite value >= 0");
        }
        Ok(())
    }

    pub fn with_freq_hint(mut self, freq_hint: f64) -> Self {
        self.freq_hint = freq_hint;
        self
    }

    /// Same spec with both tolerances scaled by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.abs_tol *= factor;
        self.rel_tol *= factor;
        self
    }
}

/// Quasiparticle energy `Λ(h, φ) = [γ² sin²φ + (h − cos φ)²]^{1/2}`.
///
/// Rejects `φ` outside `[0, π]`.
pub fn dispersion(h: f64, gamma: f64, phi: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&phi) {
        return Err(Error::Domain(format!("phi = {phi} outside [0, pi]")));
    }
    Ok(lambda(h, gamma, phi))
}

/// Unchecked dispersion for integrand inner loops.
#[inline]
pub(crate) fn lambda(h: f64, gamma: f64, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    lambda_sc(h, gamma, s, c)
}

#[inline]
pub(crate) fn lambda_sc(h: f64, gamma: f64, sin_phi: f64, cos_phi: f64) -> f64 {
    (gamma * sin_phi).hypot(h - cos_phi)
}

/// `sup_φ Λ(h, φ)` over `[0, π]`.
pub fn max_dispersion(h: f64, gamma: f64) -> f64 {
    // Λ² = (1 − γ²) cos²φ − 2h cosφ + γ² + h² is a quadratic in x = cos φ.
    let curvature = 1.0 - gamma * gamma;
    let quad = |x: f64| (curvature * x * x - 2.0 * h * x + gamma * gamma + h * h).max(0.0);
    let mut best = quad(1.0).max(quad(-1.0));
    if curvature < 0.0 {
        let x = h / curvature;
        if (-1.0..=1.0).contains(&x) {
            best = best.max(quad(x));
        }
    }
    best.sqrt()
}

/// `tanh(β Λ / 2)`, the occupation factor of a mode with energy `Λ`.
///
/// In the ground state it is 1 for a gapped mode and 0 at a gap closing.
pub fn thermal_weight(beta: Beta, lambda: f64) -> f64 {
    match beta {
        Beta::Finite(b) => (0.5 * b * lambda).tanh(),
        Beta::Infinite => {
            if lambda > 0.0 {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// `tanh(β Λ / 2) / Λ` with its `Λ → 0` limit `β/2`.
#[inline]
pub(crate) fn weight_over_lambda(beta: Beta, lambda: f64) -> f64 {
    if lambda > 0.0 {
        thermal_weight(beta, lambda) / lambda
    } else {
        match beta {
            Beta::Finite(b) => 0.5 * b,
            Beta::Infinite => f64::INFINITY,
        }
    }
}
