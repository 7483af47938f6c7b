//! Globally adaptive Gauss–Kronrod (10/21) quadrature on `[0, π]`.
//!
//! The interval is first cut into equal panels whose count grows linearly with
//! the oscillation hint, then the panel with the largest error estimate is
//! bisected until the summed estimate meets the tolerance or the subdivision
//! budget is spent.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::model::QuadratureSpec;

/// Panels used for a non-oscillatory integrand.
pub const BASE_PANELS: usize = 4;

/// Smallest panel half-width that is still bisected.
const MIN_HALF_WIDTH: f64 = 16.0 * f64::EPSILON;

// Kronrod abscissae; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208745222866,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// Outcome of one integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Largest error first; ties broken by position so the order is total and
    // the refinement sequence deterministic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    Panel { lo, hi, value, error }
}

/// Integrates `f` over `[lo, hi]`, starting from `initial_panels` equal panels.
pub fn integrate_interval<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    initial_panels: usize,
    spec: &QuadratureSpec,
) -> IntegrationResult {
    let budget = spec.max_subdivisions.max(1);
    let n0 = initial_panels.clamp(1, budget);
    let width = (hi - lo) / n0 as f64;
    let mut heap = BinaryHeap::with_capacity(budget + 1);
    for i in 0..n0 {
        let a = lo + width * i as f64;
        let b = if i + 1 == n0 { hi } else { lo + width * (i + 1) as f64 };
        heap.push(kronrod21(&f, a, b));
    }
    let mut frozen: Vec<Panel> = Vec::new();
    let mut evaluations = 21 * n0;
    let mut panels = n0;

    let totals = |heap: &BinaryHeap<Panel>, frozen: &[Panel]| {
        heap.iter()
            .chain(frozen.iter())
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };

    let (mut value, mut error) = totals(&heap, &frozen);
    while error > spec.abs_tol.max(spec.rel_tol * value.abs()) && panels < budget {
        let Some(worst) = heap.pop() else { break };
        if 0.5 * (worst.hi - worst.lo) < MIN_HALF_WIDTH * (1.0 + worst.lo.abs()) {
            frozen.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = kronrod21(&f, worst.lo, mid);
        let right = kronrod21(&f, mid, worst.hi);
        evaluations += 42;
        panels += 1;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Periodic resummation keeps the running totals free of drift.
        if panels.is_multiple_of(64) {
            (value, error) = totals(&heap, &frozen);
        }
    }
    (value, error) = totals(&heap, &frozen);
    let converged = value.is_finite() && error <= spec.abs_tol.max(spec.rel_tol * value.abs());
    IntegrationResult {
        value,
        error_estimate: error,
        evaluations,
        converged,
    }
}

/// Initial panel count for an integrand sweeping a total phase `max_freq`.
///
/// Each panel then spans less than half an oscillation period.
pub fn initial_panels(max_freq: f64) -> usize {
    if max_freq.is_finite() && max_freq > 0.0 {
        BASE_PANELS + max_freq.ceil() as usize
    } else {
        BASE_PANELS
    }
}

/// `∫₀^π f(φ) dφ`; `spec.freq_hint` sizes the initial panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, spec: &QuadratureSpec) -> IntegrationResult {
    integrate_interval(f, 0.0, PI, initial_panels(spec.freq_hint), spec)
}

/// `∫₀^π f(φ) dφ` for an integrand carrying `cos(2Λt)` or `sin(2Λt)`.
///
/// `max_freq = 2·t·sup_φ Λ` is the caller's bound on the swept phase. At
/// `t = 0` this is exactly [`integrate`] with no hint.
pub fn integrate_oscillatory<F: Fn(f64) -> f64>(
    f: F,
    spec: &QuadratureSpec,
    time: f64,
    max_freq: f64,
) -> IntegrationResult {
    let hint = if time == 0.0 { 0.0 } else { max_freq.max(spec.freq_hint) };
    integrate(f, &spec.with_freq_hint(hint))
}
