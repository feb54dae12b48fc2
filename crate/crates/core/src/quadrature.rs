//! Globally adaptive Gauss-Kronrod (10/21) quadrature for complex-valued
//! integrands on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num::complex::Complex64;

use crate::error::{Error, Result};

pub const PANEL_BUDGET: usize = 10_000;

// QUADPACK digits, kept as published.
#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208846345880,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], ..., XGK[9]`.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: Complex64,
    pub error: f64,
    /// Integral of |f|, for the round-off floor.
    pub abs_value: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 21-point Kronrod panel with the QUADPACK error estimate, applied to
/// the real and imaginary parts separately.
pub fn gk21(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [Complex64::new(0.0, 0.0); 21];
    fv[10] = f(center);
    for k in 0..10 {
        let dx = half * XGK[k];
        fv[k] = f(center - dx);
        fv[20 - k] = f(center + dx);
    }
    let mut resk = fv[10] * WGK[10];
    let mut resg = Complex64::new(0.0, 0.0);
    for k in 0..10 {
        resk += (fv[k] + fv[20 - k]) * WGK[k];
        if k % 2 == 1 {
            resg += (fv[k] + fv[20 - k]) * WG[k / 2];
        }
    }

    let part = |sel: fn(Complex64) -> f64| {
        let k = sel(resk);
        let g = sel(resg);
        let mean = 0.5 * k;
        let mut resabs = WGK[10] * sel(fv[10]).abs();
        let mut resasc = WGK[10] * (sel(fv[10]) - mean).abs();
        for j in 0..10 {
            let (l, r) = (sel(fv[j]), sel(fv[20 - j]));
            resabs += WGK[j] * (l.abs() + r.abs());
            resasc += WGK[j] * ((l - mean).abs() + (r - mean).abs());
        }
        let resabs = resabs * half.abs();
        let resasc = resasc * half.abs();
        let mut err = ((k - g) * half).abs();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * resabs);
        }
        (err, resabs)
    };
    let (err_re, abs_re) = part(|z| z.re);
    let (err_im, abs_im) = part(|z| z.im);
    Panel { a, b, value: resk * half, error: err_re + err_im, abs_value: abs_re + abs_im }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub panels: usize,
}

/// Bisects the worst panel until the summed error estimate drops below
/// `max(abs_tol, rel_tol * |value|)`, the round-off floor, or the panel
/// budget is spent. Never fails; callers judge the returned error.
pub fn adaptive(f: &dyn Fn(f64) -> Complex64, intervals: &[(f64, f64)], rel_tol: f64, abs_tol: f64) -> QuadResult {
    let mut heap: BinaryHeap<Panel> = intervals.iter().map(|&(a, b)| gk21(f, a, b)).collect();
    let mut finished: Vec<Panel> = Vec::new();
    let mut count = heap.len();
    let totals = |heap: &BinaryHeap<Panel>, done: &[Panel]| {
        heap.iter()
            .chain(done)
            .fold((Complex64::new(0.0, 0.0), 0.0, 0.0), |(v, e, a), p| (v + p.value, e + p.error, a + p.abs_value))
    };
    let (mut value, mut error, mut abs_value) = totals(&heap, &finished);
    while count < PANEL_BUDGET {
        let target = abs_tol.max(rel_tol * value.norm());
        if error <= target || error <= 50.0 * f64::EPSILON * abs_value {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            finished.push(worst);
            continue;
        }
        let left = gk21(f, worst.a, mid);
        let right = gk21(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        abs_value += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
        count += 1;
    }
    // Re-sum to shed drift from the incremental updates.
    let (value, error, _) = totals(&heap, &finished);
    QuadResult { value, error, panels: count }
}

/// `int_a^b f` with estimated absolute error at most `tol * (1 + |result|)`.
pub fn integrate(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    let r = adaptive(f, &[(a, b)], tol, 0.0);
    if !r.value.is_finite() || r.error > tol * (1.0 + r.value.norm()) {
        return Err(Error::ToleranceNotMet { achieved: r.error, requested: tol });
    }
    Ok(r)
}
