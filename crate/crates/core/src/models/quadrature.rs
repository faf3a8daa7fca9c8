//! Globally adaptive Gauss–Kronrod (7/15) quadrature in one dimension,
//! maps for infinite ranges, and nesting for 2D integrals.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const MAX_PANELS: usize = 20_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Integral together with the accumulated error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = finite_or_zero(f(c));
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = r * XGK[j];
        let s = finite_or_zero(f(c - x)) + finite_or_zero(f(c + x));
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Panel { a, b, value: k * r, error: ((k - g) * r).abs() }
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Estimate {
    // Start from a few panels so narrow features are less likely to be missed.
    let mut heap = BinaryHeap::new();
    let n0 = 8;
    for i in 0..n0 {
        let lo = a + (b - a) * i as f64 / n0 as f64;
        let hi = if i + 1 == n0 { b } else { a + (b - a) * (i + 1) as f64 / n0 as f64 };
        heap.push(kronrod(f, lo, hi));
    }
    let mut value: f64 = heap.iter().map(|p| p.value).sum();
    let mut error: f64 = heap.iter().map(|p| p.error).sum();
    while error > tol && heap.len() < MAX_PANELS {
        let worst = heap.pop().expect("non-empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            heap.push(worst);
            break;
        }
        let l = kronrod(f, worst.a, m);
        let r = kronrod(f, m, worst.b);
        value += l.value + r.value - worst.value;
        error += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        if heap.len() % 64 == 0 {
            // Re-sum to stop drift from the running updates.
            value = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.error).sum();
        }
    }
    Estimate { value, error }
}

/// `∫_a^b f`, with either limit allowed to be infinite, to absolute
/// tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let e = integrate_estimate(&f, a, b, tol);
    if !(e.value.is_finite() && e.error <= tol) {
        return Err(Error::Tolerance { tolerance: tol, estimate: e.error });
    }
    Ok(e.value)
}

/// As [`integrate`] but never fails; the caller inspects the error estimate.
pub fn integrate_estimate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Estimate {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => {
            if a == b {
                Estimate { value: 0.0, error: 0.0 }
            } else if a > b {
                let e = adapt(f, b, a, tol);
                Estimate { value: -e.value, error: e.error }
            } else {
                adapt(f, a, b, tol)
            }
        }
        (true, false) => {
            // x = a + t/(1-t)
            let g = |t: f64| {
                let s = 1.0 - t;
                f(a + t / s) / (s * s)
            };
            adapt(&g, 0.0, 1.0, tol)
        }
        (false, true) => {
            let g = |t: f64| {
                let s = 1.0 - t;
                f(b - t / s) / (s * s)
            };
            adapt(&g, 0.0, 1.0, tol)
        }
        (false, false) => {
            // x = t/(1-t²)
            let g = |t: f64| {
                let s = 1.0 - t * t;
                f(t / s) * (1.0 + t * t) / (s * s)
            };
            adapt(&g, -1.0, 1.0, tol)
        }
    }
}

/// `∫_{x0}^{x1} ∫_{y0(x)}^{y1(x)} f(x, y) dy dx`.
pub fn integrate_2d<F, L, U>(f: F, x0: f64, x1: f64, y0: L, y1: U, tol: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
    L: Fn(f64) -> f64,
    U: Fn(f64) -> f64,
{
    let worst = std::cell::Cell::new(0.0f64);
    let inner_tol = tol / (x1 - x0).abs().max(1.0).min(1e6);
    let outer = |x: f64| {
        let e = integrate_estimate(&|y| f(x, y), y0(x), y1(x), inner_tol);
        worst.set(worst.get().max(e.error));
        e.value
    };
    let e = integrate_estimate(&outer, x0, x1, tol);
    if !(e.value.is_finite() && e.error <= tol && worst.get() <= inner_tol * 10.0) {
        return Err(Error::Tolerance { tolerance: tol, estimate: e.error.max(worst.get()) });
    }
    Ok(e.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_gaussian() {
        let v = integrate(|x| x * x, 0.0, 3.0, 1e-12).unwrap();
        assert!((v - 9.0).abs() < 1e-11);
        let g = integrate(|x| (-0.5 * x * x).exp(), f64::NEG_INFINITY, f64::INFINITY, 1e-11).unwrap();
        assert!((g - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-10);
        let h = integrate(|x| (-x).exp(), 1.0, f64::INFINITY, 1e-12).unwrap();
        assert!((h - (-1f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn narrow_peak_needs_bisection() {
        let s: f64 = 1e-3;
        let v = integrate(|x| (-(x - 0.3) * (x - 0.3) / (2.0 * s * s)).exp(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - s * (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn disk_area() {
        let r: f64 = 2.0;
        let a = integrate_2d(|_, _| 1.0, -r, r, |x| -(r * r - x * x).sqrt(), |x| (r * r - x * x).sqrt(), 1e-9).unwrap();
        assert!((a - std::f64::consts::PI * r * r).abs() < 1e-8);
    }
}
