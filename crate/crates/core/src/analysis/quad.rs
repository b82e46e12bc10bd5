//! Globally adaptive Gauss-Kronrod (10/21-point) quadrature.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections applied to any initial panel.
    pub max_depth: u32,
    /// Integrands are truncated where they fall below this magnitude (infinite ranges).
    pub tail_cutoff: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_depth: 40,
            tail_cutoff: 1e-16,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::arg("quadrature tolerances must be positive"));
        }
        if !(self.tail_cutoff > 0.0) {
            return Err(Error::arg("tail cutoff must be positive"));
        }
        Ok(())
    }

    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn halved(&self) -> Self {
        Self {
            abs_tol: self.abs_tol / 2.0,
            rel_tol: self.rel_tol / 2.0,
            ..*self
        }
    }
}

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9]
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

fn gk21<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = T::zero();
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let k = kronrod * half;
    let g = gauss * half;
    (k, (k - g).magnitude())
}

struct Panel<T> {
    a: f64,
    b: f64,
    depth: u32,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrate over `[a, b]`.
pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadResult<T>> {
    integrate_panels(f, &[a, b], cfg)
}

/// Integrate over consecutive panels `[p0,p1], [p1,p2], ...` with one global error budget.
pub fn integrate_panels<T: QuadValue, F: Fn(f64) -> T>(f: F, breakpoints: &[f64], cfg: &QuadratureConfig) -> Result<QuadResult<T>> {
    cfg.validate()?;
    if breakpoints.len() < 2 {
        return Err(Error::arg("need at least two breakpoints"));
    }
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in breakpoints.windows(2) {
        let (value, error) = gk21(&f, w[0], w[1]);
        evaluations += 21;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            depth: 0,
            value,
            error,
        });
    }
    loop {
        let (total, err) = totals(&heap);
        let target = cfg.abs_tol.max(cfg.rel_tol * total.magnitude());
        if err <= target {
            return Ok(QuadResult {
                value: total,
                error: err,
                evaluations,
            });
        }
        let worst = heap.pop().expect("non-empty");
        if worst.depth >= cfg.max_depth || worst.b - worst.a <= f64::EPSILON * worst.a.abs().max(1.0) * 4.0 {
            return Err(Error::NonConvergence {
                a: worst.a,
                b: worst.b,
                estimate: err,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk21(&f, lo, hi);
            evaluations += 21;
            heap.push(Panel {
                a: lo,
                b: hi,
                depth: worst.depth + 1,
                value,
                error,
            });
        }
    }
}

fn totals<T: QuadValue>(heap: &BinaryHeap<Panel<T>>) -> (T, f64) {
    // sum in panel order so the result does not depend on heap layout
    let mut panels: Vec<&Panel<T>> = heap.iter().collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut total = T::zero();
    let mut err = 0.0;
    for p in panels {
        total = total + p.value;
        err += p.error;
    }
    (total, err)
}

/// Fixed composite Gauss-Legendre rule, used as an independent check on adaptive results.
pub fn fixed_gauss<T: QuadValue, F: Fn(f64) -> T>(f: F, a: f64, b: f64, panels: usize) -> T {
    let h = (b - a) / panels as f64;
    let mut total = T::zero();
    for i in 0..panels {
        let lo = a + i as f64 * h;
        let center = lo + 0.5 * h;
        let half = 0.5 * h;
        let mut s = T::zero();
        for j in 0..5 {
            let dx = half * XGK[2 * j + 1];
            s = s + (f(center - dx) + f(center + dx)) * WG[j];
        }
        total = total + s * half;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x: f64| x.powi(7) - 3.0 * x * x, 0.0, 2.0, &QuadratureConfig::default()).unwrap();
        assert!((r.value - (32.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_complex() {
        // int_0^1 e^{i 40 x} dx
        let r = integrate(|x: f64| Complex64::new(0.0, 40.0 * x).exp(), 0.0, 1.0, &QuadratureConfig::default()).unwrap();
        let exact = (Complex64::new(0.0, 40.0).exp() - 1.0) / Complex64::new(0.0, 40.0);
        assert!((r.value - exact).norm() < 1e-11);
    }

    #[test]
    fn nonconvergence_is_reported() {
        let cfg = QuadratureConfig {
            max_depth: 3,
            ..QuadratureConfig::default()
        };
        let r = integrate(|x: f64| (1.0 / x).sin(), 1e-4, 1.0, &cfg);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn halving_tolerance_is_consistent() {
        let f = |x: f64| (x * x).cos() * (-x).exp();
        let cfg = QuadratureConfig::with_tolerances(1e-8, 1e-8);
        let r1 = integrate(f, 0.0, 10.0, &cfg).unwrap();
        let r2 = integrate(f, 0.0, 10.0, &cfg.halved()).unwrap();
        assert!((r1.value - r2.value).abs() <= r1.error);
    }

    #[test]
    fn fixed_rule_agrees() {
        let f = |x: f64| (3.0 * x).sin() * x;
        let a = integrate(f, 0.0, 5.0, &QuadratureConfig::default()).unwrap().value;
        let b = fixed_gauss(f, 0.0, 5.0, 50);
        assert!((a - b).abs() < 1e-12);
    }
}
