//! Smooth windows, quadrature, integral transforms and Bessel kernels.

pub mod bessel;
pub mod quad;
pub mod window;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use bessel::bessel_j;
pub use quad::{integrate, integrate_panels, QuadResult, QuadratureConfig};
pub use window::{omega, SmoothWindow, WindowFamily};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Transform {
    /// `int W(x) x^{s-1} dx`
    Mellin(Complex64),
    /// `int W(x) e(-x xi) dx`
    Fourier(f64),
}

/// Mellin or Fourier transform of a window, with its quadrature error estimate.
pub fn transform(w: &SmoothWindow, kind: Transform, cfg: &QuadratureConfig) -> Result<QuadResult<Complex64>> {
    let (lo, hi) = w.support();
    match kind {
        Transform::Mellin(s) => {
            if lo <= 0.0 {
                return Err(Error::arg("Mellin transform needs support in (0, inf)"));
            }
            let turns = s.im.abs() * (hi / lo).ln() / PI;
            let panels = uniform(lo, hi, turns.ceil() as usize + 4);
            integrate_panels(
                |x: f64| {
                    let v = w.eval(x);
                    if v == 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    Complex64::new(x, 0.0).powc(s - 1.0) * v
                },
                &panels,
                cfg,
            )
        }
        Transform::Fourier(xi) => {
            let panels = uniform(lo, hi, (2.0 * xi.abs() * (hi - lo)).ceil() as usize + 4);
            integrate_panels(
                |x: f64| {
                    let v = w.eval(x);
                    crate::accum::e(-x * xi) * v
                },
                &panels,
                cfg,
            )
        }
    }
}

fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// `sup_{x} |int_{|z|>Z} W^(z) e(xz) dz|` bounded through the third derivative: `(b - a) C_3 K^3 / (8 pi^3 Z^2)`.
pub fn fourier_tail_bound(w: &SmoothWindow, cutoff: f64) -> f64 {
    let (lo, hi) = w.support();
    let c3 = w.derivative_constant(3).expect("order 3 constant");
    (hi - lo) * c3 * w.scale().powi(3) / (8.0 * PI.powi(3) * cutoff * cutoff)
}

/// `int_{-Z}^{Z} W^(z) e(xz) dz`, the truncated Fourier inversion at `x`.
pub fn fourier_inversion(w: &SmoothWindow, x: f64, cutoff: f64, cfg: &QuadratureConfig) -> Result<QuadResult<f64>> {
    if !(cutoff > 0.0) {
        return Err(Error::arg("cutoff must be positive"));
    }
    let (lo, hi) = w.support();
    let spread = x.abs().max(lo.abs()).max(hi.abs()) + (hi - lo);
    let panels = uniform(-cutoff, cutoff, (4.0 * cutoff * spread).ceil() as usize + 4);
    let inner = QuadratureConfig {
        abs_tol: cfg.abs_tol * 1e-2,
        rel_tol: cfg.rel_tol * 1e-2,
        ..*cfg
    };
    let failed = std::cell::Cell::new(None);
    let r = integrate_panels(
        |z: f64| match transform(w, Transform::Fourier(z), &inner) {
            Ok(v) => (v.value * crate::accum::e(x * z)).re,
            Err(e) => {
                failed.set(Some(e.to_string()));
                0.0
            }
        },
        &panels,
        cfg,
    )?;
    if let Some(msg) = failed.take() {
        return Err(Error::Invariant { line: None, msg });
    }
    Ok(r)
}

/// The Voronoi kernel `2 pi i^k J_{k-1}(u)` for even weight `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BesselKernel {
    pub weight: u32,
}

impl BesselKernel {
    pub fn new(weight: u32) -> Result<Self> {
        if weight == 0 || weight % 2 == 1 || weight - 1 > bessel::MAX_ORDER {
            return Err(Error::arg(format!(
                "weight {weight} must be even and at most {}",
                bessel::MAX_ORDER + 1
            )));
        }
        Ok(Self { weight })
    }

    fn sign(&self) -> f64 {
        if (self.weight / 2).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        Ok(2.0 * PI * self.sign() * bessel_j(self.weight - 1, u)?)
    }
}

/// `int W(x) kernel(4 pi sqrt(xi x)) dx` with panels no longer than one period of the kernel.
pub fn voronoi_kernel_transform(w: &SmoothWindow, kernel: BesselKernel, xi: f64, cfg: &QuadratureConfig) -> Result<QuadResult<f64>> {
    if !(xi.is_finite() && xi >= 0.0) {
        return Err(Error::arg("frequency must be non-negative"));
    }
    let (lo, hi) = w.support();
    if lo < 0.0 {
        return Err(Error::arg("kernel transform needs support in [0, inf)"));
    }
    let arg = |x: f64| 4.0 * PI * (xi * x).sqrt();
    if arg(hi) > bessel::MAX_ARGUMENT {
        return Err(Error::arg(format!("Bessel argument {} too large", arg(hi))));
    }
    let (u_lo, u_hi) = (arg(lo), arg(hi));
    let periods = ((u_hi - u_lo) / (2.0 * PI)).ceil() as usize;
    let mut panels = vec![lo];
    for i in 1..periods.max(1) {
        let u = u_lo + 2.0 * PI * i as f64;
        panels.push((u / (4.0 * PI)).powi(2) / xi);
    }
    panels.push(hi);
    let scale = 2.0 * PI * kernel.sign();
    let order = kernel.weight - 1;
    let r = integrate_panels(
        |x: f64| {
            let v = w.eval(x);
            if v == 0.0 {
                0.0
            } else {
                v * bessel::bessel_j_unchecked(order, arg(x))
            }
        },
        &panels,
        cfg,
    )?;
    Ok(QuadResult {
        value: scale * r.value,
        error: scale.abs() * r.error,
        evaluations: r.evaluations,
    })
}
