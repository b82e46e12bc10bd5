//! The delta symbol: the kernel `h(x, y)`, calibration of `c0`, and reconstruction of `[n = 0]`.

use rayon::prelude::*;

use crate::accum::NeumaierSum;
use crate::analysis::quad::{integrate_panels, QuadratureConfig};
use crate::analysis::window::{omega, NormalizedWindow};
use crate::error::{Error, Result};
use crate::expsum::{euler_phi, ramanujan_sum, SumMode};

/// Range of `|y|` used by the mass check; `delta_eval` only needs `|y| <= 1/3`.
pub const MASS_Y_RANGE: f64 = 0.5;

#[derive(Clone, Copy, Debug)]
pub struct DeltaConfig {
    q: u64,
    omega: NormalizedWindow,
    c0: Option<f64>,
}

impl DeltaConfig {
    pub fn new(q: u64) -> Result<Self> {
        Self::with_omega(q, omega())
    }

    pub fn with_omega(q: u64, omega: NormalizedWindow) -> Result<Self> {
        if q < 2 {
            return Err(Error::arg(format!("Q = {q} must be at least 2")));
        }
        let (lo, hi) = omega.window.support();
        if lo < 0.5 || hi > 1.0 {
            return Err(Error::arg("omega must be supported in [1/2, 1]"));
        }
        Ok(Self { q, omega, c0: None })
    }

    /// Build and calibrate in one step.
    pub fn calibrated(q: u64) -> Result<Self> {
        let mut cfg = Self::new(q)?;
        cfg.c0 = Some(calibrate_c0(q, &cfg.omega)?);
        Ok(cfg)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn c0(&self) -> Option<f64> {
        self.c0
    }

    pub fn omega(&self) -> &NormalizedWindow {
        &self.omega
    }

    pub fn h(&self, x: f64, y: f64) -> f64 {
        h_eval(x, y, &self.omega)
    }
}

/// `h(x, y) = sum_{j >= 1} (1/j) (omega(x j) - omega(|y| / (x j)))`, a finite sum.
pub fn h_eval(x: f64, y: f64, omega: &NormalizedWindow) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    let y = y.abs();
    let mut s = 0.0;
    let first_lo = (0.5 / x).ceil().max(1.0) as u64;
    let first_hi = (1.0 / x).floor() as u64;
    for j in first_lo..=first_hi {
        s += omega.eval(x * j as f64) / j as f64;
    }
    if y > 0.0 {
        let lo = (y / x).ceil().max(1.0) as u64;
        let hi = (2.0 * y / x).floor() as u64;
        for j in lo..=hi {
            s -= omega.eval(y / (x * j as f64)) / j as f64;
        }
    }
    s
}

/// `c0 = Q / sum_q (phi(q)/q) h(q/Q, 0)`, which makes the reconstruction at `n = 0` exact.
pub fn calibrate_c0(q: u64, omega: &NormalizedWindow) -> Result<f64> {
    if q < 2 {
        return Err(Error::arg("Q must be at least 2"));
    }
    let mut s = NeumaierSum::new();
    for m in 1..=q {
        let phi = euler_phi(m)? as f64;
        s.add(phi / m as f64 * h_eval(m as f64 / q as f64, 0.0, omega));
    }
    let denom = s.value();
    if !(denom.abs() > 1e-300) {
        return Err(Error::Invariant {
            line: None,
            msg: "calibration denominator vanishes; omega is misconfigured".into(),
        });
    }
    Ok(q as f64 / denom)
}

/// Same constant through `sum_q phi(q) = m` over `q | m`: `Q / sum_m omega(m/Q)`.
pub fn c0_divisor_form(q: u64, omega: &NormalizedWindow) -> f64 {
    let s: f64 = (1..=q).map(|m| omega.eval(m as f64 / q as f64)).sum();
    q as f64 / s
}

/// `(c0/Q) sum_q (1/q) sum_{gamma mod q}^* e(gamma n / q) h(q/Q, n/Q^2)`.
pub fn delta_eval(n: i64, cfg: &DeltaConfig) -> Result<f64> {
    let c0 = cfg.c0.ok_or_else(|| Error::arg("delta configuration is not calibrated"))?;
    let qq = cfg.q as f64;
    if (n.unsigned_abs() as f64) > qq * qq / 3.0 {
        return Err(Error::arg(format!("|n| = {} exceeds Q^2/3", n.unsigned_abs())));
    }
    let y = n as f64 / (qq * qq);
    let qmax = (qq * 1f64.max(2.0 * y.abs())).floor() as u64;
    let terms: Vec<f64> = (1..=qmax)
        .into_par_iter()
        .map(|q| -> Result<f64> {
            let h = h_eval(q as f64 / qq, y, &cfg.omega);
            if h == 0.0 {
                return Ok(0.0);
            }
            Ok(ramanujan_sum(q, n, SumMode::Formula)? as f64 / q as f64 * h)
        })
        .collect::<Result<_>>()?;
    let s: NeumaierSum = terms.into_iter().collect();
    Ok(c0 / qq * s.value())
}

/// `(argmax n, max |delta(n)|)` over `1 <= |n| <= Q^2/3`.
pub fn indicator_residual(cfg: &DeltaConfig) -> Result<(i64, f64)> {
    let nmax = (cfg.q * cfg.q / 3) as i64;
    let mut worst = (0, 0.0);
    for n in (-nmax..=nmax).filter(|&n| n != 0) {
        let v = delta_eval(n, cfg)?.abs();
        if v > worst.1 {
            worst = (n, v);
        }
    }
    Ok(worst)
}

/// `int_{|y| <= y_range} |h(x, y)| dy`.
pub fn h_mass(x: f64, y_range: f64, omega: &NormalizedWindow, qcfg: &QuadratureConfig) -> Result<f64> {
    // breakpoints where a summand switches on or off: |y| = x j / 2 and |y| = x j
    let mut pts = vec![0.0, y_range];
    let mut j = 1.0;
    while x * j / 2.0 < y_range {
        pts.push(x * j / 2.0);
        if x * j < y_range {
            pts.push(x * j);
        }
        j += 1.0;
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let r = integrate_panels(|y| h_eval(x, y, omega).abs(), &pts, qcfg)?;
    Ok(2.0 * r.value)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelChecks {
    pub grid_points: usize,
    pub support_violations: usize,
    pub max_flatness_derivative: f64,
    /// `(x, mass)` pairs over `|y| <= MASS_Y_RANGE`.
    pub mass: Vec<(f64, f64)>,
    /// `max mass / x`.
    pub mass_constant: f64,
}

pub const MASS_GRID: [f64; 8] = [0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0];
/// Largest admissible `|dh/dy|` inside `|y| < x/2`.
pub const FLATNESS_TOL: f64 = 1e-12;
/// Admissible `max mass / x`.
pub const MASS_CONSTANT_LIMIT: f64 = 10.0;

impl KernelChecks {
    pub fn passes(&self) -> bool {
        self.support_violations == 0 && self.max_flatness_derivative <= FLATNESS_TOL && self.mass_constant < MASS_CONSTANT_LIMIT
    }
}

/// Support, flatness and mass properties of the kernel on fixed grids.
pub fn check_kernel(cfg: &DeltaConfig) -> Result<KernelChecks> {
    let om = &cfg.omega;
    let side = 100;
    let mut support_violations = 0;
    for i in 0..side {
        for k in 0..side {
            let x = 3.0 * (i as f64 + 1.0) / side as f64;
            let y = -1.5 + 3.0 * k as f64 / (side - 1) as f64;
            if x > 1f64.max(2.0 * y.abs()) && h_eval(x, y, om) != 0.0 {
                support_violations += 1;
            }
        }
    }
    let mut flat: f64 = 0.0;
    let eps = 1e-6;
    for i in 0..side {
        let x = (i as f64 + 1.0) / side as f64;
        for k in 0..side {
            let y = -x / 2.0 + eps + (x - 2.0 * eps) * k as f64 / (side - 1) as f64;
            let d = (h_eval(x, y + eps, om) - h_eval(x, y - eps, om)) / (2.0 * eps);
            flat = flat.max(d.abs());
        }
    }
    let qcfg = QuadratureConfig::with_tolerances(1e-12, 1e-10);
    let mut mass = Vec::new();
    let mut constant: f64 = 0.0;
    for &x in &MASS_GRID {
        let m = h_mass(x, MASS_Y_RANGE, om, &qcfg)?;
        constant = constant.max(m / x);
        mass.push((x, m));
    }
    Ok(KernelChecks {
        grid_points: side * side,
        support_violations,
        max_flatness_derivative: flat,
        mass,
        mass_constant: constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn support_and_flatness_examples() {
        let cfg = DeltaConfig::new(10).unwrap();
        assert_eq!(cfg.h(1.5, 0.1), 0.0);
        assert_eq!(cfg.h(0.8, 0.1), cfg.h(0.8, 0.35));
        let v = cfg.h(0.6, 0.0);
        assert!(v > 0.0 && v * 0.6 < 4.0);
    }

    #[test]
    fn calibration_is_exact_at_zero() {
        for q in [10, 20, 40] {
            let cfg = DeltaConfig::calibrated(q).unwrap();
            assert!((delta_eval(0, &cfg).unwrap() - 1.0).abs() < 1e-14);
            let c0 = cfg.c0().unwrap();
            assert!((c0 - 1.0).abs() <= 0.05, "Q={q} c0={c0}");
            assert!((c0 - c0_divisor_form(q, cfg.omega())).abs() < 1e-12);
        }
    }

    #[test]
    fn frozen_values() {
        // 30-digit evaluation of Q / sum_m omega(m/Q) and of omega(0.6)
        let c0 = DeltaConfig::calibrated(10).unwrap().c0().unwrap();
        assert!((c0 - 0.986_692_447_577_774_7).abs() < 1e-13);
        let c0 = DeltaConfig::calibrated(40).unwrap().c0().unwrap();
        assert!((c0 - 1.000_160_216_193_649_3).abs() < 1e-13);
        let h = DeltaConfig::new(10).unwrap().h(0.6, 0.0);
        assert!((h - 1.888_417_176_258_570_2).abs() < 1e-13);
    }

    #[test]
    fn uncalibrated_rejected() {
        let cfg = DeltaConfig::new(10).unwrap();
        assert!(delta_eval(1, &cfg).is_err());
        let cfg = DeltaConfig::calibrated(10).unwrap();
        assert!(delta_eval(34, &cfg).is_err());
    }

    #[test]
    fn reconstruction_vanishes_off_zero() {
        let cfg = DeltaConfig::calibrated(20).unwrap();
        let (_, worst) = indicator_residual(&cfg).unwrap();
        assert!(worst <= 1e-8f64.max(20f64.powi(-4)));
        assert!((delta_eval(5, &cfg).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn kernel_properties() {
        let cfg = DeltaConfig::calibrated(10).unwrap();
        let k = check_kernel(&cfg).unwrap();
        assert!(k.passes(), "{k:?}");
    }

    proptest! {
        #[test]
        fn parity(n in 1i64..133) {
            let cfg = DeltaConfig::calibrated(20).unwrap();
            prop_assert!((delta_eval(n, &cfg).unwrap() - delta_eval(-n, &cfg).unwrap()).abs() < 1e-12);
        }
    }
}
