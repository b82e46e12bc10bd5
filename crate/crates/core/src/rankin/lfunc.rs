//! Log-gamma, the Riemann zeta function, and the approximate functional equation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// A branch of `log Gamma(z)`; differences of values are correct modulo `2 pi i`.
pub fn log_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        let s = (z * PI).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - log_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// `log Gamma_C(z) = log(2 (2 pi)^{-z} Gamma(z))`.
pub fn log_gamma_c(z: Complex64) -> Complex64 {
    2f64.ln() - z * (2.0 * PI).ln() + log_gamma(z)
}

const BORWEIN_TERMS: usize = 50;

/// `zeta(s)` for `Re s > 0`, `s != 1`, via an accelerated alternating series.
pub fn zeta(s: Complex64) -> Result<Complex64> {
    if !(s.re > 0.0) {
        return Err(Error::arg("zeta is implemented for Re s > 0"));
    }
    let denom = 1.0 - Complex64::new(2.0, 0.0).powc(1.0 - s);
    if denom.norm() < 1e-14 {
        return Err(Error::arg("zeta has a pole at s = 1"));
    }
    let n = BORWEIN_TERMS;
    let mut d = Vec::with_capacity(n + 1);
    let mut term = 1.0;
    let mut acc = 1.0;
    d.push(acc);
    for i in 1..=n {
        let fi = i as f64;
        let nf = n as f64;
        term *= 4.0 * (nf + fi - 1.0) * (nf - fi + 1.0) / ((2.0 * fi) * (2.0 * fi - 1.0));
        acc += term;
        d.push(acc);
    }
    let dn = d[n];
    let mut sum = Complex64::new(0.0, 0.0);
    for (k, &dk) in d.iter().enumerate().take(n) {
        let t = (dk - dn) * Complex64::new((k + 1) as f64, 0.0).powc(-s);
        if k % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
    }
    let eta = -sum / dn;
    Ok(eta / denom)
}

/// Test function `G(w)` in the smoothed functional equation; both are even with `G(0) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// `G = 1`: the cutoff decays through the gamma factor alone.
    GammaOnly,
    /// `G(w) = exp(w^2 / 8)`
    Gaussian,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::GammaOnly => "gamma-only",
            Scheme::Gaussian => "gaussian",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gamma-only" => Some(Scheme::GammaOnly),
            "gaussian" => Some(Scheme::Gaussian),
            _ => None,
        }
    }

    fn g(&self, w: Complex64) -> Complex64 {
        match self {
            Scheme::GammaOnly => Complex64::new(1.0, 0.0),
            Scheme::Gaussian => (w * w / 8.0).exp(),
        }
    }
}

// vertical extent of the contour; the integrand has decayed below 1e-25 by then
const HALF_WIDTH: f64 = 40.0;

const CONTOUR: f64 = 1.5;
const STEP: f64 = 0.04;

/// Self-dual L-function data: `Lambda(s) = Q^{s/2} prod Gamma_C(s + mu_j) L(s) = eps Lambda(1 - s)`.
#[derive(Clone, Debug)]
pub struct Afe {
    /// Dirichlet coefficients indexed by n (entry 0 unused), real.
    pub coeffs: Vec<f64>,
    pub conductor: f64,
    pub shifts: Vec<f64>,
}

/// The two halves of the functional equation at `s`: `L(s) = first + eps * second`.
#[derive(Clone, Copy, Debug)]
pub struct AfeParts {
    pub first: Complex64,
    pub second: Complex64,
    /// `max |V|` at the truncation point, for both halves.
    pub truncation: f64,
}

impl Afe {
    fn log_gamma_factor(&self, s: Complex64) -> Complex64 {
        self.shifts.iter().map(|&m| log_gamma_c(s + m)).sum()
    }

    /// Nodes `w_k` and weights with `V_s(y) = sum_k weight_k y^{-w_k}`.
    fn cutoff_rule(&self, s: Complex64, scheme: Scheme) -> Vec<(Complex64, Complex64)> {
        let base = self.log_gamma_factor(s);
        let half = HALF_WIDTH;
        let count = (2.0 * half / STEP).round() as i64;
        (0..=count)
            .map(|k| {
                let u = -half + k as f64 * STEP;
                let w = Complex64::new(CONTOUR, u);
                let ratio = (self.log_gamma_factor(s + w) - base).exp();
                (w, ratio * scheme.g(w) / w * (STEP / (2.0 * PI)))
            })
            .collect()
    }

    fn smoothed(&self, s: Complex64, scheme: Scheme) -> (Complex64, f64) {
        let rule = self.cutoff_rule(s, scheme);
        let root = self.conductor.sqrt();
        let v = |y: f64| -> Complex64 {
            let ly = y.ln();
            rule.iter().map(|&(w, c)| c * (-w * ly).exp()).sum()
        };
        let mut total = Complex64::new(0.0, 0.0);
        let last = self.coeffs.len() - 1;
        for (n, &b) in self.coeffs.iter().enumerate().skip(1) {
            if b == 0.0 {
                continue;
            }
            let nf = n as f64;
            total += b * Complex64::new(nf, 0.0).powc(-s) * v(nf / root);
        }
        (total, v(last as f64 / root).norm())
    }

    pub fn parts(&self, s: Complex64, scheme: Scheme) -> AfeParts {
        let (first, t1) = self.smoothed(s, scheme);
        let (dual, t2) = self.smoothed(1.0 - s, scheme);
        let factor = ((0.5 - s) * self.conductor.ln() + self.log_gamma_factor(1.0 - s) - self.log_gamma_factor(s)).exp();
        AfeParts {
            first,
            second: factor * dual,
            truncation: t1.max(t2),
        }
    }

    /// Root number from the requirement that both schemes give the same value at `s`.
    pub fn root_number(&self, s: Complex64) -> Result<f64> {
        let a = self.parts(s, Scheme::GammaOnly);
        let b = self.parts(s, Scheme::Gaussian);
        let eps = (b.first - a.first) / (a.second - b.second);
        let rounded = eps.re.round();
        if (rounded.abs() - 1.0).abs() > 1e-12 || (eps - rounded).norm() > 1e-6 {
            return Err(Error::Invariant {
                line: None,
                msg: format!("root number estimate {eps} is not +-1"),
            });
        }
        Ok(rounded)
    }

    pub fn value(&self, s: Complex64, eps: f64, scheme: Scheme) -> Complex64 {
        let p = self.parts(s, scheme);
        p.first + eps * p.second
    }
}
