//! Rankin-Selberg sums, amplification, the congruence-averaging identity,
//! coefficient sums in progressions, and central values of `L(f x g, s)`.

pub mod lfunc;

use num_complex::Complex64;

use crate::accum::NeumaierSum;
use crate::analysis::SmoothWindow;
use crate::error::{Error, Result};
use crate::expsum::{gcd, is_prime, primes_up_to};
use crate::newform::{rankin_average, AmplifierConfig, EigenvalueTable};
use crate::scs::fit_slope;
use lfunc::{zeta, Afe, Scheme};

/// `U`: bump on `[1/2, 5/2]`.
pub fn default_u() -> SmoothWindow {
    SmoothWindow::bump(0.5, 2.5).expect("static support")
}

/// `V`: equal to 1 on `[1/2, 5/2]`, supported in `[1/3, 3]`.
pub fn default_v() -> SmoothWindow {
    SmoothWindow::plateau(1.0 / 3.0, 0.5, 2.5, 3.0).expect("static support")
}

// integers n with n / scale strictly inside the support of w
fn support_range(w: &SmoothWindow, scale: f64) -> Option<(usize, usize)> {
    let (lo, hi) = w.support();
    let a = ((lo * scale).floor() as i64 + 1).max(1);
    let b = (hi * scale).ceil() as i64 - 1;
    (a <= b).then_some((a as usize, b as usize))
}

/// `sum_n lambda_f(n) lambda_g(n) U(n/N)`.
pub fn smooth_rs_sum(f: &EigenvalueTable, g: &EigenvalueTable, n: f64, u: &SmoothWindow) -> Result<f64> {
    let Some((lo, hi)) = support_range(u, n) else {
        return Ok(0.0);
    };
    f.ensure_covers(hi)?;
    g.ensure_covers(hi)?;
    let s: NeumaierSum = (lo..=hi).map(|k| f.lambda(k) * g.lambda(k) * u.eval(k as f64 / n)).collect();
    Ok(s.value())
}

/// Same sum accumulated from the top down without compensation.
pub fn smooth_rs_sum_reverse(f: &EigenvalueTable, g: &EigenvalueTable, n: f64, u: &SmoothWindow) -> Result<f64> {
    let Some((lo, hi)) = support_range(u, n) else {
        return Ok(0.0);
    };
    f.ensure_covers(hi)?;
    g.ensure_covers(hi)?;
    Ok((lo..=hi).rev().map(|k| f.lambda(k) * g.lambda(k) * u.eval(k as f64 / n)).sum())
}

/// `S_1(N) = (1/|L|) sum_r alpha_r sum_n lambda_f(n) lambda_g(nr) U(n/N)`.
pub fn amplified_sum(f: &EigenvalueTable, g: &EigenvalueTable, n: f64, amp: &AmplifierConfig, u: &SmoothWindow) -> Result<f64> {
    let Some((lo, hi)) = support_range(u, n) else {
        return Ok(0.0);
    };
    f.ensure_covers(hi)?;
    g.ensure_covers(hi * amp.max_r() as usize)?;
    let mut total = NeumaierSum::new();
    for &(r, alpha) in &amp.alpha {
        let r = r as usize;
        let inner: NeumaierSum = (lo..=hi).map(|k| f.lambda(k) * g.lambda(k * r) * u.eval(k as f64 / n)).collect();
        total.add(alpha * inner.value());
    }
    Ok(total.value() / amp.primes.len() as f64)
}

/// The regrouping `S_1 = T_1 - T_2 + T_3`, where `l = l(r)` is the prime underlying `r`:
/// `T_1 = (1/|L|) sum_r alpha_r lambda_g(r) S(N)`,
/// `T_2 = (1/|L|) sum_r alpha_r lambda_g(r) sum_{l | n} lambda_f(n) lambda_g(n) U(n/N)`,
/// `T_3 = (1/|L|) sum_r alpha_r sum_{l | n} lambda_f(n) lambda_g(nr) U(n/N)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplifierSplit {
    pub s: f64,
    pub s1: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
}

impl AmplifierSplit {
    pub fn residual(&self) -> f64 {
        (self.s1 - (self.t1 - self.t2 + self.t3)).abs()
    }
}

pub fn amplifier_split(
    f: &EigenvalueTable,
    g: &EigenvalueTable,
    n: f64,
    amp: &AmplifierConfig,
    u: &SmoothWindow,
) -> Result<AmplifierSplit> {
    let s = smooth_rs_sum(f, g, n, u)?;
    let s1 = amplified_sum(f, g, n, amp, u)?;
    let size = amp.primes.len() as f64;
    let (mut t1, mut t2, mut t3) = (NeumaierSum::new(), NeumaierSum::new(), NeumaierSum::new());
    if let Some((lo, hi)) = support_range(u, n) {
        for &(r, alpha) in &amp.alpha {
            let l = amp.prime_of(r).ok_or_else(|| Error::Invariant {
                line: None,
                msg: format!("amplifier index {r} is not l or l^2"),
            })? as usize;
            let lr = g.lambda(r as usize);
            t1.add(alpha * lr * s);
            let mut a2 = NeumaierSum::new();
            let mut a3 = NeumaierSum::new();
            for k in (lo..=hi).filter(|k| k % l == 0) {
                let w = f.lambda(k) * u.eval(k as f64 / n);
                a2.add(w * g.lambda(k));
                a3.add(w * g.lambda(k * r as usize));
            }
            t2.add(alpha * lr * a2.value());
            t3.add(alpha * a3.value());
        }
    }
    Ok(AmplifierSplit {
        s,
        s1,
        t1: t1.value() / size,
        t2: t2.value() / size,
        t3: t3.value() / size,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmplifierRow {
    pub length: u64,
    pub primes: usize,
    pub s: f64,
    pub s1: f64,
    /// `|S - S_1| sqrt(L) / N`
    pub statistic: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmplifierReport {
    pub n: f64,
    /// `T = pq / N`
    pub t: f64,
    pub rows: Vec<AmplifierRow>,
    /// Least-squares slope of `log statistic` against `log L`.
    pub slope: f64,
}

/// The deviation `|S - S_1| sqrt(L) / N` across amplifier lengths.
pub fn amplifier_experiment(
    f: &EigenvalueTable,
    g: &EigenvalueTable,
    n: f64,
    lengths: &[u64],
    u: &SmoothWindow,
) -> Result<AmplifierReport> {
    let (p, q) = (f.level(), g.level());
    let mut rows = Vec::new();
    for &l in lengths {
        let amp = crate::newform::amplifier_coeffs(g, l, p, q)?;
        let s = smooth_rs_sum(f, g, n, u)?;
        let s1 = amplified_sum(f, g, n, &amp, u)?;
        rows.push(AmplifierRow {
            length: l,
            primes: amp.primes.len(),
            s,
            s1,
            statistic: (s - s1).abs() * (l as f64).sqrt() / n,
        });
    }
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.statistic > 0.0)
        .map(|r| ((r.length as f64).ln(), r.statistic.ln()))
        .collect();
    let slope = if usable.len() >= 2 { fit_slope(usable) } else { 0.0 };
    Ok(AmplifierReport {
        n,
        t: (p * q) as f64 / n,
        rows,
        slope,
    })
}

/// Hecke multiplicativity gives `sum_r alpha_r lambda_g(nr) = |L| lambda_g(n)` for every `n`, so `S_1 = S`
/// and the statistic is pure rounding; anything above this floor counts as growth.
pub const AMPLIFIER_NOISE: f64 = 1e-12;

impl AmplifierReport {
    pub fn max_statistic(&self) -> f64 {
        self.rows.iter().map(|r| r.statistic).fold(0.0, f64::max)
    }

    pub fn bounded(&self) -> bool {
        self.max_statistic() <= AMPLIFIER_NOISE
    }
}

/// Moduli set: primes in `[C, 2C]` coprime to `pq` and outside the amplifier primes.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuliConfig {
    pub c: f64,
    pub moduli: Vec<u64>,
}

impl ModuliConfig {
    /// `C = 10 L^2`.
    pub fn for_amplifier(amp: &AmplifierConfig) -> Result<Self> {
        Self::new(10.0 * (amp.length * amp.length) as f64, amp)
    }

    pub fn new(c: f64, amp: &AmplifierConfig) -> Result<Self> {
        if !(c >= 2.0) {
            return Err(Error::arg("C must be at least 2"));
        }
        let lo = c.ceil() as u64;
        let hi = (2.0 * c).floor() as u64;
        let moduli: Vec<u64> = primes_up_to(hi)
            .into_iter()
            .filter(|&m| m >= lo && gcd(m, amp.p * amp.q) == 1 && !amp.primes.contains(&m))
            .collect();
        if moduli.is_empty() {
            return Err(Error::arg(format!("no admissible moduli in [{c}, {}]", 2.0 * c)));
        }
        Ok(Self { c, moduli })
    }

    pub fn validate(&self, amp: &AmplifierConfig) -> Result<()> {
        for &m in &self.moduli {
            if !is_prime(m) || gcd(m, amp.p * amp.q) != 1 || amp.primes.contains(&m) {
                return Err(Error::Invariant {
                    line: None,
                    msg: format!("modulus {m} is not an admissible prime"),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircleCheck {
    pub direct: f64,
    pub congruence: f64,
    pub discrepancy: f64,
    pub relative: f64,
    pub moduli: usize,
    /// Number of `(c, r, n, m)` quadruples visited on the congruence side.
    pub visited: usize,
}

/// `S_1(N)` directly and as `(1/|C|) sum_c` of the congruence-detected double sum with weight `U(n/N) V(m/(rN))`.
pub fn circle_decomposition_check(
    f: &EigenvalueTable,
    g: &EigenvalueTable,
    n: f64,
    amp: &AmplifierConfig,
    moduli: &ModuliConfig,
    u: &SmoothWindow,
    v: &SmoothWindow,
) -> Result<CircleCheck> {
    moduli.validate(amp)?;
    let pq = amp.p * amp.q;
    let r_max = amp.max_r();
    let (v_lo, v_hi) = v.support();
    let (u_lo, u_hi) = u.support();
    let c_min = *moduli.moduli.first().expect("non-empty");
    // |rn - m| < r N max(u_hi - v_lo, v_hi - u_lo) on the supports
    let spread = (u_hi - v_lo).max(v_hi - u_lo) * r_max as f64 * n;
    if (pq * c_min) as f64 <= spread {
        return Err(Error::Hypothesis(format!(
            "pq min(C) = {} does not exceed the spread {spread}",
            pq * c_min
        )));
    }
    let direct = amplified_sum(f, g, n, amp, u)?;
    let Some((lo, hi)) = support_range(u, n) else {
        return Ok(CircleCheck {
            direct,
            congruence: 0.0,
            discrepancy: direct.abs(),
            relative: if direct == 0.0 { 0.0 } else { 1.0 },
            moduli: moduli.moduli.len(),
            visited: 0,
        });
    };
    f.ensure_covers(hi)?;
    g.ensure_covers((v_hi * r_max as f64 * n).ceil() as usize)?;
    let mut outer = NeumaierSum::new();
    let mut visited = 0;
    for &c in &moduli.moduli {
        let modulus = (pq * c) as i64;
        let mut per_c = NeumaierSum::new();
        for &(r, alpha) in &amp.alpha {
            let rn_scale = r as f64 * n;
            let m_lo = (v_lo * rn_scale).floor() as i64 + 1;
            let m_hi = (v_hi * rn_scale).ceil() as i64 - 1;
            for k in lo..=hi {
                let uw = u.eval(k as f64 / n);
                if uw == 0.0 {
                    continue;
                }
                let target = (r as i64) * k as i64;
                // smallest m >= m_lo with m = target mod modulus
                let mut m = m_lo + (target - m_lo).rem_euclid(modulus);
                while m <= m_hi {
                    visited += 1;
                    let vw = v.eval(m as f64 / rn_scale);
                    if vw != 0.0 {
                        per_c.add(alpha * f.lambda(k) * g.lambda(m as usize) * uw * vw);
                    }
                    m += modulus;
                }
            }
        }
        outer.add(per_c.value());
    }
    let congruence = outer.value() / (moduli.moduli.len() * amp.primes.len()) as f64;
    let discrepancy = (direct - congruence).abs();
    Ok(CircleCheck {
        direct,
        congruence,
        discrepancy,
        relative: discrepancy / direct.abs().max(1e-300),
        moduli: moduli.moduli.len(),
        visited,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApSum {
    pub value: f64,
    /// `X^{1-alpha} Y^{1-beta} / c (1 + sqrt(c/Y) + sqrt(c/X) + c / sqrt(XY))`
    pub shape: f64,
    pub margin: f64,
    /// For `alpha = beta = 0`: `sqrt(R_f(X) R_g(Y))` with `R` the mean of `|lambda|^2`, an upper bound for the margin.
    pub constant: Option<f64>,
}

/// `sum_{n <= X, m <= Y, am = bn (c)} |lambda_f(n)| n^{-alpha} |lambda_g(m)| m^{-beta}` by a double loop.
#[allow(clippy::too_many_arguments)]
pub fn ap_constrained_sum(
    f: &EigenvalueTable,
    g: &EigenvalueTable,
    x: f64,
    y: f64,
    a: u64,
    b: u64,
    c: u64,
    alpha: f64,
    beta: f64,
) -> Result<ApSum> {
    if a == 0 || b == 0 || c == 0 {
        return Err(Error::arg("a, b, c must be positive"));
    }
    if gcd(a * b, c) != 1 {
        return Err(Error::Hypothesis(format!("(ab, c) = ({}, {c}) is not 1", a * b)));
    }
    if !((0.0..=0.5).contains(&alpha) && (0.0..=0.5).contains(&beta)) {
        return Err(Error::arg("alpha and beta must lie in [0, 1/2]"));
    }
    let shape = if x >= 1.0 && y >= 1.0 {
        x.powf(1.0 - alpha) * y.powf(1.0 - beta) / c as f64
            * (1.0 + (c as f64 / y).sqrt() + (c as f64 / x).sqrt() + c as f64 / (x * y).sqrt())
    } else {
        0.0
    };
    if x < 1.0 || y < 1.0 {
        return Ok(ApSum {
            value: 0.0,
            shape,
            margin: 0.0,
            constant: None,
        });
    }
    let (nx, ny) = (x.floor() as usize, y.floor() as usize);
    f.ensure_covers(nx)?;
    g.ensure_covers(ny)?;
    let fa: Vec<f64> = (1..=nx).map(|n| f.lambda(n).abs() * (n as f64).powf(-alpha)).collect();
    let gb: Vec<f64> = (1..=ny).map(|m| g.lambda(m).abs() * (m as f64).powf(-beta)).collect();
    let mut total = NeumaierSum::new();
    for (i, &fv) in fa.iter().enumerate() {
        let n = (i + 1) as u64;
        let bn = (b % c) * (n % c) % c;
        let mut row = 0.0;
        for (j, &gv) in gb.iter().enumerate() {
            let m = (j + 1) as u64;
            if (a % c) * (m % c) % c == bn {
                row += gv;
            }
        }
        total.add(fv * row);
    }
    let value = total.value();
    let constant = if alpha == 0.0 && beta == 0.0 {
        Some((rankin_average(f, nx)? * rankin_average(g, ny)?).sqrt())
    } else {
        None
    };
    Ok(ApSum {
        value,
        shape,
        margin: value / shape,
        constant,
    })
}

/// Same sum through residue-class buckets.
#[allow(clippy::too_many_arguments)]
pub fn ap_sum_by_classes(
    f: &EigenvalueTable,
    g: &EigenvalueTable,
    x: usize,
    y: usize,
    a: u64,
    b: u64,
    c: u64,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    f.ensure_covers(x)?;
    g.ensure_covers(y)?;
    let c_us = c as usize;
    let mut fb = vec![0.0; c_us];
    let mut gb = vec![0.0; c_us];
    for n in 1..=x {
        fb[(b as usize * n) % c_us] += f.lambda(n).abs() * (n as f64).powf(-alpha);
    }
    for m in 1..=y {
        gb[(a as usize * m) % c_us] += g.lambda(m).abs() * (m as f64).powf(-beta);
    }
    Ok(fb.iter().zip(&gb).map(|(u, v)| u * v).sum())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PvRow {
    pub n: f64,
    pub sum: f64,
    /// `sum |lambda_f(n) lambda_g(n)| W(n/N)`
    pub trivial: f64,
    /// `sqrt(N sqrt(Q))`
    pub shape: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PvReport {
    pub conductor: f64,
    pub rows: Vec<PvRow>,
    /// Least-squares slope of `log ratio` against `log N`.
    pub slope: f64,
}

/// `N = sqrt(Q) 2^k` for `k = -2..=2`, with `Q = (pq)^2`.
pub fn pv_dyadic_range(p: u64, q: u64) -> Vec<f64> {
    let root = (p * q) as f64;
    (-2..=2).map(|k| root * 2f64.powi(k)).collect()
}

pub fn pv_experiment(f: &EigenvalueTable, g: &EigenvalueTable, ns: &[f64], w: &SmoothWindow) -> Result<PvReport> {
    if f.label() == g.label() {
        return Err(Error::Hypothesis("f = g: L(f x g, s) has a pole".into()));
    }
    let conductor = ((f.level() * g.level()) as f64).powi(2);
    let mut rows = Vec::new();
    for &n in ns {
        let sum = smooth_rs_sum(f, g, n, w)?;
        let trivial = match support_range(w, n) {
            Some((lo, hi)) => (lo..=hi).map(|k| (f.lambda(k) * g.lambda(k)).abs() * w.eval(k as f64 / n)).sum(),
            None => 0.0,
        };
        let shape = (n * conductor.sqrt()).sqrt();
        rows.push(PvRow {
            n,
            sum,
            trivial,
            shape,
            ratio: sum.abs() / shape,
        });
    }
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.ratio > 0.0).map(|r| (r.n.ln(), r.ratio.ln())).collect();
    let slope = if pts.len() >= 2 { fit_slope(pts) } else { 0.0 };
    Ok(PvReport { conductor, rows, slope })
}

/// Auxiliary point at which the root number is solved for.
pub const ROOT_NUMBER_POINT: (f64, f64) = (0.5, 3.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LValueRequest {
    pub s: Complex64,
    /// Number of Dirichlet coefficients used; at least `pq`.
    pub x_cut: usize,
    pub scheme: Scheme,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LValueReport {
    pub s: Complex64,
    pub scheme: Scheme,
    pub value: Complex64,
    /// `|L| / (pq)^{1/2}`
    pub normalized: f64,
    pub conductor: f64,
    /// `(|s| + k_f + k_g)^2`
    pub spectral: f64,
    pub root_number: f64,
    pub truncation: f64,
    /// `L(f x g, s) / L(chi_0, 2s)`; zero at `s = 1/2`, where `zeta(2s)` has its pole.
    pub quotient: Complex64,
}

/// Coefficients of `L(f x g, s) = L(chi_0, 2s) sum lambda_f(n) lambda_g(n) n^{-s}`.
pub fn rankin_coefficients(f: &EigenvalueTable, g: &EigenvalueTable, len: usize) -> Result<Vec<f64>> {
    f.ensure_covers(len)?;
    g.ensure_covers(len)?;
    let pq = f.level() * g.level();
    let mut b = vec![0.0; len + 1];
    let mut d = 1usize;
    while d * d <= len {
        if gcd(d as u64, pq) == 1 {
            let mut k = 1;
            while d * d * k <= len {
                b[d * d * k] += f.lambda(k) * g.lambda(k);
                k += 1;
            }
        }
        d += 1;
    }
    Ok(b)
}

fn levels_ok(f: &EigenvalueTable, g: &EigenvalueTable) -> Result<(u64, u64)> {
    let (p, q) = (f.level(), g.level());
    if !is_prime(p) || !is_prime(q) || p == q {
        return Err(Error::Hypothesis(format!("levels {p}, {q} must be distinct primes")));
    }
    Ok((p, q))
}

/// Central-line value of `L(f x g, s)` through the smoothed functional equation.
pub fn lvalue_estimate(f: &EigenvalueTable, g: &EigenvalueTable, req: &LValueRequest) -> Result<LValueReport> {
    let (p, q) = levels_ok(f, g)?;
    if req.s.re != 0.5 {
        return Err(Error::arg(format!("Re s = {} must be exactly 1/2", req.s.re)));
    }
    let pq = p * q;
    if (req.x_cut as u64) < pq {
        return Err(Error::arg(format!("x_cut = {} is below the conductor root {pq}", req.x_cut)));
    }
    let (kf, kg) = (f.weight() as f64, g.weight() as f64);
    let afe = Afe {
        coeffs: rankin_coefficients(f, g, req.x_cut)?,
        conductor: (pq * pq) as f64,
        shifts: vec![(kf + kg) / 2.0 - 1.0, (kf - kg).abs() / 2.0],
    };
    let eps = afe.root_number(Complex64::new(ROOT_NUMBER_POINT.0, ROOT_NUMBER_POINT.1))?;
    let parts = afe.parts(req.s, req.scheme);
    let value = parts.first + eps * parts.second;
    let quotient = if req.s.im == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        let two_s = 2.0 * req.s;
        let mut l0 = zeta(two_s)?;
        for l in [p, q] {
            l0 *= 1.0 - Complex64::new(l as f64, 0.0).powc(-two_s);
        }
        value / l0
    };
    Ok(LValueReport {
        s: req.s,
        scheme: req.scheme,
        value,
        normalized: value.norm() / (pq as f64).sqrt(),
        conductor: afe.conductor,
        spectral: (req.s.norm() + kf + kg).powi(2),
        root_number: eps,
        truncation: parts.truncation,
        quotient,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newform::{amplifier_coeffs, build_table, lookup};
    use proptest::prelude::*;

    fn pair(n: usize) -> (EigenvalueTable, EigenvalueTable) {
        (
            build_table(&lookup("level5").unwrap(), n).unwrap(),
            build_table(&lookup("level11").unwrap(), n).unwrap(),
        )
    }

    #[test]
    fn empty_support() {
        let (f, g) = pair(100);
        assert_eq!(smooth_rs_sum(&f, &g, 0.1, &default_u()).unwrap(), 0.0);
        let amp = amplifier_coeffs(&g, 10, 5, 11).unwrap();
        assert_eq!(amplified_sum(&f, &g, 0.1, &amp, &default_u()).unwrap(), 0.0);
    }

    #[test]
    fn diagonal_nonnegative() {
        let (f, _) = pair(200);
        assert!(smooth_rs_sum(&f, &f, 60.0, &default_u()).unwrap() > 0.0);
    }

    #[test]
    fn reverse_order_agrees() {
        let d = build_table(&lookup("delta").unwrap(), 1300).unwrap();
        let (_, g) = pair(1300);
        let a = smooth_rs_sum(&d, &g, 500.0, &default_u()).unwrap();
        let b = smooth_rs_sum_reverse(&d, &g, 500.0, &default_u()).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn amplifier_regrouping() {
        let (f, g) = pair(80_000);
        for l in [10, 24] {
            let amp = amplifier_coeffs(&g, l, 5, 11).unwrap();
            let split = amplifier_split(&f, &g, 55.0, &amp, &default_u()).unwrap();
            assert!(split.residual() < 1e-12, "{split:?}");
            assert!((split.t1 - split.s).abs() < 1e-12);
        }
    }

    #[test]
    fn amplifier_statistic_is_rounding() {
        let (f, g) = pair(30_000);
        let r = amplifier_experiment(&f, &g, 55.0, &[10, 16], &default_u()).unwrap();
        assert!(r.bounded(), "{r:?}");
        assert_eq!(r.t, 1.0);
    }

    #[test]
    fn circle_identity() {
        let (f, g) = pair(10_000);
        let amp = amplifier_coeffs(&g, 10, 5, 11).unwrap();
        let moduli = ModuliConfig::for_amplifier(&amp).unwrap();
        assert!(moduli.moduli.iter().all(|&c| (1000..=2000).contains(&c)));
        let r = circle_decomposition_check(&f, &g, 55.0, &amp, &moduli, &default_u(), &default_v()).unwrap();
        assert!(r.relative <= 1e-9, "{r:?}");
        // W(x, x) = U(x) on the support of U
        let (u, v) = (default_u(), default_v());
        for i in 1..100 {
            let x = 0.5 + 2.0 * i as f64 / 100.0;
            assert_eq!(u.eval(x) * v.eval(x), u.eval(x));
        }
    }

    #[test]
    fn circle_precondition_enforced() {
        let (f, g) = pair(10_000);
        let amp = amplifier_coeffs(&g, 10, 5, 11).unwrap();
        let small = ModuliConfig::new(20.0, &amp).unwrap();
        assert!(matches!(
            circle_decomposition_check(&f, &g, 55.0, &amp, &small, &default_u(), &default_v()),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn ap_sum_basic() {
        let (f, g) = pair(600);
        let full = ap_constrained_sum(&f, &g, 200.0, 200.0, 1, 1, 1, 0.0, 0.0).unwrap();
        let fs: f64 = (1..=200).map(|n| f.lambda(n).abs()).sum();
        let gs: f64 = (1..=200).map(|n| g.lambda(n).abs()).sum();
        assert!((full.value - fs * gs).abs() < 1e-9 * full.value);
        assert_eq!(ap_constrained_sum(&f, &g, 0.5, 200.0, 1, 1, 7, 0.0, 0.0).unwrap().value, 0.0);
        assert!(ap_constrained_sum(&f, &g, 200.0, 200.0, 7, 1, 7, 0.0, 0.0).is_err());
        let seven = ap_constrained_sum(&f, &g, 200.0, 200.0, 1, 1, 7, 0.0, 0.0).unwrap();
        assert!(seven.margin <= seven.constant.unwrap());
    }

    #[test]
    fn pv_rejects_pole() {
        let (f, _) = pair(300);
        assert!(pv_experiment(&f, &f, &[55.0], &default_u()).is_err());
    }

    #[test]
    fn lvalue_schemes_agree() {
        let (f, g) = pair(3300);
        let half = Complex64::new(0.5, 0.0);
        let a = lvalue_estimate(
            &f,
            &g,
            &LValueRequest {
                s: half,
                x_cut: 3300,
                scheme: Scheme::GammaOnly,
            },
        )
        .unwrap();
        let b = lvalue_estimate(
            &f,
            &g,
            &LValueRequest {
                s: half,
                x_cut: 3300,
                scheme: Scheme::Gaussian,
            },
        )
        .unwrap();
        assert!((a.value - b.value).norm() <= 1e-4 * a.value.norm(), "{a:?} {b:?}");
        assert_eq!(a.quotient, Complex64::new(0.0, 0.0));
        assert!(lvalue_estimate(
            &f,
            &g,
            &LValueRequest {
                s: half,
                x_cut: 50,
                scheme: Scheme::Gaussian
            }
        )
        .is_err());
        let off = LValueRequest {
            s: Complex64::new(0.6, 0.0),
            x_cut: 3300,
            scheme: Scheme::Gaussian,
        };
        assert!(lvalue_estimate(&f, &g, &off).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn ap_sum_oracle(c in 2u64..40, x in 1usize..300, y in 1usize..300, al in 0.0f64..0.5) {
            let (f, g) = pair(300);
            prop_assume!(gcd(3, c) == 1);
            let direct = ap_constrained_sum(&f, &g, x as f64, y as f64, 1, 3, c, al, 0.25).unwrap().value;
            let classes = ap_sum_by_classes(&f, &g, x, y, 1, 3, c, al, 0.25).unwrap();
            prop_assert!((direct - classes).abs() <= 1e-10 * (1.0 + direct));
        }

        #[test]
        fn lvalue_conjugate_symmetry(t in 0.5f64..6.0) {
            let (f, g) = pair(3300);
            let s = Complex64::new(0.5, t);
            let a = lvalue_estimate(&f, &g, &LValueRequest { s, x_cut: 3300, scheme: Scheme::Gaussian }).unwrap();
            let b = lvalue_estimate(&f, &g, &LValueRequest { s: s.conj(), x_cut: 3300, scheme: Scheme::Gaussian }).unwrap();
            prop_assert!((a.value - b.value.conj()).norm() <= 1e-9 * (1.0 + a.value.norm()));
        }
    }
}
