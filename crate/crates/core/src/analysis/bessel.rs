//! Bessel functions of the first kind of integer order.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MAX_ORDER: u32 = 64;
pub const MAX_ARGUMENT: f64 = 1e6;

const SERIES_LIMIT: f64 = 5.0;

/// `J_n(x)` for `0 <= n <= 64`, `0 <= x <= 1e6`.
///
/// Absolute error is about `1e-13` for `x <= 1e3` and `1e-10` beyond.
pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    if n > MAX_ORDER {
        return Err(Error::arg(format!("Bessel order {n} exceeds {MAX_ORDER}")));
    }
    if !(x.is_finite() && (0.0..=MAX_ARGUMENT).contains(&x)) {
        return Err(Error::arg(format!("Bessel argument {x} outside [0, {MAX_ARGUMENT}]")));
    }
    Ok(bessel_j_unchecked(n, x))
}

pub(crate) fn bessel_j_unchecked(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let nf = n as f64;
    if x <= SERIES_LIMIT {
        series(n, x)
    } else if x <= 25.0 + nf * nf / 2.0 {
        miller(n, x)
    } else {
        hankel(n, x)
    }
}

fn series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for i in 1..=n {
        term *= half / i as f64;
    }
    if term == 0.0 {
        return 0.0;
    }
    let q = -half * half;
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + n as f64));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        k += 1.0;
    }
    sum
}

fn miller(n: u32, x: f64) -> f64 {
    let start = (n as f64).max(x) + 30.0 + 14.0 * x.cbrt();
    let mut m = start.ceil() as usize;
    if m % 2 == 1 {
        m += 1;
    }
    let mut next = 0.0; // j_{k+1}
    let mut cur = 1e-30; // j_k
    let mut norm = 0.0;
    let mut wanted = 0.0;
    let mut k = m;
    loop {
        if k == n as usize {
            wanted = cur;
        }
        if k == 0 {
            norm += cur;
            break;
        }
        if k.is_multiple_of(2) {
            norm += 2.0 * cur;
        }
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
    }
    wanted / norm
}

fn hankel(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n as f64) * (n as f64);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut k = 1;
    loop {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        let signed = if (k / 2) % 2 == 0 { term } else { -term };
        if k % 2 == 1 {
            q += signed;
        } else {
            p += signed;
        }
        if term.abs() < 1e-17 || k > 400 {
            break;
        }
        k += 1;
    }
    // chi = x - (2n + 1) pi / 4, expanded so that x itself is reduced by the libm routines
    let phase = ((2 * n + 1) % 8) as f64 * PI / 4.0;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}
