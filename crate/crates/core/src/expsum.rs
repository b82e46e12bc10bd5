//! Exact integer arithmetic and complete exponential sums.
//!
//! Factorization is deterministic: trial division up to [`TRIAL_DIVISION_LIMIT`],
//! then Pollard rho (Brent variant) with a fixed seed sequence. Moduli at this
//! scale never exceed 2^63, so 128-bit products are enough for every modular
//! multiplication.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::One;

use crate::accum::{unit_root, ComplexSum};
use crate::error::{Error, Result};

pub const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;
pub const MAX_FACTOR_INPUT: u64 = 1 << 63;

/// Imaginary part allowed before a provably real or integral sum is flagged.
pub const IMAG_TOLERANCE: f64 = 1e-9;
/// Distance to the nearest integer allowed for a provably integral sum.
pub const ROUNDING_TOLERANCE: f64 = 1e-6;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i(a: i64, b: i64) -> u64 {
    gcd(a.unsigned_abs(), b.unsigned_abs())
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`. Returns 0 for `m = 1`.
pub fn mod_inverse(a: i128, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let m_i = m as i128;
    let (mut old_r, mut r) = (a.rem_euclid(m_i), m_i);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m_i) as u64)
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the first twelve prime bases are exact below 3.3e24.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    // fixed seed sequence keeps factorization reproducible
    for c in 1..u64::MAX {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let mut g = 1;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let steps = 128.min(r - k);
                for _ in 0..steps {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += steps;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("pollard rho exhausted its seeds")
}

/// Prime factorization `n = prod p^e`, primes strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::arg("factorize: n must be positive"));
    }
    if n > MAX_FACTOR_INPUT {
        return Err(Error::arg(format!("factorize: {n} exceeds 2^63")));
    }
    let mut primes = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p <= TRIAL_DIVISION_LIMIT && p * p <= m {
        while m.is_multiple_of(p) {
            primes.push(p);
            m /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        let mut stack = vec![m];
        while let Some(x) = stack.pop() {
            if x == 1 {
                continue;
            }
            if is_prime(x) {
                primes.push(x);
            } else {
                let d = pollard_brent(x);
                stack.push(d);
                stack.push(x / d);
            }
        }
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match factors.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => factors.push((q, 1)),
        }
    }
    Ok(Factorization { n, factors })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultFn {
    Mobius,
    EulerPhi,
    DivisorCount,
    /// sigma_k(n) = sum of d^k over divisors d.
    Sigma(u32),
}

pub fn mult_fn(kind: MultFn, n: u64) -> Result<BigInt> {
    let f = factorize(n)?;
    Ok(match kind {
        MultFn::Mobius => BigInt::from(mobius_of(&f)),
        MultFn::EulerPhi => BigInt::from(euler_phi_of(&f)),
        MultFn::DivisorCount => BigInt::from(divisor_count_of(&f)),
        MultFn::Sigma(k) => {
            let mut acc = BigInt::one();
            for &(p, e) in &f.factors {
                let pk = BigInt::from(p).pow(k);
                let mut term = BigInt::one();
                let mut local = BigInt::one();
                for _ in 0..e {
                    term *= &pk;
                    local += &term;
                }
                acc *= local;
            }
            acc
        }
    })
}

fn mobius_of(f: &Factorization) -> i64 {
    if f.is_squarefree() {
        if f.factors.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    } else {
        0
    }
}

fn euler_phi_of(f: &Factorization) -> u64 {
    f.factors.iter().map(|&(p, e)| (p - 1) * p.pow(e - 1)).product()
}

fn divisor_count_of(f: &Factorization) -> u64 {
    f.factors.iter().map(|&(_, e)| e as u64 + 1).product()
}

pub fn mobius(n: u64) -> Result<i64> {
    Ok(mobius_of(&factorize(n)?))
}

pub fn euler_phi(n: u64) -> Result<u64> {
    Ok(euler_phi_of(&factorize(n)?))
}

pub fn divisor_count(n: u64) -> Result<u64> {
    Ok(divisor_count_of(&factorize(n)?))
}

/// Sieve of d(n) for 0 <= n <= limit (entry 0 unused).
pub fn divisor_count_table(limit: usize) -> Vec<u32> {
    let mut d = vec![0u32; limit + 1];
    for i in 1..=limit {
        for j in (i..=limit).step_by(i) {
            d[j] += 1;
        }
    }
    d
}

pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumMode {
    /// Divisor identity in exact integer arithmetic.
    Formula,
    /// Direct sum of additive characters with a rounding check.
    Brute,
}

/// Ramanujan sum over reduced residues `a mod q` of `e(an/q)`.
pub fn ramanujan_sum(q: u64, n: i64, mode: SumMode) -> Result<i64> {
    if q == 0 {
        return Err(Error::arg("ramanujan_sum: q must be positive"));
    }
    match mode {
        SumMode::Formula => {
            let g = gcd(q, n.unsigned_abs());
            let g = if n == 0 { q } else { g };
            let gf = factorize(g)?;
            let mut total = 0i64;
            for d in gf.divisors() {
                total += mobius(q / d)? * d as i64;
            }
            Ok(total)
        }
        SumMode::Brute => {
            let mut acc = ComplexSum::new();
            let n_red = n.rem_euclid(q as i64) as i128;
            for a in 1..=q {
                if gcd(a, q) == 1 {
                    acc.add(unit_root(a as i128 * n_red, q));
                }
            }
            round_integral(acc.value(), "ramanujan_sum")
        }
    }
}

fn round_integral(z: Complex64, what: &'static str) -> Result<i64> {
    if z.im.abs() > IMAG_TOLERANCE {
        return Err(Error::Residual {
            what,
            residual: z.im.abs(),
            limit: IMAG_TOLERANCE,
        });
    }
    let r = z.re.round();
    let residual = (z.re - r).abs();
    if residual > ROUNDING_TOLERANCE {
        return Err(Error::Residual {
            what,
            residual,
            limit: ROUNDING_TOLERANCE,
        });
    }
    Ok(r as i64)
}

/// Kloosterman sum S(m, n; c) as a complex number.
///
/// Phases `(alpha m + alpha_bar n) mod c` are formed exactly in integers before
/// the unit-circle evaluation.
pub fn kloosterman_sum(m: i64, n: i64, c: u64) -> Result<Complex64> {
    if c == 0 {
        return Err(Error::arg("kloosterman_sum: c must be positive"));
    }
    let ci = c as i128;
    let (mr, nr) = ((m as i128).rem_euclid(ci), (n as i128).rem_euclid(ci));
    let mut acc = ComplexSum::new();
    for alpha in 1..=c {
        if let Some(inv) = mod_inverse(alpha as i128, c) {
            let phase = (alpha as i128 * mr + inv as i128 * nr) % ci;
            acc.add(unit_root(phase, c));
        }
    }
    Ok(acc.value())
}

/// Real Kloosterman sum; the imaginary part must vanish up to `1e-9 * phi(c)`.
pub fn kloosterman_real(m: i64, n: i64, c: u64) -> Result<f64> {
    let z = kloosterman_sum(m, n, c)?;
    let limit = IMAG_TOLERANCE * euler_phi(c)? as f64;
    if z.im.abs() > limit {
        return Err(Error::Residual {
            what: "kloosterman_sum",
            residual: z.im.abs(),
            limit,
        });
    }
    Ok(z.re)
}

fn gcd3(m: i64, n: i64, c: u64) -> u64 {
    gcd(gcd(m.unsigned_abs(), n.unsigned_abs()), c)
}

/// |S(m,n;c)| / (d(c) gcd(m,n,c)^{1/2} c^{1/2}) for squarefree c.
pub fn weil_margin(m: i64, n: i64, c: u64) -> Result<f64> {
    let f = factorize(c)?;
    if !f.is_squarefree() {
        return Err(Error::NotSquarefree(c));
    }
    let s = kloosterman_real(m, n, c)?;
    let g = gcd3(m, n, c) as f64;
    let bound = divisor_count_of(&f) as f64 * g.sqrt() * (c as f64).sqrt();
    Ok(s.abs() / bound)
}

/// Both sides of the twisted multiplicativity
/// `S(m,n;c1 c2) = S(m c2bar^2, n; c1) S(m c1bar^2, n; c2)` for coprime moduli.
pub fn kloosterman_crt_sides(m: i64, n: i64, c1: u64, c2: u64) -> Result<(Complex64, Complex64)> {
    if gcd(c1, c2) != 1 {
        return Err(Error::arg(format!("moduli {c1} and {c2} are not coprime")));
    }
    let lhs = kloosterman_sum(m, n, c1 * c2)?;
    let c2_inv = mod_inverse(c2 as i128, c1).expect("coprime") as i128;
    let c1_inv = mod_inverse(c1 as i128, c2).expect("coprime") as i128;
    let m1 = (m as i128 * c2_inv % c1 as i128 * c2_inv).rem_euclid(c1 as i128) as i64;
    let m2 = (m as i128 * c1_inv % c2 as i128 * c1_inv).rem_euclid(c2 as i128) as i64;
    let rhs = kloosterman_sum(m1, n, c1)? * kloosterman_sum(m2, n, c2)?;
    Ok((lhs, rhs))
}

/// Number of mismatches between formula and brute-force Ramanujan sums
/// for `1 <= q <= qmax`, `|n| <= nmax`.
pub fn ramanujan_mismatches(qmax: u64, nmax: i64) -> Result<Vec<(u64, i64, i64, i64)>> {
    let mut bad = Vec::new();
    for q in 1..=qmax {
        for n in -nmax..=nmax {
            let f = ramanujan_sum(q, n, SumMode::Formula)?;
            let b = ramanujan_sum(q, n, SumMode::Brute)?;
            if f != b {
                bad.push((q, n, f, b));
            }
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_division(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    fn brute_mobius(n: u64) -> i64 {
        let f = trial_division(n);
        if f.iter().any(|&(_, e)| e > 1) {
            0
        } else if f.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().factors.is_empty());
        assert_eq!(factorize(12).unwrap().factors, vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(2_147_483_647).unwrap().factors, trial_division(2_147_483_647));
        assert_eq!(factorize(2_147_483_647).unwrap().factors, vec![(2_147_483_647, 1)]);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factorize_large_semiprime_uses_rho() {
        // 1000003 * 1000033, both above the trial-division limit
        let n = 1_000_003u64 * 1_000_033;
        assert_eq!(factorize(n).unwrap().factors, vec![(1_000_003, 1), (1_000_033, 1)]);
        let n = (1u64 << 63) - 25; // 9223372036854775783 is prime
        assert_eq!(factorize(n).unwrap().factors, vec![(n, 1)]);
    }

    #[test]
    fn multiplicative_function_examples() {
        assert_eq!(mobius(4).unwrap(), 0);
        assert_eq!(mobius(6).unwrap(), brute_mobius(6));
        assert_eq!(mobius(6).unwrap(), 1);
        assert_eq!(divisor_count(12).unwrap(), 6);
        assert_eq!(euler_phi(12).unwrap(), 4);
        assert_eq!(mult_fn(MultFn::Sigma(1), 12).unwrap(), BigInt::from(28));
        assert_eq!(mult_fn(MultFn::Sigma(0), 12).unwrap(), BigInt::from(6));
    }

    #[test]
    fn ramanujan_examples() {
        for n in [-5, 0, 7] {
            assert_eq!(ramanujan_sum(1, n, SumMode::Formula).unwrap(), 1);
            assert_eq!(ramanujan_sum(1, n, SumMode::Brute).unwrap(), 1);
        }
        assert_eq!(ramanujan_sum(6, 3, SumMode::Brute).unwrap(), -2);
        assert_eq!(ramanujan_sum(6, 3, SumMode::Formula).unwrap(), -2);
        assert_eq!(ramanujan_sum(4, 2, SumMode::Brute).unwrap(), -2);
        assert_eq!(ramanujan_sum(4, 2, SumMode::Formula).unwrap(), -2);
        assert!(ramanujan_sum(0, 1, SumMode::Formula).is_err());
    }

    #[test]
    fn kloosterman_examples() {
        let s = kloosterman_sum(1, 1, 3).unwrap();
        assert!((s.re + 1.0).abs() < 1e-12 && s.im.abs() < 1e-12);
        let s = kloosterman_sum(1, 1, 1).unwrap();
        assert!((s.re - 1.0).abs() < 1e-12);
        for c in 1..40u64 {
            for m in -3..6 {
                let s = kloosterman_real(m, 0, c).unwrap();
                let r = ramanujan_sum(c, m, SumMode::Formula).unwrap();
                assert!((s - r as f64).abs() < 1e-9, "S({m},0,{c})");
            }
        }
    }

    #[test]
    fn weil_margin_examples() {
        assert!((weil_margin(1, 1, 3).unwrap() - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-12);
        assert!((weil_margin(1, 1, 2).unwrap() - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-12);
        for c in [1u64, 2, 6, 30, 210] {
            let expect = euler_phi(c).unwrap() as f64 / (divisor_count(c).unwrap() as f64 * c as f64);
            assert!((weil_margin(0, 0, c).unwrap() - expect).abs() < 1e-12);
        }
        assert!(matches!(weil_margin(1, 1, 4), Err(Error::NotSquarefree(4))));
    }

    #[test]
    fn crt_identity_small() {
        for (c1, c2) in [(3u64, 5u64), (7, 8), (9, 10)] {
            for m in 1..4 {
                for n in 1..4 {
                    let (l, r) = kloosterman_crt_sides(m, n, c1, c2).unwrap();
                    assert!((l - r).norm() < 1e-9);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn factorization_invariants(n in 1u64..5_000_000_000_000) {
            let f = factorize(n).unwrap();
            let mut prod = 1u64;
            let mut prev = 1u64;
            for &(p, e) in &f.factors {
                prop_assert!(p > prev);
                prop_assert!(is_prime(p));
                prod *= p.pow(e);
                prev = p;
            }
            prop_assert_eq!(prod, n);
        }

        #[test]
        fn ramanujan_periodic_and_phi_at_zero(q in 1u64..200, n in -500i64..500) {
            let a = ramanujan_sum(q, n, SumMode::Formula).unwrap();
            let b = ramanujan_sum(q, n.rem_euclid(q as i64), SumMode::Formula).unwrap();
            prop_assert_eq!(a, b);
            prop_assert_eq!(ramanujan_sum(q, 0, SumMode::Formula).unwrap(), euler_phi(q).unwrap() as i64);
        }

        #[test]
        fn mobius_matches_trial_division(n in 1u64..100_000) {
            prop_assert_eq!(mobius(n).unwrap(), brute_mobius(n));
        }
    }
}
