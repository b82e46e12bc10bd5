//! Exact Fourier coefficients and normalized Hecke eigenvalues of holomorphic
//! newforms with trivial nebentypus.
//!
//! Two independent coefficient sources exist: eta-quotient expansions (exact
//! integer power series) and point counting on an elliptic curve. The level-11
//! catalog form carries both, and table construction cross-checks them.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::expsum::{divisor_count_table, gcd, is_prime, primes_up_to};

/// Largest expansion length accepted by [`eta_product_coeffs`].
pub const EXPANSION_CAP: usize = 1_000_000;

/// Primes up to this bound are cross-checked against point counts by default.
pub const DEFAULT_CROSS_CHECK_LIMIT: u64 = 10_000;

const HECKE_TOLERANCE: f64 = 1e-10;

/// Weierstrass coefficients `[a1, a2, a3, a4, a6]`.
pub type Weierstrass = [i64; 5];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoefficientSource {
    /// `prod eta(m_i tau)^{e_i}` as `(m_i, e_i)` pairs.
    EtaProduct(Vec<(u32, i32)>),
    EllipticCurve(Weierstrass),
    /// Coefficients read from a cache file with no known generator.
    Cached,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewformSpec {
    pub label: String,
    pub level: u64,
    pub weight: u32,
    pub source: CoefficientSource,
    /// Elliptic curve whose `a_p` must match the primary source.
    pub cross_check: Option<Weierstrass>,
}

impl NewformSpec {
    pub fn validate(&self) -> Result<()> {
        if self.level == 0 {
            return Err(Error::arg("level must be positive"));
        }
        if self.weight < 2 || !self.weight.is_multiple_of(2) {
            return Err(Error::arg(format!("weight {} is not an even integer >= 2", self.weight)));
        }
        match &self.source {
            CoefficientSource::EtaProduct(factors) => {
                if factors.is_empty() {
                    return Err(Error::arg("empty eta product"));
                }
                let total: i64 = factors.iter().map(|&(_, e)| e as i64).sum();
                if total != 2 * self.weight as i64 {
                    return Err(Error::arg(format!(
                        "eta exponents sum to {total}, weight {} needs {}",
                        self.weight,
                        2 * self.weight
                    )));
                }
                for &(m, _) in factors {
                    if m == 0 || !self.level.is_multiple_of(m as u64) {
                        return Err(Error::arg(format!("eta scale {m} does not divide level {}", self.level)));
                    }
                }
                let order: i64 = factors.iter().map(|&(m, e)| m as i64 * e as i64).sum();
                if order != 24 {
                    return Err(Error::arg(format!(
                        "eta product starts at q^({order}/24); a normalized newform needs q^1"
                    )));
                }
            }
            CoefficientSource::EllipticCurve(_) => {
                if self.weight != 2 {
                    return Err(Error::arg("elliptic-curve sources have weight 2"));
                }
            }
            CoefficientSource::Cached => {}
        }
        if self.cross_check.is_some() && self.weight != 2 {
            return Err(Error::arg("elliptic cross-check needs weight 2"));
        }
        Ok(())
    }
}

/// The three shipped forms: Delta (level 1, weight 12), eta(z)^2 eta(11z)^2
/// (level 11, weight 2) and eta(z)^4 eta(5z)^4 (level 5, weight 4).
pub fn catalog() -> Vec<NewformSpec> {
    vec![
        NewformSpec {
            label: "delta".into(),
            level: 1,
            weight: 12,
            source: CoefficientSource::EtaProduct(vec![(1, 24)]),
            cross_check: None,
        },
        NewformSpec {
            label: "level11".into(),
            level: 11,
            weight: 2,
            source: CoefficientSource::EtaProduct(vec![(1, 2), (11, 2)]),
            cross_check: Some(CURVE_11A),
        },
        NewformSpec {
            label: "level5".into(),
            level: 5,
            weight: 4,
            source: CoefficientSource::EtaProduct(vec![(1, 4), (5, 4)]),
            cross_check: None,
        },
    ]
}

/// y^2 + y = x^3 - x^2 - 10x - 20, conductor 11.
pub const CURVE_11A: Weierstrass = [0, -1, 1, -10, -20];

pub fn lookup(label: &str) -> Option<NewformSpec> {
    let canonical = match label {
        "Delta" | "tau" | "1.12" => "delta",
        "11" | "11a" | "11.2" => "level11",
        "5" | "5.4" => "level5",
        other => other,
    };
    catalog().into_iter().find(|s| s.label == canonical)
}

// --- eta products -----------------------------------------------------------

/// Sparse series `sum c_j q^{e_j}` with `e_0 = 0`, `c_0 = 1`, exponents increasing.
struct Sparse(Vec<(usize, i128)>);

impl Sparse {
    /// prod (1 - q^{mk}) via the pentagonal number theorem.
    fn euler(m: usize, len: usize) -> Self {
        let mut terms = vec![(0usize, 1i128)];
        for k in 1i64.. {
            let g1 = (k * (3 * k - 1) / 2) as usize * m;
            let g2 = (k * (3 * k + 1) / 2) as usize * m;
            if g1 >= len {
                break;
            }
            let sign = if k % 2 == 0 { 1 } else { -1 };
            terms.push((g1, sign));
            if g2 < len {
                terms.push((g2, sign));
            }
        }
        terms.sort_unstable_by_key(|t| t.0);
        Sparse(terms)
    }

    /// prod (1 - q^{mk})^3 via Jacobi's identity.
    fn euler_cubed(m: usize, len: usize) -> Self {
        let mut terms = Vec::new();
        for k in 0i64.. {
            let g = (k * (k + 1) / 2) as usize * m;
            if g >= len {
                break;
            }
            let sign = if k % 2 == 0 { 1 } else { -1 };
            terms.push((g, sign * (2 * k as i128 + 1)));
        }
        Sparse(terms)
    }

    fn mul_into(&self, series: &mut [i128]) -> Result<()> {
        for n in (0..series.len()).rev() {
            let mut acc: i128 = 0;
            for &(e, c) in &self.0 {
                if e > n {
                    break;
                }
                let t = c.checked_mul(series[n - e]).ok_or(Error::Overflow("expanding eta product"))?;
                acc = acc.checked_add(t).ok_or(Error::Overflow("expanding eta product"))?;
            }
            series[n] = acc;
        }
        Ok(())
    }

    fn div_into(&self, series: &mut [i128]) -> Result<()> {
        for n in 0..series.len() {
            let mut acc = series[n];
            for &(e, c) in self.0.iter().skip(1) {
                if e > n {
                    break;
                }
                let t = c.checked_mul(series[n - e]).ok_or(Error::Overflow("inverting eta product"))?;
                acc = acc.checked_sub(t).ok_or(Error::Overflow("inverting eta product"))?;
            }
            series[n] = acc;
        }
        Ok(())
    }
}

/// Exact coefficients `a(1..=n)` of an eta-product newform; entry 0 is zero.
pub fn eta_product_coeffs(spec: &NewformSpec, n: usize) -> Result<Vec<BigInt>> {
    let CoefficientSource::EtaProduct(factors) = &spec.source else {
        return Err(Error::arg(format!("{} has no eta-product source", spec.label)));
    };
    spec.validate()?;
    if n > EXPANSION_CAP {
        return Err(Error::arg(format!("expansion length {n} exceeds cap {EXPANSION_CAP}")));
    }
    // a(k) is the coefficient of q^{k-1} in prod_i prod_j (1 - q^{m_i j})^{e_i}
    let mut series = vec![0i128; n];
    if n > 0 {
        series[0] = 1;
    }
    for &(m, e) in factors {
        let m = m as usize;
        let cubes = e.unsigned_abs() / 3;
        let singles = e.unsigned_abs() % 3;
        let cubed = Sparse::euler_cubed(m, n);
        let single = Sparse::euler(m, n);
        for _ in 0..cubes {
            if e > 0 {
                cubed.mul_into(&mut series)?;
            } else {
                cubed.div_into(&mut series)?;
            }
        }
        for _ in 0..singles {
            if e > 0 {
                single.mul_into(&mut series)?;
            } else {
                single.div_into(&mut series)?;
            }
        }
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(BigInt::zero());
    out.extend(series.into_iter().map(BigInt::from));
    Ok(out)
}

// --- elliptic curves --------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduction {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
}

struct Invariants {
    c4: i128,
    disc: i128,
}

fn invariants(c: &Weierstrass) -> Invariants {
    let [a1, a2, a3, a4, a6] = c.map(|x| x as i128);
    let b2 = a1 * a1 + 4 * a2;
    let b4 = 2 * a4 + a1 * a3;
    let b6 = a3 * a3 + 4 * a6;
    let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    Invariants {
        c4: b2 * b2 - 24 * b4,
        disc: -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6,
    }
}

pub fn discriminant(curve: &Weierstrass) -> i128 {
    invariants(curve).disc
}

fn reduce(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

/// Projective point count #E(F_p), including the singular point if any.
pub fn count_points(curve: &Weierstrass, p: u64) -> u64 {
    let [a1, a2, a3, a4, a6] = curve.map(|x| reduce(x, p));
    let pm = |a: u64, b: u64| a * b % p;
    let cubic = |x: u64| (pm(pm(x, x), x) + pm(a2, pm(x, x)) + pm(a4, x) + a6) % p;
    let mut count = 1; // point at infinity
    if p == 2 {
        for x in 0..p {
            for y in 0..p {
                let lhs = (pm(y, y) + pm(a1, pm(x, y)) + pm(a3, y)) % p;
                if lhs == cubic(x) {
                    count += 1;
                }
            }
        }
        return count;
    }
    // (2y + a1 x + a3)^2 = 4 cubic(x) + (a1 x + a3)^2
    let mut squares = vec![0u64; p as usize];
    for z in 0..p {
        squares[pm(z, z) as usize] += 1;
    }
    for x in 0..p {
        let t = (pm(a1, x) + a3) % p;
        let d = (4 * cubic(x) + pm(t, t)) % p;
        count += squares[d as usize];
    }
    count
}

fn reduction_type(curve: &Weierstrass, p: u64) -> Result<Reduction> {
    let inv = invariants(curve);
    let pi = p as i128;
    if inv.disc.rem_euclid(pi) != 0 {
        return Ok(Reduction::Good);
    }
    if inv.c4.rem_euclid(pi) == 0 {
        return Err(Error::AdditiveReduction(p));
    }
    let [a1, a2, a3, a4, a6] = curve.map(|x| reduce(x, p) as i128);
    let md = |v: i128| v.rem_euclid(pi);
    let mut singular = None;
    'search: for x in 0..pi {
        for y in 0..pi {
            let f = md(y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6);
            let fx = md(a1 * y - 3 * x * x - 2 * a2 * x - a4);
            let fy = md(2 * y + a1 * x + a3);
            if f == 0 && fx == 0 && fy == 0 {
                singular = Some(x);
                break 'search;
            }
        }
    }
    let x0 = singular.ok_or_else(|| Error::arg(format!("no singular point found mod {p}")))?;
    // tangent slopes at the node: m^2 + a1 m - (3 x0 + a2) = 0
    let roots = (0..pi).filter(|&m| md(m * m + a1 * m - 3 * x0 - a2) == 0).count();
    match roots {
        2 => Ok(Reduction::SplitMultiplicative),
        0 => Ok(Reduction::NonsplitMultiplicative),
        _ => Err(Error::AdditiveReduction(p)),
    }
}

/// Trace of Frobenius a_p for good or multiplicative reduction.
pub fn ellcurve_ap(curve: &Weierstrass, p: u64) -> Result<i64> {
    if !is_prime(p) {
        return Err(Error::arg(format!("{p} is not prime")));
    }
    let counted = p as i64 + 1 - count_points(curve, p) as i64;
    match reduction_type(curve, p)? {
        Reduction::Good => Ok(counted),
        kind => {
            let ap = if kind == Reduction::SplitMultiplicative { 1 } else { -1 };
            if ap != counted {
                return Err(Error::SourceMismatch {
                    n: p,
                    detail: format!("node slopes give {ap}, point count gives {counted}"),
                });
            }
            Ok(ap)
        }
    }
}

/// Coefficients from prime values via Hecke recursion and multiplicativity.
fn extend_from_primes(prime_values: &BTreeMap<u64, BigInt>, level: u64, weight: u32, n: usize) -> Vec<BigInt> {
    let mut a = vec![BigInt::zero(); n + 1];
    if n == 0 {
        return a;
    }
    a[1] = BigInt::one();
    // smallest prime factor sieve
    let mut spf = vec![0usize; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    for m in 2..=n {
        let p = spf[m];
        let mut pk = p;
        let mut k = 1u32;
        while m % (pk * p) == 0 {
            pk *= p;
            k += 1;
        }
        if pk == m {
            let ap = &prime_values[&(p as u64)];
            if k == 1 {
                a[m] = ap.clone();
            } else if level.is_multiple_of(p as u64) {
                a[m] = ap * &a[m / p];
            } else {
                let pw = BigInt::from(p).pow(weight - 1);
                a[m] = ap * &a[m / p] - pw * &a[m / (p * p)];
            }
        } else {
            a[m] = &a[pk] * &a[m / pk];
        }
    }
    a
}

/// Coefficients of the newform attached to an elliptic curve source.
pub fn ellcurve_coeffs(curve: &Weierstrass, level: u64, n: usize) -> Result<Vec<BigInt>> {
    let mut primes = BTreeMap::new();
    for p in primes_up_to(n as u64) {
        primes.insert(p, BigInt::from(ellcurve_ap(curve, p)?));
    }
    Ok(extend_from_primes(&primes, level, 2, n))
}

// --- eigenvalue tables ------------------------------------------------------

#[derive(Clone, Debug)]
pub struct EigenvalueTable {
    pub spec: NewformSpec,
    a: Vec<BigInt>,
    lambda: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub cross_check_limit: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            cross_check_limit: DEFAULT_CROSS_CHECK_LIMIT,
        }
    }
}

pub fn build_table(spec: &NewformSpec, n: usize) -> Result<EigenvalueTable> {
    build_table_with(spec, n, BuildOptions::default())
}

pub fn build_table_with(spec: &NewformSpec, n: usize, opts: BuildOptions) -> Result<EigenvalueTable> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::arg("table length must be positive"));
    }
    let a = match &spec.source {
        CoefficientSource::EtaProduct(_) => eta_product_coeffs(spec, n)?,
        CoefficientSource::EllipticCurve(curve) => ellcurve_coeffs(curve, spec.level, n)?,
        CoefficientSource::Cached => return Err(Error::arg(format!("{} has no generator; load it from cache", spec.label))),
    };
    if let Some(curve) = &spec.cross_check {
        for p in primes_up_to((n as u64).min(opts.cross_check_limit)) {
            let ap = ellcurve_ap(curve, p)?;
            if a[p as usize] != BigInt::from(ap) {
                return Err(Error::SourceMismatch {
                    n: p,
                    detail: format!("primary source gives {}, point count gives {ap}", a[p as usize]),
                });
            }
        }
    }
    EigenvalueTable::from_coefficients(spec.clone(), a)
}

impl EigenvalueTable {
    /// Wrap exact coefficients (`a[0]` ignored) and validate the table invariants.
    pub fn from_coefficients(spec: NewformSpec, mut a: Vec<BigInt>) -> Result<Self> {
        if a.len() < 2 {
            return Err(Error::arg("table needs at least a(1)"));
        }
        a[0] = BigInt::zero();
        let half = (spec.weight as f64 - 1.0) / 2.0;
        let lambda = a
            .iter()
            .enumerate()
            .map(|(n, c)| {
                if n == 0 {
                    0.0
                } else {
                    c.to_f64().unwrap_or(f64::NAN) / (n as f64).powf(half)
                }
            })
            .collect();
        let table = Self { spec, a, lambda };
        table.validate().map_err(|(n, msg)| Error::Invariant {
            line: None,
            msg: format!("{} at n = {n}: {msg}", table.spec.label),
        })?;
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.a.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn level(&self) -> u64 {
        self.spec.level
    }

    pub fn weight(&self) -> u32 {
        self.spec.weight
    }

    pub fn label(&self) -> &str {
        &self.spec.label
    }

    /// Normalized eigenvalue; panics outside `1..=len`.
    #[inline]
    pub fn lambda(&self, n: usize) -> f64 {
        assert!(n >= 1, "lambda(0) is undefined");
        self.lambda[n]
    }

    /// Slice indexed by n (entry 0 is 0).
    pub fn lambdas(&self) -> &[f64] {
        &self.lambda
    }

    pub fn coefficient(&self, n: usize) -> &BigInt {
        &self.a[n]
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.a
    }

    pub fn ensure_covers(&self, n: usize) -> Result<()> {
        if n > self.len() {
            return Err(Error::TableRange {
                required: n,
                available: self.len(),
            });
        }
        Ok(())
    }

    fn validate(&self) -> std::result::Result<(), (usize, String)> {
        let n_max = self.len();
        if !self.a[1].is_one() {
            return Err((1, format!("a(1) = {} != 1", self.a[1])));
        }
        let level = self.spec.level;
        // exact multiplicativity on coprime pairs up to sqrt(N)
        let root = (n_max as f64).sqrt() as usize;
        for m in 2..=root {
            for k in (m + 1)..=root {
                if m * k > n_max || gcd(m as u64, k as u64) != 1 {
                    continue;
                }
                if self.a[m * k] != &self.a[m] * &self.a[k] {
                    return Err((m * k, format!("a({}) != a({m}) a({k})", m * k)));
                }
            }
        }
        // Hecke recursion along prime powers
        for p in primes_up_to(n_max as u64) {
            let p = p as usize;
            let lp = self.lambda[p];
            let (mut prev, mut cur) = (1.0, lp);
            let mut pk = p;
            while let Some(next) = pk.checked_mul(p).filter(|&v| v <= n_max) {
                let expect = if level.is_multiple_of(p as u64) {
                    cur * lp
                } else {
                    lp * cur - prev
                };
                let got = self.lambda[next];
                if (got - expect).abs() > HECKE_TOLERANCE * (1.0 + expect.abs()) {
                    return Err((next, format!("Hecke relation off by {:e}", (got - expect).abs())));
                }
                prev = cur;
                cur = got;
                pk = next;
            }
        }
        // Deligne: |lambda(n)| <= d(n)
        let d = divisor_count_table(n_max);
        for n in 1..=n_max {
            if !self.lambda[n].is_finite() || self.lambda[n].abs() > d[n] as f64 * (1.0 + 1e-12) {
                return Err((n, format!("|lambda| = {} exceeds d(n) = {}", self.lambda[n].abs(), d[n])));
            }
        }
        Ok(())
    }

    /// Largest |lambda(n)| / d(n) over the table.
    pub fn deligne_ratio(&self) -> f64 {
        let d = divisor_count_table(self.len());
        (1..=self.len()).map(|n| self.lambda[n].abs() / d[n] as f64).fold(0.0, f64::max)
    }

    /// Largest residual of `lambda(m) lambda(n) = sum_{d|(m,n),(d,level)=1} lambda(mn/d^2)`
    /// over `1 <= m, n <= bound`.
    pub fn hecke_bilinear_residual(&self, bound: usize) -> Result<f64> {
        self.ensure_covers(bound * bound)?;
        let level = self.spec.level;
        let mut worst: f64 = 0.0;
        for m in 1..=bound {
            for n in m..=bound {
                let g = gcd(m as u64, n as u64) as usize;
                let mut rhs = 0.0;
                for d in 1..=g {
                    if g.is_multiple_of(d) && gcd(d as u64, level) == 1 {
                        rhs += self.lambda[m * n / (d * d)];
                    }
                }
                worst = worst.max((self.lambda[m] * self.lambda[n] - rhs).abs());
            }
        }
        Ok(worst)
    }
}

/// (1/N) sum_{n <= N} |lambda(n)|^2.
pub fn rankin_average(table: &EigenvalueTable, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::arg("rankin_average needs N >= 1"));
    }
    table.ensure_covers(n)?;
    let s = crate::accum::sum_f64((1..=n).map(|k| table.lambda(k).powi(2)));
    Ok(s / n as f64)
}

// --- amplifier --------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct AmplifierConfig {
    pub length: u64,
    pub p: u64,
    pub q: u64,
    /// Primes in [L/2, L] coprime to pq.
    pub primes: Vec<u64>,
    /// Nonzero alpha_r, sorted by r.
    pub alpha: Vec<(u64, f64)>,
}

impl AmplifierConfig {
    pub fn alpha(&self, r: u64) -> f64 {
        self.alpha
            .binary_search_by_key(&r, |&(k, _)| k)
            .map(|i| self.alpha[i].1)
            .unwrap_or(0.0)
    }

    /// The prime l with r = l or r = l^2.
    pub fn prime_of(&self, r: u64) -> Option<u64> {
        self.primes.iter().copied().find(|&l| r == l || r == l * l)
    }

    pub fn max_r(&self) -> u64 {
        self.alpha.last().map(|&(r, _)| r).unwrap_or(0)
    }
}

/// alpha_l = lambda_g(l), alpha_{l^2} = -1 for l in the prime set, zero otherwise.
pub fn amplifier_coeffs(g: &EigenvalueTable, length: u64, p: u64, q: u64) -> Result<AmplifierConfig> {
    if length < 4 {
        return Err(Error::arg("amplifier length L must be at least 4"));
    }
    let primes: Vec<u64> = primes_up_to(length)
        .into_iter()
        .filter(|&l| 2 * l >= length && gcd(l, p * q) == 1)
        .collect();
    if primes.is_empty() {
        return Err(Error::arg(format!(
            "no primes in [{}, {length}] coprime to {}",
            length as f64 / 2.0,
            p * q
        )));
    }
    let top = primes.last().unwrap();
    g.ensure_covers((top * top) as usize)?;
    let mut alpha: Vec<(u64, f64)> = Vec::with_capacity(2 * primes.len());
    for &l in &primes {
        alpha.push((l, g.lambda(l as usize)));
        alpha.push((l * l, -1.0));
    }
    alpha.sort_unstable_by_key(|&(r, _)| r);
    let total: f64 = alpha.iter().map(|&(r, a)| a * g.lambda(r as usize)).sum();
    if (total - primes.len() as f64).abs() > 1e-9 {
        return Err(Error::Invariant {
            line: None,
            msg: format!("sum alpha_r lambda_g(r) = {total}, expected {}", primes.len()),
        });
    }
    Ok(AmplifierConfig {
        length,
        p,
        q,
        primes,
        alpha,
    })
}

// --- coefficient cache ------------------------------------------------------

pub fn cache_file_name(label: &str, n: usize) -> String {
    format!("{label}_{n}.coeffs")
}

pub fn format_cache(table: &EigenvalueTable) -> String {
    let mut out = String::new();
    let s = &table.spec;
    let _ = writeln!(out, "# {},{},{},{}", s.label, s.level, s.weight, table.len());
    for n in 1..=table.len() {
        let _ = writeln!(out, "{},{}", n, table.a[n]);
    }
    out
}

pub fn write_cache(table: &EigenvalueTable, path: &Path) -> Result<()> {
    std::fs::write(path, format_cache(table))?;
    Ok(())
}

pub fn parse_cache(text: &str) -> Result<EigenvalueTable> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty cache file".into(),
    })?;
    let body = header.strip_prefix('#').ok_or(Error::Parse {
        line: 1,
        msg: "header must start with '#'".into(),
    })?;
    let fields: Vec<&str> = body.trim().split(',').map(str::trim).collect();
    if fields.len() != 4 {
        return Err(Error::Parse {
            line: 1,
            msg: "header must be '# label,level,weight,N'".into(),
        });
    }
    let bad = |what: &str| Error::Parse {
        line: 1,
        msg: format!("bad {what} in header"),
    };
    let label = fields[0].to_string();
    let level: u64 = fields[1].parse().map_err(|_| bad("level"))?;
    let weight: u32 = fields[2].parse().map_err(|_| bad("weight"))?;
    let n_max: usize = fields[3].parse().map_err(|_| bad("N"))?;

    let mut a = vec![BigInt::zero(); n_max + 1];
    let mut seen = 0usize;
    for (i, raw) in lines.enumerate() {
        let line = i + 2;
        if raw.trim().is_empty() {
            continue;
        }
        let (n_str, a_str) = raw.split_once(',').ok_or(Error::Parse {
            line,
            msg: "expected 'n,a_n'".into(),
        })?;
        let n: usize = n_str.trim().parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad index '{n_str}'"),
        })?;
        if n != seen + 1 {
            return Err(Error::Parse {
                line,
                msg: format!("expected n = {}, found {n}", seen + 1),
            });
        }
        if n > n_max {
            return Err(Error::Parse {
                line,
                msg: format!("n = {n} beyond header N = {n_max}"),
            });
        }
        a[n] = a_str.trim().parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad coefficient '{a_str}'"),
        })?;
        seen = n;
    }
    if seen != n_max {
        return Err(Error::Parse {
            line: seen + 2,
            msg: format!("file ends at n = {seen}, header promises {n_max}"),
        });
    }
    let spec = match lookup(&label) {
        Some(s) if s.level == level && s.weight == weight => s,
        _ => NewformSpec {
            label,
            level,
            weight,
            source: CoefficientSource::Cached,
            cross_check: None,
        },
    };
    let table = EigenvalueTable::from_coefficients(spec.clone(), a.clone());
    match table {
        Ok(t) => Ok(t),
        Err(Error::Invariant { msg, .. }) => {
            let n = first_index_in(&msg).unwrap_or(0);
            Err(Error::Invariant { line: Some(n + 1), msg })
        }
        Err(e) => Err(e),
    }
}

fn first_index_in(msg: &str) -> Option<usize> {
    let rest = msg.split("at n = ").nth(1)?;
    rest.split(|c: char| !c.is_ascii_digit()).next()?.parse().ok()
}

pub fn load_cache(path: &Path) -> Result<EigenvalueTable> {
    parse_cache(&std::fs::read_to_string(path)?)
}

/// Load, re-validate and, for catalog forms, compare against a fresh expansion.
pub fn verify_cache(path: &Path) -> Result<EigenvalueTable> {
    let table = load_cache(path)?;
    if table.spec.source != CoefficientSource::Cached {
        let fresh = build_table(&table.spec, table.len())?;
        for n in 1..=table.len() {
            if fresh.a[n] != table.a[n] {
                return Err(Error::Invariant {
                    line: Some(n + 1),
                    msg: format!("a({n}) = {} but the generator gives {}", table.a[n], fresh.a[n]),
                });
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsum::{mult_fn, MultFn};

    /// Plain truncated power-series product; independent of the sparse path.
    fn naive_eta(factors: &[(u32, i32)], n: usize) -> Vec<BigInt> {
        let mut series = vec![BigInt::zero(); n];
        series[0] = BigInt::one();
        for &(m, e) in factors {
            assert!(e > 0);
            for _ in 0..e {
                for k in 1.. {
                    let step = k * m as usize;
                    if step >= n {
                        break;
                    }
                    for i in (step..n).rev() {
                        let t = series[i - step].clone();
                        series[i] -= t;
                    }
                }
            }
        }
        let mut out = vec![BigInt::zero()];
        out.extend(series);
        out
    }

    #[test]
    fn delta_first_coefficients() {
        let spec = lookup("delta").unwrap();
        let a = eta_product_coeffs(&spec, 4).unwrap();
        let expect: Vec<BigInt> = [0, 1, -24, 252, -1472].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(a, expect);
        let a = eta_product_coeffs(&spec, 6).unwrap();
        assert_eq!(&a[2] * &a[3], a[6]);
    }

    #[test]
    fn sparse_expansion_matches_naive_product() {
        for spec in catalog() {
            let CoefficientSource::EtaProduct(f) = &spec.source else {
                unreachable!()
            };
            assert_eq!(eta_product_coeffs(&spec, 300).unwrap(), naive_eta(f, 300), "{}", spec.label);
        }
    }

    #[test]
    fn negative_exponents_invert() {
        // eta(z)^24 / eta(z)^3 * eta(z)^3 round trip through div_into
        let mut s = vec![0i128; 50];
        s[0] = 1;
        let e3 = Sparse::euler_cubed(1, 50);
        let e1 = Sparse::euler(2, 50);
        e3.mul_into(&mut s).unwrap();
        e1.mul_into(&mut s).unwrap();
        e3.div_into(&mut s).unwrap();
        e1.div_into(&mut s).unwrap();
        assert_eq!(s[0], 1);
        assert!(s[1..].iter().all(|&c| c == 0));
    }

    #[test]
    fn level11_examples() {
        let spec = lookup("level11").unwrap();
        let a = eta_product_coeffs(&spec, 11).unwrap();
        assert_eq!(a[1], BigInt::one());
        assert_eq!(a[2], BigInt::from(-2));
        assert_eq!(a[11], BigInt::one());
        assert_eq!(ellcurve_ap(&CURVE_11A, 2).unwrap(), -2);
        assert_eq!(ellcurve_ap(&CURVE_11A, 3).unwrap(), -1);
        assert_eq!(ellcurve_ap(&CURVE_11A, 11).unwrap(), 1);
        assert_eq!(discriminant(&CURVE_11A), -161051);
    }

    #[test]
    fn point_count_brute_force_agrees() {
        for p in [2u64, 3, 5, 7, 13, 17] {
            let mut brute = 1;
            let [a1, a2, a3, a4, a6] = CURVE_11A.map(|x| x.rem_euclid(p as i64));
            for x in 0..p as i64 {
                for y in 0..p as i64 {
                    let l = (y * y + a1 * x * y + a3 * y).rem_euclid(p as i64);
                    let r = (x * x * x + a2 * x * x + a4 * x + a6).rem_euclid(p as i64);
                    if l == r {
                        brute += 1;
                    }
                }
            }
            assert_eq!(count_points(&CURVE_11A, p), brute, "p = {p}");
        }
    }

    #[test]
    fn additive_reduction_rejected() {
        // y^2 = x^3 + 4 has additive reduction at 2 and 3
        let curve = [0, 0, 0, 0, 4];
        assert!(matches!(ellcurve_ap(&curve, 3), Err(Error::AdditiveReduction(3))));
        assert!(ellcurve_ap(&CURVE_11A, 4).is_err());
    }

    #[test]
    fn nonsplit_multiplicative_sign() {
        // 14a: y^2 + xy + y = x^3 + 4x - 6 has a_2 = -1, a_7 = 1
        let curve = [1, 0, 1, 4, -6];
        assert_eq!(ellcurve_ap(&curve, 2).unwrap(), -1);
        assert_eq!(ellcurve_ap(&curve, 7).unwrap(), 1);
    }

    #[test]
    fn build_table_examples() {
        let delta = build_table(&lookup("delta").unwrap(), 100).unwrap();
        assert_eq!(delta.lambda(1), 1.0);
        let l2 = delta.lambda(2);
        assert!((delta.lambda(4) - (l2 * l2 - 1.0)).abs() < 1e-12);
        let t11 = build_table(&lookup("level11").unwrap(), 200).unwrap();
        assert!((t11.lambda(11) - 1.0 / 11f64.sqrt()).abs() < 1e-15);
        let t5 = build_table(&lookup("level5").unwrap(), 200).unwrap();
        assert_eq!(t5.coefficient(2), &BigInt::from(-4));
        assert!((t5.lambda(25) - t5.lambda(5).powi(2)).abs() < 1e-14);
    }

    #[test]
    fn elliptic_source_table_matches_eta() {
        let eta = build_table(&lookup("level11").unwrap(), 500).unwrap();
        let spec = NewformSpec {
            label: "11a-curve".into(),
            level: 11,
            weight: 2,
            source: CoefficientSource::EllipticCurve(CURVE_11A),
            cross_check: None,
        };
        let ec = build_table(&spec, 500).unwrap();
        assert_eq!(eta.coefficients(), ec.coefficients());
    }

    #[test]
    fn corrupted_source_is_rejected() {
        let spec = lookup("level11").unwrap();
        let mut a = eta_product_coeffs(&spec, 100).unwrap();
        a[6] += 1;
        let err = EigenvalueTable::from_coefficients(spec, a).unwrap_err();
        assert!(matches!(err, Error::Invariant { .. }), "{err}");
    }

    #[test]
    fn spec_validation() {
        let mut s = lookup("level5").unwrap();
        s.source = CoefficientSource::EtaProduct(vec![(1, 4), (3, 4)]);
        assert!(s.validate().is_err());
        s.source = CoefficientSource::EtaProduct(vec![(1, 2), (5, 2)]);
        assert!(s.validate().is_err());
        assert!(eta_product_coeffs(&lookup("delta").unwrap(), EXPANSION_CAP + 1).is_err());
    }

    #[test]
    fn ramanujan_congruence_small() {
        let t = build_table(&lookup("delta").unwrap(), 500).unwrap();
        let m = BigInt::from(691);
        for n in 1..=500u64 {
            let s = mult_fn(MultFn::Sigma(11), n).unwrap();
            let diff = t.coefficient(n as usize) - s;
            assert!((diff % &m).is_zero(), "n = {n}");
        }
    }

    #[test]
    fn rankin_and_amplifier() {
        let t = build_table(&lookup("level11").unwrap(), 2000).unwrap();
        assert_eq!(rankin_average(&t, 1).unwrap(), 1.0);
        assert!(rankin_average(&t, 2000).unwrap() >= 1.0 / 2000.0);
        let amp = amplifier_coeffs(&t, 40, 5, 11).unwrap();
        assert_eq!(amp.primes, vec![23, 29, 31, 37]);
        let total: f64 = amp.alpha.iter().map(|&(r, a)| a * t.lambda(r as usize)).sum();
        assert!((total - 4.0).abs() < 1e-9);
        assert_eq!(amp.alpha(19), 0.0);
        assert_eq!(amp.alpha(23 * 23), -1.0);
        assert!(amplifier_coeffs(&t, 4, 2, 3).is_err());
    }

    #[test]
    fn cache_round_trip_and_corruption() {
        let t = build_table(&lookup("level11").unwrap(), 200).unwrap();
        let text = format_cache(&t);
        assert!(text.starts_with("# level11,11,2,200\n1,1\n2,-2\n"));
        let back = parse_cache(&text).unwrap();
        assert_eq!(back.coefficients(), t.coefficients());
        let corrupted = text.replace("\n6,2\n", "\n6,3\n");
        assert_ne!(corrupted, text);
        match parse_cache(&corrupted) {
            Err(Error::Invariant { line: Some(7), .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let truncated: String = text.lines().take(50).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse_cache(&truncated), Err(Error::Parse { .. })));
    }
}
