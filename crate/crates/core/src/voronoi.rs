//! Two-sided numerical check of Voronoi summation for holomorphic newforms of squarefree level.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::accum::{unit_root, ComplexSum};
use crate::analysis::quad::QuadratureConfig;
use crate::analysis::{voronoi_kernel_transform, BesselKernel, SmoothWindow};
use crate::error::{Error, Result};
use crate::expsum::{divisor_count_table, gcd, gcd_i, mobius, mod_inverse};
use crate::newform::EigenvalueTable;

/// Additive twist on the dual side: `e(-n (a D2)^{-1} / c)` or its conjugate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualSign {
    Minus,
    Plus,
}

impl DualSign {
    pub fn name(&self) -> &'static str {
        match self {
            DualSign::Minus => "minus",
            DualSign::Plus => "plus",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VoronoiOptions {
    pub quad: QuadratureConfig,
    pub sign: DualSign,
    /// Error budget relative to `sum |lambda(n) F(n)|`; the dual tail must stay below 1% of it.
    pub rel_budget: f64,
}

impl Default for VoronoiOptions {
    fn default() -> Self {
        Self {
            quad: QuadratureConfig::with_tolerances(1e-11, 1e-10),
            sign: DualSign::Minus,
            rel_budget: 1e-7,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VoronoiReport {
    pub label: String,
    pub a: i64,
    pub c: u64,
    pub d2: u64,
    pub eta: f64,
    pub sign: DualSign,
    pub support: (f64, f64),
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub n_lhs: usize,
    pub n_rhs: usize,
    pub tail_lhs: f64,
    pub tail_rhs: f64,
    pub quad_error: f64,
    pub error_budget: f64,
}

/// `eta(D2) = mu(D2) / (lambda(D2) sqrt(D2))` for trivial nebentypus.
pub fn pseudo_eigenvalue(table: &EigenvalueTable, d2: u64) -> Result<f64> {
    let level = table.level();
    if d2 == 0 || !level.is_multiple_of(d2) || gcd(d2, level / d2) != 1 {
        return Err(Error::arg(format!("D2 = {d2} is not an exact divisor of level {level}")));
    }
    if d2 == 1 {
        return Ok(1.0);
    }
    table.ensure_covers(d2 as usize)?;
    let lam = table.lambda(d2 as usize);
    if lam.abs() < 1e-12 {
        return Err(Error::Hypothesis(format!("lambda({d2}) = 0, pseudo-eigenvalue undefined")));
    }
    let eta = mobius(d2)? as f64 / (lam * (d2 as f64).sqrt());
    if (eta.abs() - 1.0).abs() > 1e-9 {
        return Err(Error::Invariant {
            line: None,
            msg: format!("|eta({d2})| = {} differs from 1", eta.abs()),
        });
    }
    Ok(eta)
}

/// `D2 = level / gcd(c, level)`.
pub fn dual_level(level: u64, c: u64) -> u64 {
    level / gcd(c, level)
}

/// A-priori dual length `K^2 c^2 D2 T / inf supp F` with `T = 24000`, used to size tables.
pub fn required_terms(level: u64, c: u64, f: &SmoothWindow) -> usize {
    let (lo, hi) = f.support();
    let k = (lo / f.characteristic_width()).max(1.0);
    let d2 = dual_level(level, c) as f64;
    let est = k * k * (c * c) as f64 * d2 * 24000.0 / lo;
    (est.ceil() as usize).max(hi.ceil() as usize)
}

/// Compare `sum lambda(n) e(an/c) F(n)` with its dual expansion.
pub fn voronoi_check(table: &EigenvalueTable, a: i64, c: u64, f: &SmoothWindow, opts: &VoronoiOptions) -> Result<VoronoiReport> {
    if c == 0 {
        return Err(Error::arg("c must be positive"));
    }
    if gcd_i(a, c as i64) != 1 {
        return Err(Error::arg(format!("(a, c) = ({a}, {c}) is not coprime")));
    }
    let (lo, hi) = f.support();
    if !(lo > 0.0) {
        return Err(Error::arg("F must be supported away from 0"));
    }
    let level = table.level();
    let d1 = gcd(c, level);
    let d2 = level / d1;
    if gcd(d1, d2) != 1 {
        return Err(Error::Hypothesis(format!("(D1, D2) = ({d1}, {d2}) not coprime")));
    }
    let eta = pseudo_eigenvalue(table, d2)?;
    let kernel = BesselKernel::new(table.weight())?;

    // primal side
    let n_lo = lo.floor() as usize + 1;
    let n_hi = hi.ceil() as usize - 1;
    table.ensure_covers(n_hi)?;
    let mut lhs = ComplexSum::new();
    let mut trivial = 0.0;
    for n in n_lo..=n_hi {
        let w = table.lambda(n) * f.eval(n as f64);
        lhs.add(unit_root(a as i128 * n as i128, c) * w);
        trivial += w.abs();
    }
    let lhs = lhs.value();
    let budget = opts.rel_budget * trivial.max(1e-30);

    // dual side
    let abar = mod_inverse(a as i128 * d2 as i128, c).ok_or_else(|| Error::Hypothesis(format!("a D2 not invertible modulo {c}")))? as i128;
    let twist = match opts.sign {
        DualSign::Minus => -abar,
        DualSign::Plus => abar,
    };
    let prefactor = eta / (c as f64 * (d2 as f64).sqrt());
    let xi_of = |n: usize| n as f64 / (d2 as f64 * (c * c) as f64);
    let available = table.len();
    let start = required_terms(level, c, f) / 64;
    let d = divisor_count_table(available);

    let mut rhs = ComplexSum::new();
    let mut quad_error = 0.0;
    let mut n_done = 0usize;
    let mut block_end = start.max(64);
    let tail = loop {
        if block_end > available {
            return Err(Error::TableRange {
                required: block_end.max(required_terms(level, c, f)),
                available,
            });
        }
        let terms: Vec<(Complex64, f64, f64)> = (n_done + 1..=block_end)
            .into_par_iter()
            .map(|n| -> Result<(Complex64, f64, f64)> {
                let t = voronoi_kernel_transform(f, kernel, xi_of(n), &opts.quad)?;
                let phase = unit_root(twist * n as i128, c);
                Ok((phase * (table.lambda(n) * t.value), t.error, t.value.abs()))
            })
            .collect::<Result<_>>()?;
        // terms are combined in ascending n so the result does not depend on the thread count
        let tail_from = block_end - (block_end - n_done) / 10;
        let mut last_size: f64 = 0.0;
        for (i, (z, err, size)) in terms.into_iter().enumerate() {
            rhs.add(z);
            quad_error += err * table.lambda(n_done + 1 + i).abs();
            if n_done + 1 + i >= tail_from {
                last_size = last_size.max(size);
            }
        }
        n_done = block_end;
        // beyond N the transform decays at least like xi^{-4}; with |lambda(n)| <= d(n)
        // the remaining sum is at most |G_N| N sum_{n>N} d(n) (N/n)^4 / N ~ |G_N| N (ln N + 1) / 3
        let nf = n_done as f64;
        let dens = (d[n_done.saturating_sub(n_done / 10)..=n_done]
            .iter()
            .map(|&v| v as f64)
            .sum::<f64>())
            / (n_done / 10 + 1) as f64;
        let tail = prefactor.abs() * last_size * nf * dens.max(nf.ln() + 1.0) / 3.0;
        if tail <= 0.01 * budget {
            break tail;
        }
        block_end = n_done + (n_done / 4).max(64);
    };
    let rhs = rhs.value() * prefactor;
    let quad_error = quad_error * prefactor.abs();
    let abs_error = (lhs - rhs).norm();
    Ok(VoronoiReport {
        label: table.label().to_string(),
        a,
        c,
        d2,
        eta,
        sign: opts.sign,
        support: (lo, hi),
        lhs,
        rhs,
        abs_error,
        rel_error: abs_error / lhs.norm().max(1e-30),
        n_lhs: n_hi,
        n_rhs: n_done,
        tail_lhs: 0.0,
        tail_rhs: tail,
        quad_error,
        error_budget: budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newform::{build_table, lookup};

    fn delta(n: usize) -> EigenvalueTable {
        build_table(&lookup("delta").unwrap(), n).unwrap()
    }

    #[test]
    fn pseudo_eigenvalues() {
        let g = build_table(&lookup("level11").unwrap(), 200).unwrap();
        assert_eq!(pseudo_eigenvalue(&g, 1).unwrap(), 1.0);
        assert!((pseudo_eigenvalue(&g, 11).unwrap() + 1.0).abs() < 1e-12);
        assert!(pseudo_eigenvalue(&g, 3).is_err());
    }

    #[test]
    fn delta_trivial_modulus() {
        let t = delta(6000);
        let f = SmoothWindow::bump(50.0, 200.0).unwrap();
        let r = voronoi_check(&t, 1, 1, &f, &VoronoiOptions::default()).unwrap();
        assert!(r.rel_error <= 1e-6, "{r:?}");
        assert!(r.tail_rhs <= 0.01 * r.error_budget);
    }

    #[test]
    fn delta_with_twist() {
        let t = delta(20000);
        let f = SmoothWindow::bump(50.0, 200.0).unwrap();
        let r = voronoi_check(&t, 2, 5, &f, &VoronoiOptions::default()).unwrap();
        assert!(r.rel_error <= 1e-6, "{r:?}");
        let plus = VoronoiOptions {
            sign: DualSign::Plus,
            ..VoronoiOptions::default()
        };
        let wrong = voronoi_check(&t, 2, 5, &f, &plus).unwrap();
        assert!(wrong.rel_error > 1e-3);
        // periodicity in a and conjugation under a -> -a
        let shifted = voronoi_check(&t, 7, 5, &f, &VoronoiOptions::default()).unwrap();
        assert!((shifted.lhs - r.lhs).norm() <= 1e-10 && (shifted.rhs - r.rhs).norm() <= 1e-10);
        let neg = voronoi_check(&t, -2, 5, &f, &VoronoiOptions::default()).unwrap();
        assert!((neg.lhs - r.lhs.conj()).norm() <= 1e-9 && (neg.rhs - r.rhs.conj()).norm() <= 1e-9);
    }

    #[test]
    fn rejects_non_coprime() {
        let t = delta(300);
        let f = SmoothWindow::bump(50.0, 200.0).unwrap();
        assert!(voronoi_check(&t, 2, 4, &f, &VoronoiOptions::default()).is_err());
    }

    #[test]
    fn short_table_names_requirement() {
        let t = delta(300);
        let f = SmoothWindow::bump(50.0, 200.0).unwrap();
        match voronoi_check(&t, 1, 3, &f, &VoronoiOptions::default()) {
            Err(Error::TableRange { required, .. }) => assert!(required > 300),
            other => panic!("unexpected {other:?}"),
        }
    }
}
