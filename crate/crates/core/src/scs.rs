//! Shifted convolution sums `sum_{m >= 1} lambda_f(am+c) lambda_g(bm+d) W((am+c)/M1, (bm+d)/M2)`.

use rayon::prelude::*;

use crate::accum::NeumaierSum;
use crate::analysis::SmoothWindow;
use crate::error::{Error, Result};
use crate::expsum::gcd;
use crate::newform::EigenvalueTable;

/// Chunk length for the parallel m-loop; partial sums are combined in chunk order.
pub const CHUNK: usize = 4096;

/// Exponent towards Ramanujan used by the first bound; 0 for holomorphic forms.
pub const THETA_HOLOMORPHIC: f64 = 0.0;
pub const THETA_UNCONDITIONAL: f64 = 7.0 / 64.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScsParams {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub m1: f64,
    pub m2: f64,
    pub w1: SmoothWindow,
    pub w2: SmoothWindow,
}

impl ScsParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(a: i64, b: i64, c: i64, d: i64, m1: f64, m2: f64, w1: SmoothWindow, w2: SmoothWindow) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::arg("a and b must be nonzero"));
        }
        if !(m1 >= 1.0 && m2 >= 1.0) {
            return Err(Error::arg("M1 and M2 must be at least 1"));
        }
        for w in [&w1, &w2] {
            let (lo, hi) = w.support();
            if lo < 0.5 || hi > 3.0 {
                return Err(Error::arg("window factors must be supported in [1/2, 3]"));
            }
        }
        Ok(Self {
            a,
            b,
            c,
            d,
            m1,
            m2,
            w1,
            w2,
        })
    }

    /// Same sum with the default window (bump on [1/2, 5/2] in each variable).
    pub fn with_default_window(a: i64, b: i64, c: i64, d: i64, m1: f64, m2: f64) -> Result<Self> {
        let w = default_window();
        Self::new(a, b, c, d, m1, m2, w, w)
    }

    pub fn shift(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn x(&self) -> f64 {
        12.0 * (self.m1 / self.a.unsigned_abs() as f64 + self.m2 / self.b.unsigned_abs() as f64)
    }

    pub fn k1(&self) -> f64 {
        self.w1.scale()
    }

    pub fn k2(&self) -> f64 {
        self.w2.scale()
    }

    /// The inclusive range of `m >= 1` with both arguments inside the open window supports.
    pub fn m_range(&self) -> Option<(i64, i64)> {
        let (l1, r1) = linear_range(self.a, self.c, self.m1, self.w1.support());
        let (l2, r2) = linear_range(self.b, self.d, self.m2, self.w2.support());
        let lo = l1.max(l2).max(1);
        let hi = r1.min(r2);
        (lo <= hi).then_some((lo, hi))
    }

    /// The swapped sum: `(a, c, w1, M1) <-> (b, d, w2, M2)`.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            c: self.d,
            d: self.c,
            m1: self.m2,
            m2: self.m1,
            w1: self.w2,
            w2: self.w1,
        }
    }

    fn weight(&self, m: i64) -> f64 {
        let x = (self.a * m + self.c) as f64 / self.m1;
        let y = (self.b * m + self.d) as f64 / self.m2;
        self.w1.eval(x) * self.w2.eval(y)
    }
}

pub fn default_window() -> SmoothWindow {
    SmoothWindow::bump(0.5, 2.5).expect("static support")
}

// integers m with (a m + c) / M strictly inside (lo, hi)
fn linear_range(a: i64, c: i64, m: f64, (lo, hi): (f64, f64)) -> (i64, i64) {
    let (u, v) = ((m * lo - c as f64) / a as f64, (m * hi - c as f64) / a as f64);
    let (u, v) = if a > 0 { (u, v) } else { (v, u) };
    (u.floor() as i64 + 1, v.ceil() as i64 - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    Rankin,
    NonzeroShift,
    LevelMultiple,
}

impl Theorem {
    pub fn name(&self) -> &'static str {
        match self {
            Theorem::Rankin => "rankin",
            Theorem::NonzeroShift => "nonzero-shift",
            Theorem::LevelMultiple => "level-multiple",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "rankin" => Some(Theorem::Rankin),
            "nonzero-shift" => Some(Theorem::NonzeroShift),
            "level-multiple" => Some(Theorem::LevelMultiple),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScsReport {
    pub params: ScsParams,
    pub value: f64,
    pub terms: usize,
    pub m_range: Option<(i64, i64)>,
    pub chunk: usize,
}

impl ScsReport {
    pub fn shift(&self) -> i64 {
        self.params.shift()
    }

    pub fn x(&self) -> f64 {
        self.params.x()
    }
}

/// Evaluate the sum directly.
pub fn scs_direct(f: &EigenvalueTable, g: &EigenvalueTable, params: &ScsParams) -> Result<ScsReport> {
    let range = params.m_range();
    let Some((lo, hi)) = range else {
        return Ok(ScsReport {
            params: *params,
            value: 0.0,
            terms: 0,
            m_range: None,
            chunk: CHUNK,
        });
    };
    check_coverage(f, g, params, lo, hi)?;
    let p = *params;
    let chunks: Vec<(i64, i64)> = (lo..=hi).step_by(CHUNK).map(|s| (s, (s + CHUNK as i64 - 1).min(hi))).collect();
    let partial: Vec<f64> = chunks
        .into_par_iter()
        .map(|(s, e)| {
            let mut acc = NeumaierSum::new();
            for m in s..=e {
                acc.add(term(f, g, &p, m));
            }
            acc.value()
        })
        .collect();
    let value: NeumaierSum = partial.into_iter().collect();
    Ok(ScsReport {
        params: p,
        value: value.value(),
        terms: (hi - lo + 1) as usize,
        m_range: range,
        chunk: CHUNK,
    })
}

/// Independent evaluation: descending m, plain compensated loop, no chunking.
pub fn scs_reverse(f: &EigenvalueTable, g: &EigenvalueTable, params: &ScsParams) -> Result<f64> {
    let Some((lo, hi)) = params.m_range() else {
        return Ok(0.0);
    };
    check_coverage(f, g, params, lo, hi)?;
    let mut acc = NeumaierSum::new();
    for m in (lo..=hi).rev() {
        acc.add(term(f, g, params, m));
    }
    Ok(acc.value())
}

fn term(f: &EigenvalueTable, g: &EigenvalueTable, p: &ScsParams, m: i64) -> f64 {
    let w = p.weight(m);
    if w == 0.0 {
        return 0.0;
    }
    f.lambda((p.a * m + p.c) as usize) * g.lambda((p.b * m + p.d) as usize) * w
}

fn check_coverage(f: &EigenvalueTable, g: &EigenvalueTable, p: &ScsParams, lo: i64, hi: i64) -> Result<()> {
    let ends = |a: i64, c: i64| ((a * lo + c).min(a * hi + c), (a * lo + c).max(a * hi + c));
    let (f_lo, f_hi) = ends(p.a, p.c);
    let (g_lo, g_hi) = ends(p.b, p.d);
    if f_lo < 1 || g_lo < 1 {
        return Err(Error::arg("arguments am+c and bm+d must be positive on the support"));
    }
    f.ensure_covers(f_hi as usize)?;
    g.ensure_covers(g_hi as usize)?;
    Ok(())
}

/// Bound shape without implied constant.
pub fn scs_bound(params: &ScsParams, p: u64, theorem: Theorem, theta: f64) -> f64 {
    let prod = params.m1 * params.m2;
    let kk = (params.k1() * params.k2()).powf(1.5);
    let ab = ((params.a * params.b).unsigned_abs() as f64).sqrt();
    let x = params.x();
    match theorem {
        Theorem::Rankin => prod.sqrt().min(prod.powf(theta) * x),
        Theorem::NonzeroShift => kk * ab * (p as f64).powf(0.75) * x.powf(0.75),
        Theorem::LevelMultiple => kk * ab * (p as f64).powf(0.25) * x.powf(0.75),
    }
}

/// Check the hypotheses of the chosen bound and return `|S| / bound`.
pub fn scs_bound_margin(report: &ScsReport, f: &EigenvalueTable, g: &EigenvalueTable, p: u64, theorem: Theorem, theta: f64) -> Result<f64> {
    let params = &report.params;
    if f.level() != p || g.level() != p {
        return Err(Error::Hypothesis(format!(
            "both forms must have level p = {p} (got {} and {})",
            f.level(),
            g.level()
        )));
    }
    if gcd((params.a * params.b).unsigned_abs(), p) != 1 {
        return Err(Error::Hypothesis(format!("ab = {} is not coprime to p = {p}", params.a * params.b)));
    }
    let shift = params.shift();
    match theorem {
        Theorem::Rankin => {}
        Theorem::NonzeroShift => {
            if shift == 0 {
                return Err(Error::Hypothesis("shift ad - bc is zero".into()));
            }
        }
        Theorem::LevelMultiple => {
            if shift == 0 {
                return Err(Error::Hypothesis("shift ad - bc is zero".into()));
            }
            if !shift.unsigned_abs().is_multiple_of(p) {
                return Err(Error::Hypothesis(format!("shift {shift} is not a multiple of p = {p}")));
            }
        }
    }
    if report.value == 0.0 {
        return Ok(0.0);
    }
    Ok(report.value.abs() / scs_bound(params, p, theorem, theta))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub m: f64,
    pub x: f64,
    pub s: f64,
    pub bound: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `log |S|` against `log X`.
    pub slope: f64,
    /// Least-squares slope of `log margin` against `log X`.
    pub margin_slope: f64,
    pub theorem: Theorem,
}

impl ScalingReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("M,X,S,bound,margin\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{:.12e},{:.12e},{:.12e}\n", r.m, r.x, r.s, r.bound, r.margin));
        }
        out
    }

    pub fn max_margin(&self) -> f64 {
        self.rows.iter().map(|r| r.margin).fold(0.0, f64::max)
    }
}

/// Evaluate `S` with `M1 = M2 = M` over a dyadic list and fit the growth exponent.
#[allow(clippy::too_many_arguments)]
pub fn scs_scaling_experiment(
    f: &EigenvalueTable,
    g: &EigenvalueTable,
    (a, b, c, d): (i64, i64, i64, i64),
    ms: &[f64],
    p: u64,
    theorem: Theorem,
    theta: f64,
) -> Result<ScalingReport> {
    if ms.len() < 5 {
        return Err(Error::arg("need at least 5 values of M"));
    }
    for w in ms.windows(2) {
        if (w[1] / w[0] - 2.0).abs() > 1e-12 {
            return Err(Error::arg("M list must be dyadic"));
        }
    }
    let mut rows = Vec::new();
    for &m in ms {
        let params = ScsParams::with_default_window(a, b, c, d, m, m)?;
        let rep = scs_direct(f, g, &params)?;
        let margin = scs_bound_margin(&rep, f, g, p, theorem, theta)?;
        rows.push(ScalingRow {
            m,
            x: params.x(),
            s: rep.value,
            bound: scs_bound(&params, p, theorem, theta),
            margin,
        });
    }
    let usable: Vec<&ScalingRow> = rows.iter().filter(|r| r.s != 0.0).collect();
    if usable.len() < 5 {
        return Err(Error::arg(format!("only {} nonzero sums; need 5", usable.len())));
    }
    let slope = fit_slope(usable.iter().map(|r| (r.x.ln(), r.s.abs().ln())));
    let margin_slope = fit_slope(usable.iter().map(|r| (r.x.ln(), r.margin.ln())));
    Ok(ScalingReport {
        rows,
        slope,
        margin_slope,
        theorem,
    })
}

/// Ordinary least-squares slope.
pub fn fit_slope<I: IntoIterator<Item = (f64, f64)>>(points: I) -> f64 {
    let pts: Vec<(f64, f64)> = points.into_iter().collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
