use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ntw_core::analysis::SmoothWindow;
use ntw_core::deltam::{check_kernel, indicator_residual, DeltaConfig};
use ntw_core::expsum::primes_up_to;
use ntw_core::expsum::{factorize, gcd, kloosterman_crt_sides, ramanujan_mismatches, weil_margin};
use ntw_core::newform::{
    amplifier_coeffs, build_table_with, cache_file_name, ellcurve_ap, load_cache, lookup, verify_cache, write_cache, BuildOptions,
    EigenvalueTable, DEFAULT_CROSS_CHECK_LIMIT,
};
use ntw_core::rankin::lfunc::Scheme;
use ntw_core::rankin::{
    amplifier_experiment, ap_constrained_sum, circle_decomposition_check, default_u, default_v, lvalue_estimate, pv_dyadic_range,
    pv_experiment, LValueRequest, ModuliConfig,
};
use ntw_core::scs::{scs_bound_margin, scs_direct, scs_reverse, scs_scaling_experiment, ScsParams, Theorem};
use ntw_core::voronoi::{required_terms, voronoi_check, DualSign, VoronoiOptions};

use crate::report::{fmt_f64 as ff, loglog_svg, Report};
use crate::*;

/// Slope ceiling for nonzero shifts.
pub const SCS_SHIFT_SLOPE: f64 = 0.80;
/// Admissible distance of the diagonal slope from 1.
pub const SCS_DIAGONAL_TOL: f64 = 0.1;
/// Margin series count as bounded when their fitted slope stays below this and no margin exceeds 1.
pub const MARGIN_SLOPE: f64 = 0.1;
pub const CIRCLE_TOL: f64 = 1e-9;
pub const LVALUE_SCHEME_TOL: f64 = 1e-4;
pub const LVALUE_SYMMETRY_TOL: f64 = 1e-9;
/// Ratio series across the dyadic range count as non-growing below this slope.
pub const PV_SLOPE: f64 = 0.25;

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let ctx = Ctx {
        cache_dir: cli.cache_dir.clone(),
    };
    match &cli.command {
        Command::Verify(a) => match a.suite {
            Suite::Ramanujan => ramanujan(a.qmax, a.nmax),
            Suite::Kloosterman => kloosterman(a.pairs, a.cmax, a.weil_cmax, a.seed),
            Suite::Coefficients => coefficients(&ctx, a.n),
            Suite::Hecke => hecke(&ctx, a.n),
        },
        Command::VerifyRamanujan(a) => ramanujan(a.qmax, a.nmax),
        Command::VerifyKloosterman(a) => kloosterman(a.pairs, a.cmax, a.weil_cmax, a.seed),
        Command::BuildCache(a) => cache_build(&ctx, &a.form, a.n, a.cross_check),
        Command::Cache(a) => cache(&ctx, a),
        Command::Voronoi(a) => voronoi(&ctx, a),
        Command::DeltaMethod(a) => delta(a),
        Command::Scs(a) => scs(&ctx, a),
        Command::ScsScaling(a) => scs_scaling(&ctx, a),
        Command::Amplify(a) => amplify(&ctx, a),
        Command::CircleCheck(a) => circle(&ctx, a),
        Command::ApSum(a) => ap_sum(&ctx, a),
        Command::Pv(a) => pv(&ctx, a),
        Command::Lvalue(a) => lvalue(&ctx, a),
    }
}

struct Ctx {
    cache_dir: Option<PathBuf>,
}

impl Ctx {
    /// Table covering `n`, from the smallest sufficient cache file or a fresh expansion.
    fn table(&self, label: &str, n: usize) -> Result<EigenvalueTable, CliError> {
        let n = n.max(1);
        if let Some(dir) = &self.cache_dir {
            let best = cached_lengths(dir, label)?.into_iter().filter(|&m| m >= n).min();
            let Some(m) = best else {
                return Err(CliError::Data(format!(
                    "no cache for '{label}' covering n <= {n} in {}",
                    dir.display()
                )));
            };
            return Ok(load_cache(&dir.join(cache_file_name(label, m)))?);
        }
        let spec = lookup(label).ok_or_else(|| CliError::Usage(format!("unknown form '{label}'")))?;
        Ok(build_table_with(&spec, n, BuildOptions { cross_check_limit: 0 })?)
    }

    fn pair(&self, pair: &str, n: usize) -> Result<(EigenvalueTable, EigenvalueTable), CliError> {
        let (f, g) = split_pair(pair)?;
        Ok((self.table(f, n)?, self.table(g, n)?))
    }
}

fn cached_lengths(dir: &Path, label: &str) -> Result<Vec<usize>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::Data(format!("cache dir {}: {e}", dir.display())))?;
    let prefix = format!("{label}_");
    let mut out = Vec::new();
    for e in entries.flatten() {
        let name = e.file_name().to_string_lossy().into_owned();
        if let Some(n) = name
            .strip_prefix(&prefix)
            .and_then(|r| r.strip_suffix(".coeffs"))
            .and_then(|r| r.parse().ok())
        {
            out.push(n);
        }
    }
    Ok(out)
}

fn split_pair(pair: &str) -> Result<(&str, &str), CliError> {
    pair.split_once(',')
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| CliError::Usage(format!("--pair expects 'f,g', got '{pair}'")))
}

fn ramanujan(qmax: u64, nmax: i64) -> Result<Report, CliError> {
    let bad = ramanujan_mismatches(qmax, nmax)?;
    let mut r = Report::new("verify-ramanujan");
    r.put("qmax", qmax).put("nmax", nmax).put("mismatches", bad.len());
    if let Some((q, n, f, b)) = bad.first() {
        r.put("first_mismatch", format!("q={q} n={n} formula={f} brute={b}"));
    }
    r.check("criterion", bad.is_empty());
    Ok(r)
}

/// `count` coprime pairs `2 <= c1, c2 <= cmax` from a seeded stream.
pub fn coprime_pairs(count: usize, cmax: u64, seed: u64) -> Vec<(u64, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (a, b) = (rng.random_range(2..=cmax), rng.random_range(2..=cmax));
        if gcd(a, b) == 1 {
            out.push((a, b));
        }
    }
    out
}

fn kloosterman(pairs: usize, cmax: u64, weil_cmax: u64, seed: u64) -> Result<Report, CliError> {
    if cmax < 3 {
        return Err(CliError::Usage("--cmax must be at least 3".into()));
    }
    let mut crt: f64 = 0.0;
    for (c1, c2) in coprime_pairs(pairs, cmax, seed) {
        for m in 1..=5 {
            for n in 1..=5 {
                let (l, rhs) = kloosterman_crt_sides(m, n, c1, c2)?;
                crt = crt.max((l - rhs).norm());
            }
        }
    }
    let mut weil: f64 = 0.0;
    let mut moduli = 0;
    for c in 1..=weil_cmax {
        if !factorize(c)?.is_squarefree() {
            continue;
        }
        moduli += 1;
        for m in 0..=10 {
            for n in 0..=10 {
                weil = weil.max(weil_margin(m, n, c)?);
            }
        }
    }
    let mut r = Report::new("verify-kloosterman");
    r.put("pairs", pairs).put("seed", seed).put("crt_max_difference", crt);
    r.check("crt_criterion", crt <= 1e-8);
    r.put("squarefree_moduli", moduli).put("weil_max_margin", weil);
    r.check("weil_criterion", weil <= 1.0);
    Ok(r)
}

fn coefficients(ctx: &Ctx, n: usize) -> Result<Report, CliError> {
    let spec = lookup("level11").expect("catalog");
    let curve = spec.cross_check.expect("catalog curve");
    let t = ctx.table("level11", n)?;
    let mut bad = 0;
    let primes = primes_up_to(n as u64);
    for &p in &primes {
        if p == 11 {
            continue;
        }
        if ellcurve_ap(&curve, p)? != i64::try_from(t.coefficient(p as usize)).unwrap_or(i64::MAX) {
            bad += 1;
        }
    }
    let mut r = Report::new("verify-coefficients");
    r.put("form", "level11")
        .put("primes_checked", primes.len())
        .put("ap_mismatches", bad);
    r.check("ap_criterion", bad == 0);
    for label in ["delta", "level11"] {
        let t = ctx.table(label, n)?;
        let ratio = t.deligne_ratio();
        r.put(&format!("{label}_deligne_ratio"), ratio);
        r.check(&format!("{label}_deligne"), ratio <= 1.0 + 1e-12);
    }
    Ok(r)
}

fn hecke(ctx: &Ctx, n: usize) -> Result<Report, CliError> {
    let bound = n.min(300);
    let mut r = Report::new("verify-hecke");
    r.put("bound", bound);
    for label in ["delta", "level11"] {
        let t = ctx.table(label, bound * bound)?;
        let res = t.hecke_bilinear_residual(bound)?;
        r.put(&format!("{label}_residual"), res);
        r.check(&format!("{label}_criterion"), res <= 1e-10);
    }
    Ok(r)
}

fn cache_build(ctx: &Ctx, form: &str, n: usize, cross: Option<u64>) -> Result<Report, CliError> {
    let dir = ctx
        .cache_dir
        .as_ref()
        .ok_or_else(|| CliError::Usage("cache build needs --cache-dir".into()))?;
    let spec = lookup(form).ok_or_else(|| CliError::Usage(format!("unknown form '{form}'")))?;
    let limit = cross.unwrap_or(DEFAULT_CROSS_CHECK_LIMIT);
    let t = build_table_with(&spec, n, BuildOptions { cross_check_limit: limit })?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    let path = dir.join(cache_file_name(form, n));
    write_cache(&t, &path)?;
    let mut r = Report::new("build-cache");
    r.put("form", form)
        .put("n", n)
        .put("file", path.file_name().unwrap().to_string_lossy().into_owned())
        .put("cross_checked_to", if spec.cross_check.is_some() { limit.min(n as u64) } else { 0 })
        .put("deligne_ratio", t.deligne_ratio());
    r.check("criterion", true);
    Ok(r)
}

fn cache(ctx: &Ctx, a: &CacheArgs) -> Result<Report, CliError> {
    if let CacheAction::Build = a.action {
        let form = a
            .form
            .as_deref()
            .ok_or_else(|| CliError::Usage("cache build needs --form".into()))?;
        let n = a.n.ok_or_else(|| CliError::Usage("cache build needs --n".into()))?;
        return cache_build(ctx, form, n, a.cross_check);
    }
    let path = match (&a.file, &ctx.cache_dir, &a.form, a.n) {
        (Some(p), _, _, _) => p.clone(),
        (None, Some(d), Some(f), Some(n)) => d.join(cache_file_name(f, n)),
        _ => return Err(CliError::Usage("give --file, or --cache-dir with --form and --n".into())),
    };
    let t = match a.action {
        CacheAction::Load => load_cache(&path)?,
        _ => verify_cache(&path)?,
    };
    let mut r = Report::new(match a.action {
        CacheAction::Load => "cache-load",
        _ => "cache-verify",
    });
    r.put("label", t.label())
        .put("level", t.level())
        .put("weight", t.weight())
        .put("n", t.len());
    r.check("criterion", true);
    Ok(r)
}

fn voronoi(ctx: &Ctx, a: &VoronoiArgs) -> Result<Report, CliError> {
    let w = SmoothWindow::bump(a.lo, a.hi)?;
    let spec = lookup(&a.form).ok_or_else(|| CliError::Usage(format!("unknown form '{}'", a.form)))?;
    let t = ctx.table(&a.form, required_terms(spec.level, a.c, &w))?;
    let opts = VoronoiOptions {
        sign: match a.sign {
            SignArg::Minus => DualSign::Minus,
            SignArg::Plus => DualSign::Plus,
        },
        rel_budget: a.rel_budget,
        ..VoronoiOptions::default()
    };
    let v = voronoi_check(&t, a.a, a.c, &w, &opts)?;
    let tol = a.tol.unwrap_or(if spec.level == 1 { 1e-6 } else { 1e-5 });
    let mut r = Report::new("voronoi");
    r.put("form", &v.label)
        .put("a", v.a)
        .put("c", v.c)
        .put("support", format!("{},{}", v.support.0, v.support.1))
        .put("sign", v.sign.name())
        .put("d2", v.d2)
        .put("eta", v.eta)
        .put("lhs", fmt_c(v.lhs))
        .put("rhs", fmt_c(v.rhs))
        .put("abs_error", v.abs_error)
        .put("relative_error", v.rel_error)
        .put("n_lhs", v.n_lhs)
        .put("n_rhs", v.n_rhs)
        .put("tail_rhs", v.tail_rhs)
        .put("quad_error", v.quad_error)
        .put("error_budget", v.error_budget)
        .put("tolerance", tol);
    r.check("criterion", v.rel_error <= tol);
    Ok(r)
}

fn fmt_c(z: Complex64) -> String {
    format!(
        "{}{}{}i",
        ff(z.re),
        if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
            "-"
        } else {
            "+"
        },
        ff(z.im.abs())
    )
}

fn delta(a: &DeltaArgs) -> Result<Report, CliError> {
    let cfg = DeltaConfig::calibrated(a.q)?;
    let c0 = cfg.c0().expect("calibrated");
    let (worst_n, residual) = indicator_residual(&cfg)?;
    let limit = 1e-8f64.max((a.q as f64).powi(-4));
    let mut r = Report::new("delta-method");
    r.put("q", a.q).put("c0", c0);
    r.check("c0_criterion", (c0 - 1.0).abs() <= 0.05);
    r.put("max_residual", residual).put("worst_n", worst_n).put("residual_limit", limit);
    r.check("residual_criterion", residual <= limit);
    if !a.no_kernel {
        let k = check_kernel(&cfg)?;
        r.put("kernel_grid_points", k.grid_points)
            .put("support_violations", k.support_violations)
            .put("max_flatness_derivative", k.max_flatness_derivative)
            .put("mass_constant", k.mass_constant);
        for (x, m) in &k.mass {
            r.put(&format!("mass_{x}"), *m);
        }
        r.check("kernel_criterion", k.passes());
    }
    Ok(r)
}

fn theorem_for(name: Option<&str>, shift: i64, p: u64) -> Result<Theorem, CliError> {
    match name {
        Some(n) => Theorem::parse(n).ok_or_else(|| CliError::Usage(format!("unknown theorem '{n}'"))),
        None if shift == 0 => Ok(Theorem::Rankin),
        None if p > 1 && shift.unsigned_abs().is_multiple_of(p) => Ok(Theorem::LevelMultiple),
        None => Ok(Theorem::NonzeroShift),
    }
}

fn scs_table_len(p: &ScsParams) -> usize {
    match p.m_range() {
        Some((_, hi)) => {
            let f = p.a.abs() * hi + p.c.abs();
            let g = p.b.abs() * hi + p.d.abs();
            f.max(g).max(1) as usize
        }
        None => 1,
    }
}

fn scs(ctx: &Ctx, a: &ScsArgs) -> Result<Report, CliError> {
    let params = ScsParams::with_default_window(a.a, a.b, a.c, a.d, a.m1, a.m2.unwrap_or(a.m1))?;
    let (f, g) = ctx.pair(&a.pair, scs_table_len(&params))?;
    let rep = scs_direct(&f, &g, &params)?;
    let rev = scs_reverse(&f, &g, &params)?;
    let th = theorem_for(a.theorem.as_deref(), params.shift(), f.level())?;
    let margin = scs_bound_margin(&rep, &f, &g, f.level(), th, a.theta)?;
    let mut r = Report::new("scs");
    r.put("pair", &a.pair)
        .put("shift", params.shift())
        .put("x", params.x())
        .put("value", rep.value)
        .put("reverse_value", rev)
        .put("terms", rep.terms)
        .put("theorem", th.name())
        .put("margin", margin);
    r.check("oracle_criterion", (rep.value - rev).abs() <= 1e-9 * (1.0 + rep.value.abs()));
    Ok(r)
}

fn scs_scaling(ctx: &Ctx, a: &ScsScalingArgs) -> Result<Report, CliError> {
    let (ca, cb, cc, cd) = match a.shift {
        Some(h) => (1, 1, 0, h),
        None => (a.a, a.b, a.c, a.d),
    };
    if a.mmin == 0 || a.mmax < a.mmin {
        return Err(CliError::Usage("need 0 < mmin <= mmax".into()));
    }
    let mut ms = Vec::new();
    let mut m = a.mmin;
    while m <= a.mmax {
        ms.push(m as f64);
        m *= 2;
    }
    let top = ScsParams::with_default_window(ca, cb, cc, cd, *ms.last().unwrap(), *ms.last().unwrap())?;
    let (f, g) = ctx.pair(&a.pair, scs_table_len(&top))?;
    let shift = ca * cd - cb * cc;
    let th = theorem_for(a.theorem.as_deref(), shift, f.level())?;
    let rep = scs_scaling_experiment(&f, &g, (ca, cb, cc, cd), &ms, f.level(), th, a.theta)?;
    let mut r = Report::new("scs-scaling");
    r.put("pair", &a.pair)
        .put("coefficients", format!("{ca},{cb},{cc},{cd}"))
        .put("shift", shift)
        .put("theorem", th.name())
        .put("slope", rep.slope)
        .put("margin_slope", rep.margin_slope)
        .put("max_margin", rep.max_margin());
    if shift == 0 {
        r.check("slope_criterion", (rep.slope - 1.0).abs() <= SCS_DIAGONAL_TOL);
    } else {
        r.check("slope_criterion", rep.slope <= SCS_SHIFT_SLOPE);
        r.check("margin_criterion", rep.margin_slope <= MARGIN_SLOPE && rep.max_margin() <= 1.0);
    }
    let stem = format!("scs_scaling_shift{shift}");
    r.table(&stem, rep.to_csv());
    r.plot(
        &stem,
        loglog_svg(
            &format!("|S| and bound, shift {shift}"),
            "X",
            &[
                ("|S|", rep.rows.iter().map(|r| (r.x, r.s.abs())).collect()),
                ("bound", rep.rows.iter().map(|r| (r.x, r.bound)).collect()),
            ],
        ),
    );
    Ok(r)
}

fn amplify(ctx: &Ctx, a: &AmplifyArgs) -> Result<Report, CliError> {
    let (fl, gl) = split_pair(&a.pair)?;
    let probe = ctx.table(gl, 1)?;
    let n = a.n.unwrap_or((ctx.table(fl, 1)?.level() * probe.level()) as f64);
    let lmax = *a.lengths.iter().max().ok_or_else(|| CliError::Usage("empty --lengths".into()))?;
    let rmax = primes_up_to(lmax).last().copied().unwrap_or(1).pow(2);
    let f = ctx.table(fl, (2.5 * n) as usize + 1)?;
    let g = ctx.table(gl, ((2.5 * n) as usize + 1) * rmax as usize)?;
    let rep = amplifier_experiment(&f, &g, n, &a.lengths, &default_u())?;
    let mut r = Report::new("amplify");
    r.put("pair", &a.pair)
        .put("n", n)
        .put("t", rep.t)
        .put("slope", rep.slope)
        .put("max_statistic", rep.max_statistic());
    r.check("criterion", rep.bounded());
    let mut csv = String::from("L,primes,S,S1,statistic\n");
    for row in &rep.rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.length,
            row.primes,
            ff(row.s),
            ff(row.s1),
            ff(row.statistic)
        ));
    }
    r.table("amplify", csv);
    Ok(r)
}

fn circle(ctx: &Ctx, a: &CircleArgs) -> Result<Report, CliError> {
    let (fl, gl) = split_pair(&a.pair)?;
    let g0 = ctx.table(gl, a.length.pow(2) as usize)?;
    let f0 = ctx.table(fl, 1)?;
    let (p, q) = (f0.level(), g0.level());
    let n = a.n.unwrap_or((p * q) as f64);
    let amp = amplifier_coeffs(&g0, a.length, p, q)?;
    let moduli = match a.moduli_scale {
        Some(c) => ModuliConfig::new(c, &amp)?,
        None => ModuliConfig::for_amplifier(&amp)?,
    };
    let f = ctx.table(fl, (2.5 * n) as usize + 1)?;
    let g = ctx.table(gl, (3.0 * amp.max_r() as f64 * n) as usize + 1)?;
    let c = circle_decomposition_check(&f, &g, n, &amp, &moduli, &default_u(), &default_v())?;
    let mut r = Report::new("circle-check");
    r.put("pair", &a.pair)
        .put("n", n)
        .put("length", a.length)
        .put("moduli_scale", moduli.c)
        .put("moduli", c.moduli)
        .put("direct", c.direct)
        .put("congruence", c.congruence)
        .put("discrepancy", c.discrepancy)
        .put("relative", c.relative);
    r.check("criterion", c.relative <= CIRCLE_TOL);
    Ok(r)
}

fn ap_sum(ctx: &Ctx, a: &ApArgs) -> Result<Report, CliError> {
    let (f, g) = ctx.pair(&a.pair, a.x.max(a.y).max(1.0) as usize)?;
    let cs: Vec<u64> = match a.c {
        Some(c) => vec![c],
        None => (2..=a.cmax).filter(|&c| gcd(a.a * a.b, c) == 1).collect(),
    };
    let mut r = Report::new("ap-sum");
    r.put("pair", &a.pair)
        .put("x", a.x)
        .put("y", a.y)
        .put("alpha", a.alpha)
        .put("beta", a.beta);
    let mut csv = String::from("c,value,shape,margin\n");
    let mut worst: f64 = 0.0;
    let mut constant = None;
    for &c in &cs {
        let s = ap_constrained_sum(&f, &g, a.x, a.y, a.a, a.b, c, a.alpha, a.beta)?;
        csv.push_str(&format!("{c},{},{},{}\n", ff(s.value), ff(s.shape), ff(s.margin)));
        worst = worst.max(s.margin);
        constant = s.constant;
    }
    r.put("moduli", cs.len()).put("max_margin", worst);
    match constant {
        Some(k) => {
            r.put("constant", k);
            r.check("criterion", worst <= k);
        }
        None => {
            r.check("criterion", worst.is_finite());
        }
    }
    r.table("ap_sum", csv);
    Ok(r)
}

fn pv(ctx: &Ctx, a: &PvArgs) -> Result<Report, CliError> {
    let (fl, gl) = split_pair(&a.pair)?;
    let (p, q) = (ctx.table(fl, 1)?.level(), ctx.table(gl, 1)?.level());
    let ns = pv_dyadic_range(p, q);
    let len = (2.5 * ns.last().unwrap()) as usize + 1;
    let (f, g) = ctx.pair(&a.pair, len)?;
    let rep = pv_experiment(&f, &g, &ns, &default_u())?;
    let max_ratio = rep.rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let trivial_ok = rep.rows.iter().all(|r| r.sum.abs() <= r.trivial);
    let mut r = Report::new("pv");
    r.put("pair", &a.pair)
        .put("conductor", rep.conductor)
        .put("slope", rep.slope)
        .put("max_ratio", max_ratio);
    r.check("criterion", rep.slope <= PV_SLOPE && max_ratio <= 1.0 && trivial_ok);
    let mut csv = String::from("N,sum,trivial,shape,ratio\n");
    for row in &rep.rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            ff(row.n),
            ff(row.sum),
            ff(row.trivial),
            ff(row.shape),
            ff(row.ratio)
        ));
    }
    r.table("pv", csv);
    r.plot(
        "pv",
        loglog_svg(
            "|sum| and sqrt(N sqrt(Q))",
            "N",
            &[
                ("|sum|", rep.rows.iter().map(|r| (r.n, r.sum.abs())).collect()),
                ("shape", rep.rows.iter().map(|r| (r.n, r.shape)).collect()),
            ],
        ),
    );
    Ok(r)
}

fn lvalue(ctx: &Ctx, a: &LvalueArgs) -> Result<Report, CliError> {
    let (fl, gl) = split_pair(&a.pair)?;
    let pq = (ctx.table(fl, 1)?.level() * ctx.table(gl, 1)?.level()) as usize;
    let x_cut = a.x_cut.unwrap_or(60 * pq);
    let (f, g) = ctx.pair(&a.pair, x_cut)?;
    let s = Complex64::new(0.5, a.t);
    let req = |s, scheme| LValueRequest { s, x_cut, scheme };
    let one = lvalue_estimate(&f, &g, &req(s, Scheme::GammaOnly))?;
    let two = lvalue_estimate(&f, &g, &req(s, Scheme::Gaussian))?;
    let conj = lvalue_estimate(&f, &g, &req(s.conj(), Scheme::Gaussian))?;
    let agreement = (one.value - two.value).norm() / two.value.norm().max(f64::MIN_POSITIVE);
    let symmetry = (two.value - conj.value.conj()).norm();
    let mut r = Report::new("lvalue");
    r.put("pair", &a.pair)
        .put("s", fmt_c(s))
        .put("x_cut", x_cut)
        .put("conductor", two.conductor)
        .put("spectral_factor", two.spectral)
        .put("root_number", two.root_number)
        .put(&format!("value_{}", Scheme::GammaOnly.name()), fmt_c(one.value))
        .put(&format!("value_{}", Scheme::Gaussian.name()), fmt_c(two.value))
        .put("normalized", two.normalized)
        .put("quotient", fmt_c(two.quotient))
        .put("scheme_agreement", agreement);
    r.check("agreement_criterion", agreement <= LVALUE_SCHEME_TOL);
    r.put("conjugate_symmetry", symmetry);
    r.check("symmetry_criterion", symmetry <= LVALUE_SYMMETRY_TOL * (1.0 + two.value.norm()));
    Ok(r)
}
