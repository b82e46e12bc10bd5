//! Acceptance suite: one PASS/FAIL line per criterion. Run with
//! `cargo test -p ntw-core --test acceptance`.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ntw_core::analysis::SmoothWindow;
use ntw_core::deltam::{check_kernel, indicator_residual, DeltaConfig};
use ntw_core::expsum::{factorize, gcd, kloosterman_crt_sides, mult_fn, primes_up_to, ramanujan_mismatches, weil_margin, MultFn};
use ntw_core::newform::{amplifier_coeffs, build_table, build_table_with, ellcurve_ap, lookup, BuildOptions, EigenvalueTable};
use ntw_core::rankin::lfunc::Scheme;
use ntw_core::rankin::{
    amplifier_experiment, ap_constrained_sum, circle_decomposition_check, default_u, default_v, lvalue_estimate, LValueRequest,
    ModuliConfig,
};
use ntw_core::scs::{scs_scaling_experiment, Theorem, THETA_HOLOMORPHIC};
use ntw_core::voronoi::{required_terms, voronoi_check, VoronoiOptions};

// criterion 1
const RAMANUJAN_RANGE: u64 = 300;
const RAMANUJAN_TIME: Duration = Duration::from_secs(10);
// criterion 2
const CRT_PAIRS: usize = 50;
const CRT_CMAX: u64 = 100;
const CRT_SEED: u64 = 1;
const CRT_TOL: f64 = 1e-8;
// criterion 3
const WEIL_CMAX: u64 = 1000;
// criterion 4
const AP_PRIME_LIMIT: usize = 2000;
const DELIGNE_RANGE: usize = 100_000;
const CONGRUENCE_RANGE: usize = 10_000;
// criterion 5
const HECKE_BOUND: usize = 300;
const HECKE_TOL: f64 = 1e-10;
// criterion 6
const VORONOI_LEVEL1_TOL: f64 = 1e-6;
const VORONOI_LEVEL11_TOL: f64 = 1e-5;
const VORONOI_TIME: Duration = Duration::from_secs(60);
const VORONOI_SUPPORT: (f64, f64) = (50.0, 200.0);
// criterion 7
const C0_TOL: f64 = 0.05;
// criterion 8
const CIRCLE_TOL: f64 = 1e-9;
// criterion 9: S_1 = S identically, so only rounding may remain
const AMPLIFIER_LENGTHS: [u64; 5] = [10, 16, 24, 32, 40];
const AMPLIFIER_FLOOR: f64 = 1e-12;
// criterion 10
const SCS_SHIFT_SLOPE: f64 = 0.80;
const SCS_DIAGONAL_TOL: f64 = 0.1;
const MARGIN_SLOPE: f64 = 0.1;
const MARGIN_MAX: f64 = 1.0;
// criterion 11
const LVALUE_SCHEME_TOL: f64 = 1e-4;
const LVALUE_SYMMETRY_TOL: f64 = 1e-9;
// criterion 12
const AP_X: f64 = 500.0;
const AP_CMAX: u64 = 50;

type Check = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Check);

fn table(label: &str, n: usize) -> Result<EigenvalueTable, String> {
    build_table(&lookup(label).ok_or("unknown form")?, n).map_err(|e| e.to_string())
}

fn c1_ramanujan() -> Check {
    let t = Instant::now();
    let bad = ramanujan_mismatches(RAMANUJAN_RANGE, RAMANUJAN_RANGE as i64).map_err(|e| e.to_string())?;
    let dt = t.elapsed();
    Ok((
        bad.is_empty() && dt < RAMANUJAN_TIME,
        format!(
            "{} mismatches over q, |n| <= {RAMANUJAN_RANGE}; {:.2} s",
            bad.len(),
            dt.as_secs_f64()
        ),
    ))
}

fn c2_kloosterman_crt() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(CRT_SEED);
    let mut pairs = Vec::new();
    while pairs.len() < CRT_PAIRS {
        let (a, b) = (rng.random_range(2..=CRT_CMAX), rng.random_range(2..=CRT_CMAX));
        if gcd(a, b) == 1 {
            pairs.push((a, b));
        }
    }
    let mut worst: f64 = 0.0;
    for (c1, c2) in pairs {
        for m in 1..=5 {
            for n in 1..=5 {
                let (l, r) = kloosterman_crt_sides(m, n, c1, c2).map_err(|e| e.to_string())?;
                worst = worst.max((l - r).norm());
            }
        }
    }
    Ok((worst <= CRT_TOL, format!("max |lhs - rhs| = {worst:.3e} over {CRT_PAIRS} pairs")))
}

fn c3_weil() -> Check {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for c in 1..=WEIL_CMAX {
        if !factorize(c).map_err(|e| e.to_string())?.is_squarefree() {
            continue;
        }
        count += 1;
        for m in 0..=10 {
            for n in 0..=10 {
                worst = worst.max(weil_margin(m, n, c).map_err(|e| e.to_string())?);
            }
        }
    }
    Ok((worst <= 1.0, format!("max margin {worst:.6} over {count} squarefree moduli")))
}

fn c4_coefficients() -> Check {
    let spec = lookup("level11").unwrap();
    let curve = spec.cross_check.unwrap();
    // eta-product expansion only; the point counts are the second source
    let eta = build_table_with(&spec, AP_PRIME_LIMIT, BuildOptions { cross_check_limit: 0 }).map_err(|e| e.to_string())?;
    let mut ap_bad = 0;
    let primes = primes_up_to(AP_PRIME_LIMIT as u64);
    for &p in &primes {
        let ap = ellcurve_ap(&curve, p).map_err(|e| e.to_string())?;
        if BigInt::from(ap) != *eta.coefficient(p as usize) {
            ap_bad += 1;
        }
    }
    let mut deligne = Vec::new();
    for label in ["delta", "level11", "level5"] {
        deligne.push((label, table(label, DELIGNE_RANGE)?.deligne_ratio()));
    }
    let delta = table("delta", CONGRUENCE_RANGE)?;
    let m = BigInt::from(691);
    let mut cong_bad = 0;
    for n in 1..=CONGRUENCE_RANGE {
        let s = mult_fn(MultFn::Sigma(11), n as u64).map_err(|e| e.to_string())?;
        if (delta.coefficient(n) - s) % &m != BigInt::from(0) {
            cong_bad += 1;
        }
    }
    let worst = deligne.iter().map(|d| d.1).fold(0.0, f64::max);
    Ok((
        ap_bad == 0 && worst <= 1.0 && cong_bad == 0,
        format!(
            "a(p) mismatches {ap_bad}/{}; max |lambda|/d {worst:.6}; 691-congruence failures {cong_bad}",
            primes.len()
        ),
    ))
}

fn c5_hecke() -> Check {
    let mut worst: f64 = 0.0;
    for label in ["delta", "level11"] {
        let t = table(label, HECKE_BOUND * HECKE_BOUND)?;
        worst = worst.max(t.hecke_bilinear_residual(HECKE_BOUND).map_err(|e| e.to_string())?);
    }
    Ok((worst <= HECKE_TOL, format!("max residual {worst:.3e} for m, n <= {HECKE_BOUND}")))
}

fn c6_voronoi() -> Check {
    let w = SmoothWindow::bump(VORONOI_SUPPORT.0, VORONOI_SUPPORT.1).unwrap();
    let cases = [
        ("delta", 1, 1, VORONOI_LEVEL1_TOL),
        ("delta", 1, 2, VORONOI_LEVEL1_TOL),
        ("delta", 2, 5, VORONOI_LEVEL1_TOL),
        ("delta", 3, 7, VORONOI_LEVEL1_TOL),
        ("level11", 1, 3, VORONOI_LEVEL11_TOL),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, a, c, tol) in cases {
        let t0 = Instant::now();
        let spec = lookup(label).unwrap();
        let t = table(label, required_terms(spec.level, c, &w))?;
        let r = voronoi_check(&t, a, c, &w, &VoronoiOptions::default()).map_err(|e| e.to_string())?;
        let dt = t0.elapsed();
        ok &= r.rel_error <= tol && dt < VORONOI_TIME;
        parts.push(format!("{label}({a},{c}) {:.1e} {:.1}s", r.rel_error, dt.as_secs_f64()));
    }
    Ok((ok, parts.join("; ")))
}

fn c7_delta() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for q in [10u64, 20, 40] {
        let cfg = DeltaConfig::calibrated(q).map_err(|e| e.to_string())?;
        let c0 = cfg.c0().unwrap();
        let (_, res) = indicator_residual(&cfg).map_err(|e| e.to_string())?;
        let limit = 1e-8f64.max((q as f64).powi(-4));
        ok &= (c0 - 1.0).abs() <= C0_TOL && res <= limit;
        parts.push(format!("Q={q} c0={c0:.6} max|delta|={res:.1e}"));
    }
    let k = check_kernel(&DeltaConfig::new(10).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ok &= k.passes();
    parts.push(format!(
        "kernel: {} support violations, flatness {:.1e}, mass constant {:.3}",
        k.support_violations, k.max_flatness_derivative, k.mass_constant
    ));
    Ok((ok, parts.join("; ")))
}

fn c8_circle() -> Check {
    let (n, l) = (55.0, 10);
    let f = table("level5", 200)?;
    let g0 = table("level11", 200)?;
    let amp = amplifier_coeffs(&g0, l, 5, 11).map_err(|e| e.to_string())?;
    let g = table("level11", (3.0 * amp.max_r() as f64 * n) as usize + 1)?;
    let moduli = ModuliConfig::for_amplifier(&amp).map_err(|e| e.to_string())?;
    let r = circle_decomposition_check(&f, &g, n, &amp, &moduli, &default_u(), &default_v()).map_err(|e| e.to_string())?;
    Ok((
        r.relative <= CIRCLE_TOL,
        format!(
            "S1 = {:.12}, relative discrepancy {:.2e} over {} moduli",
            r.direct, r.relative, r.moduli
        ),
    ))
}

fn c9_amplifier() -> Check {
    let n = 55.0;
    let rmax = primes_up_to(*AMPLIFIER_LENGTHS.iter().max().unwrap())
        .last()
        .copied()
        .unwrap()
        .pow(2) as usize;
    let f = table("level5", 200)?;
    let g = table("level11", (2.5 * n) as usize * rmax + rmax)?;
    let r = amplifier_experiment(&f, &g, n, &AMPLIFIER_LENGTHS, &default_u()).map_err(|e| e.to_string())?;
    let stats: Vec<String> = r.rows.iter().map(|x| format!("L={}:{:.1e}", x.length, x.statistic)).collect();
    Ok((r.max_statistic() <= AMPLIFIER_FLOOR, stats.join(" ")))
}

fn c10_scs() -> Check {
    let ms: Vec<f64> = (8..=14).map(|k| 2f64.powi(k)).collect();
    let len = (2.5 * ms.last().unwrap()) as usize + 32;
    let delta = table("delta", len)?;
    let l11 = table("level11", len)?;
    let cases = [
        ("delta shift 1", &delta, 1, 0, 1, Theorem::NonzeroShift),
        ("delta shift 2", &delta, 1, 0, 2, Theorem::NonzeroShift),
        ("delta diagonal", &delta, 1, 0, 0, Theorem::Rankin),
        ("level11 shift 1 (p^3/4)", &l11, 11, 0, 1, Theorem::NonzeroShift),
        ("level11 shift 11 (p^1/4)", &l11, 11, 0, 11, Theorem::LevelMultiple),
        ("level11 diagonal", &l11, 11, 0, 0, Theorem::Rankin),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, t, p, c, d, th) in cases {
        let r = scs_scaling_experiment(t, t, (1, 1, c, d), &ms, p, th, THETA_HOLOMORPHIC).map_err(|e| e.to_string())?;
        let slope_ok = if d == 0 {
            (r.slope - 1.0).abs() <= SCS_DIAGONAL_TOL
        } else {
            r.slope <= SCS_SHIFT_SLOPE
        };
        let margin_ok = r.margin_slope <= MARGIN_SLOPE && r.max_margin() <= MARGIN_MAX;
        ok &= slope_ok && margin_ok;
        parts.push(format!(
            "{name}: slope {:.3}, margin slope {:.3}, max margin {:.2e}",
            r.slope,
            r.margin_slope,
            r.max_margin()
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn c11_lvalue() -> Check {
    let x_cut = 60 * 55;
    let f = table("level5", x_cut)?;
    let g = table("level11", x_cut)?;
    let eval = |s, scheme| lvalue_estimate(&f, &g, &LValueRequest { s, x_cut, scheme }).map_err(|e| e.to_string());
    let half = Complex64::new(0.5, 0.0);
    let a = eval(half, Scheme::GammaOnly)?;
    let b = eval(half, Scheme::Gaussian)?;
    let agreement = (a.value - b.value).norm() / b.value.norm();
    let mut sym: f64 = 0.0;
    for t in [1.0, 2.5] {
        let s = Complex64::new(0.5, t);
        let up = eval(s, Scheme::Gaussian)?.value;
        let down = eval(s.conj(), Scheme::Gaussian)?.value;
        sym = sym.max((up - down.conj()).norm() / (1.0 + up.norm()));
    }
    Ok((
        agreement <= LVALUE_SCHEME_TOL && sym <= LVALUE_SYMMETRY_TOL,
        format!(
            "L(1/2) = {:.12}, |L|/sqrt(pq) = {:.6}, scheme gap {agreement:.1e}, conjugate gap {sym:.1e}",
            b.value.re, b.normalized
        ),
    ))
}

fn c12_ap_sum() -> Check {
    let n = AP_X as usize;
    let f = table("level5", n)?;
    let g = table("level11", n)?;
    let mut worst: f64 = 0.0;
    let mut least = f64::INFINITY;
    let mut constant = 0.0;
    for c in 2..=AP_CMAX {
        let s = ap_constrained_sum(&f, &g, AP_X, AP_X, 1, 1, c, 0.0, 0.0).map_err(|e| e.to_string())?;
        worst = worst.max(s.margin);
        least = least.min(s.margin);
        constant = s.constant.unwrap();
    }
    Ok((
        worst <= constant,
        format!("margins in [{least:.4}, {worst:.4}] against constant {constant:.4} for c = 2..{AP_CMAX}"),
    ))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("ramanujan formula vs brute force", c1_ramanujan),
        ("kloosterman CRT factorization", c2_kloosterman_crt),
        ("weil margin", c3_weil),
        ("dual-oracle coefficients", c4_coefficients),
        ("hecke bilinear relation", c5_hecke),
        ("voronoi identity", c6_voronoi),
        ("delta-symbol expansion", c7_delta),
        ("congruence-averaging identity", c8_circle),
        ("amplifier consistency", c9_amplifier),
        ("shifted convolution scaling", c10_scs),
        ("L-value schemes and symmetry", c11_lvalue),
        ("AP-constrained sum margins", c12_ap_sum),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (ok, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!("{} {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
