//! Python bindings: `import ntw`.

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ntw_core::analysis::SmoothWindow;
use ntw_core::deltam::{delta_eval, DeltaConfig};
use ntw_core::expsum::{self, SumMode};
use ntw_core::newform::{build_table, lookup, EigenvalueTable};
use ntw_core::rankin::lfunc::Scheme;
use ntw_core::rankin::{self, LValueRequest};
use ntw_core::scs::{scs_direct, ScsParams};
use ntw_core::voronoi::{required_terms, voronoi_check, VoronoiOptions};
use ntw_core::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn table(label: &str, n: usize) -> PyResult<EigenvalueTable> {
    let spec = lookup(label).ok_or_else(|| PyValueError::new_err(format!("unknown form '{label}'")))?;
    build_table(&spec, n.max(1)).map_err(py_err)
}

/// Ramanujan sum c_q(n); `brute=True` sums the characters directly.
#[pyfunction]
#[pyo3(signature = (q, n, brute=false))]
fn ramanujan_sum(q: u64, n: i64, brute: bool) -> PyResult<i64> {
    let mode = if brute { SumMode::Brute } else { SumMode::Formula };
    expsum::ramanujan_sum(q, n, mode).map_err(py_err)
}

#[pyfunction]
fn kloosterman_sum(m: i64, n: i64, c: u64) -> PyResult<Complex64> {
    expsum::kloosterman_sum(m, n, c).map_err(py_err)
}

#[pyfunction]
fn weil_margin(m: i64, n: i64, c: u64) -> PyResult<f64> {
    expsum::weil_margin(m, n, c).map_err(py_err)
}

/// Normalized Hecke eigenvalues lambda(1..=n) of a catalog form.
#[pyfunction]
fn eigenvalues(label: &str, n: usize) -> PyResult<Vec<f64>> {
    Ok(table(label, n)?.lambdas()[1..=n].to_vec())
}

#[pyfunction]
#[pyo3(signature = (form, a, c, lo=50.0, hi=200.0))]
fn voronoi<'py>(py: Python<'py>, form: &str, a: i64, c: u64, lo: f64, hi: f64) -> PyResult<Bound<'py, PyDict>> {
    let w = SmoothWindow::bump(lo, hi).map_err(py_err)?;
    let level = lookup(form)
        .ok_or_else(|| PyValueError::new_err(format!("unknown form '{form}'")))?
        .level;
    let t = table(form, required_terms(level, c, &w))?;
    let r = py
        .detach(|| voronoi_check(&t, a, c, &w, &VoronoiOptions::default()))
        .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("lhs", r.lhs)?;
    d.set_item("rhs", r.rhs)?;
    d.set_item("relative_error", r.rel_error)?;
    d.set_item("n_rhs", r.n_rhs)?;
    Ok(d)
}

/// Calibrated constant c0 and the values delta(n) for the given n.
#[pyfunction]
fn delta_method(q: u64, ns: Vec<i64>) -> PyResult<(f64, Vec<f64>)> {
    let cfg = DeltaConfig::calibrated(q).map_err(py_err)?;
    let vals = ns
        .iter()
        .map(|&n| delta_eval(n, &cfg))
        .collect::<Result<Vec<_>, _>>()
        .map_err(py_err)?;
    Ok((cfg.c0().expect("calibrated"), vals))
}

/// sum_m lambda_f(am + c) lambda_g(bm + d) W(m/M) with the default bump window.
#[pyfunction]
#[pyo3(signature = (f, g, a, b, c, d, m))]
fn scs(f: &str, g: &str, a: i64, b: i64, c: i64, d: i64, m: f64) -> PyResult<f64> {
    let p = ScsParams::with_default_window(a, b, c, d, m, m).map_err(py_err)?;
    let need = (a.abs() as f64 * 2.5 * m + c.abs() as f64).max(b.abs() as f64 * 2.5 * m + d.abs() as f64) as usize + 1;
    let (ft, gt) = (table(f, need)?, table(g, need)?);
    Ok(scs_direct(&ft, &gt, &p).map_err(py_err)?.value)
}

#[pyfunction]
fn rs_sum(f: &str, g: &str, n: f64) -> PyResult<f64> {
    let len = (2.5 * n) as usize + 1;
    rankin::smooth_rs_sum(&table(f, len)?, &table(g, len)?, n, &rankin::default_u()).map_err(py_err)
}

/// L(f x g, 1/2 + it) with the chosen cutoff scheme ("gamma-only" or "gaussian").
#[pyfunction]
#[pyo3(signature = (f, g, t=0.0, x_cut=None, scheme="gaussian"))]
fn lvalue(f: &str, g: &str, t: f64, x_cut: Option<usize>, scheme: &str) -> PyResult<Complex64> {
    let scheme = Scheme::parse(scheme).ok_or_else(|| PyValueError::new_err(format!("unknown scheme '{scheme}'")))?;
    let (ft, gt) = (table(f, 1)?, table(g, 1)?);
    let x_cut = x_cut.unwrap_or(60 * (ft.level() * gt.level()) as usize);
    let (ft, gt) = (table(f, x_cut)?, table(g, x_cut)?);
    let req = LValueRequest {
        s: Complex64::new(0.5, t),
        x_cut,
        scheme,
    };
    Ok(rankin::lvalue_estimate(&ft, &gt, &req).map_err(py_err)?.value)
}

#[pymodule]
pub fn ntw(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(ramanujan_sum, m)?)?;
    m.add_function(wrap_pyfunction!(kloosterman_sum, m)?)?;
    m.add_function(wrap_pyfunction!(weil_margin, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(voronoi, m)?)?;
    m.add_function(wrap_pyfunction!(delta_method, m)?)?;
    m.add_function(wrap_pyfunction!(scs, m)?)?;
    m.add_function(wrap_pyfunction!(rs_sum, m)?)?;
    m.add_function(wrap_pyfunction!(lvalue, m)?)?;
    Ok(())
}
