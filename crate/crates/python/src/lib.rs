//! Python bindings: the coefficient stream, circle means and the inequality
//! checks, with reports returned as plain dicts and lists.

use std::str::FromStr;

use fhc_core::analysis::{self, radius_grid};
use fhc_core::construction::SparseCoeffStream;
use fhc_core::enumeration::{format_gauss, gauss_to_c64, parse_overrides, ConstructionParams, Enumerator, PhiSchedule};
use fhc_core::hypercyclicity;
use fhc_core::kernel_polys::{self, CoeffPoly};
use fhc_core::source::{ExpSeries, SparseSeries};
use fhc_core::{Exponent, FhcError};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn err(e: FhcError) -> PyErr {
    match e {
        FhcError::InvalidArgument(_) | FhcError::Parse { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn exponent(p: &Bound<'_, PyAny>) -> PyResult<Exponent> {
    if let Ok(s) = p.extract::<String>() {
        return Exponent::from_str(&s).map_err(err);
    }
    let v: f64 = p.extract()?;
    if v.is_infinite() && v > 0.0 {
        Ok(Exponent::Infinity)
    } else {
        Exponent::finite(v).map_err(err)
    }
}

fn to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (_, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let list = PyList::empty(py);
            for item in a {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(o) => {
            let dict = PyDict::new(py);
            for (k, item) in o {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn report<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &v)
}

fn coeff_list(q: &CoeffPoly) -> Vec<(i64, f64)> {
    q.nonzero().map(|(j, c)| (j, *c.numer() as f64 / *c.denom() as f64)).collect()
}

/// Rudin–Shapiro signs `p_m` as a list of `±1`.
#[pyfunction]
fn rudin_shapiro(m: usize) -> PyResult<Vec<i64>> {
    let q = kernel_polys::rudin_shapiro_poly(m).map_err(err)?;
    Ok(q.coeffs().iter().map(|c| c.to_integer()).collect())
}

/// de la Vallée-Poussin polynomial `p*_m` as `(degree, coefficient)` pairs.
#[pyfunction]
fn vallee_poussin(m: usize) -> PyResult<Vec<(i64, f64)>> {
    Ok(coeff_list(&kernel_polys::vallee_poussin_poly(m).map_err(err)?))
}

/// `(norm, bound, ones_count)` for one kernel polynomial.
#[pyfunction]
#[pyo3(signature = (family, m, p = None))]
fn kernel_norm(family: &str, m: usize, p: Option<&Bound<'_, PyAny>>) -> PyResult<(f64, f64, usize)> {
    let p = p.map(exponent).transpose()?.unwrap_or(Exponent::Infinity);
    let (q, bound) = match family {
        "rs" => (kernel_polys::rudin_shapiro_poly(m), kernel_polys::rudin_shapiro_bound(m)),
        "vp" => (kernel_polys::vallee_poussin_poly(m), kernel_polys::vallee_poussin_bound(m, p)),
        _ => return Err(PyValueError::new_err(format!("unknown family {family:?}; use 'rs' or 'vp'"))),
    };
    let q = q.map_err(err)?;
    let norm = kernel_polys::poly_pnorm(&q, p).map_err(err)?;
    Ok((norm.upper, bound, q.count_ones()))
}

/// `M_p` of `e^z` at radius `r`, as `(ln_value, ln_lower, ln_upper)`.
#[pyfunction]
fn exp_pmean(p: &Bound<'_, PyAny>, r: f64) -> PyResult<(f64, f64, f64)> {
    let m = analysis::pmean(&ExpSeries, exponent(p)?, r).map_err(err)?;
    Ok((m.ln_value, m.ln_lower, m.ln_upper))
}

/// `M_p` of `Σ a_j z^j/j!` given as `(j, a_j)` pairs.
#[pyfunction]
fn series_pmean(coeffs: Vec<(u64, Complex64)>, p: &Bound<'_, PyAny>, r: f64) -> PyResult<(f64, f64, f64)> {
    let m = analysis::pmean(&SparseSeries::new(coeffs), exponent(p)?, r).map_err(err)?;
    Ok((m.ln_value, m.ln_lower, m.ln_upper))
}

#[pyfunction]
fn lambda_table(py: Python<'_>, n: u64) -> PyResult<Bound<'_, PyAny>> {
    report(py, &analysis::lambda_table(n).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (n, samples = None))]
fn heat_kernel_mass(py: Python<'_>, n: u64, samples: Option<usize>) -> PyResult<Bound<'_, PyAny>> {
    report(py, &analysis::heat_kernel_mass(n, samples).map_err(err)?)
}

#[pyfunction]
fn lemma_sum_check(py: Python<'_>, m: u64, a: f64) -> PyResult<Bound<'_, PyAny>> {
    report(py, &analysis::lemma_sum_check(m, a).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (a, x0, x1, grid = 2000))]
fn loglinear_check(py: Python<'_>, a: f64, x0: f64, x1: f64, grid: usize) -> PyResult<Bound<'_, PyAny>> {
    report(py, &analysis::loglinear_check(a, x0, x1, grid).map_err(err)?)
}

#[pyfunction]
fn stirling_checks(py: Python<'_>, m_max: u64, x_max: u64) -> PyResult<Bound<'_, PyAny>> {
    report(py, &analysis::stirling_checks(1..=m_max, 2..=x_max).map_err(err)?)
}

/// The coefficient stream of the constructed function.
///
/// `overrides` uses the text format of the CLI override file, one
/// `degree, c_0, …, c_d, ℓ` line per leading target.
#[pyclass(frozen)]
struct Stream {
    inner: SparseCoeffStream,
}

#[pymethods]
impl Stream {
    #[new]
    #[pyo3(signature = (p = None, c = 1.0, gamma = 10.0, overrides = None, mode = "standard", phi_scale = 1.0))]
    fn new(
        p: Option<&Bound<'_, PyAny>>,
        c: f64,
        gamma: f64,
        overrides: Option<&str>,
        mode: &str,
        phi_scale: f64,
    ) -> PyResult<Self> {
        let params = match mode {
            "standard" => {
                let p = p.map(exponent).transpose()?.unwrap_or(Exponent::Infinity);
                ConstructionParams::standard(p, c, gamma)
            }
            "p1" => ConstructionParams::p1(PhiSchedule { scale: phi_scale, ..PhiSchedule::default() }),
            _ => return Err(PyValueError::new_err(format!("unknown mode {mode:?}"))),
        }
        .map_err(err)?;
        let enumerator = match overrides {
            Some(text) => Enumerator::with_overrides(parse_overrides(text).map_err(err)?),
            None => Ok(Enumerator::new()),
        }
        .map_err(err)?;
        Ok(Self { inner: SparseCoeffStream::new(params, enumerator).map_err(err)? })
    }

    /// `(q_k as text, ℓ_k, α_k)`; `α_k` is `None` when it overflows.
    fn class_info(&self, k: u32) -> PyResult<(String, u64, Option<u128>)> {
        let (pair, alpha) = self.inner.class(k).map_err(err)?;
        Ok((pair.poly.to_string(), pair.ell, alpha))
    }

    fn first_active(&self, k: u32) -> PyResult<Option<u64>> {
        self.inner.first_active(k).map_err(err)
    }

    /// `a_j` as an exact string and as a complex float.
    fn coeff(&self, j: u64) -> PyResult<(String, Complex64)> {
        let a = self.inner.coeff(j).map_err(err)?;
        Ok((format_gauss(&a), gauss_to_c64(&a)))
    }

    /// Nonzero `(j, a_j)` with `lo ≤ j < hi`.
    fn nonzero(&self, lo: u64, hi: u64) -> Vec<(u64, Complex64)> {
        fhc_core::source::TaylorSource::nonzero_in(&self.inner, lo, hi)
    }

    fn block_spec<'py>(&self, py: Python<'py>, n: u64) -> PyResult<Bound<'py, PyAny>> {
        report(py, &self.inner.block_spec(n).map_err(err)?)
    }

    fn b_set(&self, n: u64) -> PyResult<Vec<u64>> {
        self.inner.b_set(n).map_err(err)
    }

    fn active_blocks(&self, lo: u64, hi: u64) -> PyResult<Vec<u64>> {
        self.inner.active_blocks(lo, hi).map_err(err)
    }

    /// `(ln_value, ln_lower, ln_upper)` of `M_{f,p}(r)`.
    #[pyo3(signature = (r, p = None))]
    fn pmean(&self, r: f64, p: Option<&Bound<'_, PyAny>>) -> PyResult<(f64, f64, f64)> {
        let p = p.map(exponent).transpose()?.unwrap_or(self.inner.params().p);
        let m = analysis::pmean(&self.inner, p, r).map_err(err)?;
        Ok((m.ln_value, m.ln_lower, m.ln_upper))
    }

    /// Growth rows `M r^a e^{-r}` on `radii`, or on the default grid up to `r_max`.
    #[pyo3(signature = (radii = None, r_max = 2.0e4))]
    fn growth<'py>(&self, py: Python<'py>, radii: Option<Vec<f64>>, r_max: f64) -> PyResult<Bound<'py, PyAny>> {
        let params = self.inner.params();
        let radii = radii.unwrap_or_else(|| radius_grid(r_max));
        let rep = analysis::growth_report(&self.inner, params.p, params.growth_exponent(), &radii).map_err(err)?;
        report(py, &rep)
    }

    fn block_bound<'py>(&self, py: Python<'py>, n: u64) -> PyResult<Bound<'py, PyAny>> {
        report(py, &analysis::block_bound_check(&self.inner, n, self.inner.params().p).map_err(err)?)
    }

    #[pyo3(signature = (k, samples = 256))]
    fn visit<'py>(&self, py: Python<'py>, k: u32, samples: usize) -> PyResult<Bound<'py, PyAny>> {
        report(py, &hypercyclicity::visit_report(&self.inner, k, samples).map_err(err)?)
    }

    fn density<'py>(&self, py: Python<'py>, k: u32, horizon: u64) -> PyResult<Bound<'py, PyAny>> {
        report(py, &hypercyclicity::visit_density(&self.inner, k, horizon).map_err(err)?)
    }

    /// CSV of `a_j` for `lo ≤ j ≤ hi`.
    #[pyo3(signature = (lo, hi, nonzero_only = true))]
    fn csv(&self, lo: u64, hi: u64, nonzero_only: bool) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.write_csv(lo, hi, nonzero_only, &mut buf).map_err(err)?;
        String::from_utf8(buf).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }
}

#[pymodule]
fn fhc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Stream>()?;
    m.add_function(wrap_pyfunction!(rudin_shapiro, m)?)?;
    m.add_function(wrap_pyfunction!(vallee_poussin, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_norm, m)?)?;
    m.add_function(wrap_pyfunction!(exp_pmean, m)?)?;
    m.add_function(wrap_pyfunction!(series_pmean, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_table, m)?)?;
    m.add_function(wrap_pyfunction!(heat_kernel_mass, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_sum_check, m)?)?;
    m.add_function(wrap_pyfunction!(loglinear_check, m)?)?;
    m.add_function(wrap_pyfunction!(stirling_checks, m)?)?;
    Ok(())
}
