//! Python bindings: a `Bundle` class plus the classification and reduction
//! functions. Library errors surface as `ValueError`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use hnpoly::classify::{
    is_globally_generated, is_quotient, is_quotient_polygonal, subbundle_necessary,
    subbundle_sufficient, ClassificationVerdict,
};
use hnpoly::cli::{canonical_json, parse_bundle, render_svg, Alignment};
use hnpoly::dominance::{common_factor_decompose, slopewise_dominates};
use hnpoly::pairing::{deg_pair, deg_pair_nonneg};
use hnpoly::reduction::{c_value, key_inequality_check, max_slope_reduction, slope_reduction_sequence};
use hnpoly::verify::{run_property_suite, EnumBounds};
use hnpoly::{Bundle, SliceMode, Slope};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn slope_arg(text: &str) -> PyResult<Slope> {
    text.parse().map_err(value_err)
}

/// An isomorphism class of vector bundles, i.e. an HN polygon.
#[pyclass(name = "Bundle", module = "pyhnpoly", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyBundle(Bundle);

#[pymethods]
impl PyBundle {
    /// Parses an expression such as `"O(1/2)^3 + O(-1)"`.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse_bundle(text).map(PyBundle).map_err(value_err)
    }

    #[staticmethod]
    fn zero() -> Self {
        PyBundle(Bundle::zero())
    }

    /// Builds a bundle from `(num, den, mult)` triples.
    #[staticmethod]
    fn from_factors(factors: Vec<(i64, i64, i64)>) -> PyResult<Self> {
        let pairs = factors
            .into_iter()
            .map(|(n, d, m)| Slope::new(n, d).map(|s| (s, m)))
            .collect::<hnpoly::Result<Vec<_>>>()
            .map_err(value_err)?;
        Bundle::from_factors(pairs).map(PyBundle).map_err(value_err)
    }

    #[getter]
    fn rank(&self) -> u64 {
        self.0.rank()
    }

    #[getter]
    fn degree(&self) -> i64 {
        self.0.degree()
    }

    /// `(num, den, mult)` for each HN factor, slopes decreasing.
    #[getter]
    fn factors(&self) -> Vec<(i64, i64, u64)> {
        self.0.factors().iter().map(|f| (f.slope.num(), f.slope.den(), f.mult)).collect()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn is_semistable(&self) -> bool {
        self.0.is_semistable()
    }

    fn dual(&self) -> Self {
        PyBundle(self.0.dual())
    }

    fn tensor(&self, other: &PyBundle) -> PyResult<Self> {
        self.0.tensor(&other.0).map(PyBundle).map_err(value_err)
    }

    fn direct_sum(&self, other: &PyBundle) -> PyResult<Self> {
        self.0.direct_sum(&other.0).map(PyBundle).map_err(value_err)
    }

    fn twist(&self, slope: &str) -> PyResult<Self> {
        self.0.twist(slope_arg(slope)?).map(PyBundle).map_err(value_err)
    }

    fn stretch(&self, c: u64) -> PyResult<Self> {
        self.0.stretch(c).map(PyBundle).map_err(value_err)
    }

    /// `mode` is one of `le`, `lt`, `ge`, `gt`.
    fn slice(&self, mu: &str, mode: &str) -> PyResult<Self> {
        let mode: SliceMode = mode.parse().map_err(value_err)?;
        Ok(PyBundle(self.0.slice(slope_arg(mu)?, mode)))
    }

    fn to_json(&self) -> PyResult<String> {
        canonical_json(&self.0).map_err(value_err)
    }

    fn __add__(&self, other: &PyBundle) -> PyResult<Self> {
        self.direct_sum(other)
    }

    fn __mul__(&self, other: &PyBundle) -> PyResult<Self> {
        self.tensor(other)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Bundle({:?})", self.0.to_string())
    }
}

fn verdict_tuple(v: ClassificationVerdict) -> (bool, Option<String>, Option<String>) {
    (v.answer, v.witness_mu.map(|s| s.to_string()), v.failed_condition.map(|c| c.to_string()))
}

/// `(answer, witness_mu, failed_condition)`.
#[pyfunction]
fn quotient(e: &PyBundle, f: &PyBundle) -> (bool, Option<String>, Option<String>) {
    verdict_tuple(is_quotient(&e.0, &f.0))
}

#[pyfunction]
fn quotient_polygonal(e: &PyBundle, f: &PyBundle) -> (bool, Option<String>, Option<String>) {
    verdict_tuple(is_quotient_polygonal(&e.0, &f.0))
}

#[pyfunction]
fn sub_sufficient(e: &PyBundle, d: &PyBundle) -> bool {
    subbundle_sufficient(&e.0, &d.0).answer
}

#[pyfunction]
fn sub_necessary(e: &PyBundle, d: &PyBundle) -> bool {
    subbundle_necessary(&e.0, &d.0)
}

#[pyfunction]
fn globally_generated(f: &PyBundle, n: u64) -> PyResult<bool> {
    is_globally_generated(&f.0, n).map_err(value_err)
}

#[pyfunction]
fn dominates(v: &PyBundle, w: &PyBundle) -> bool {
    slopewise_dominates(&v.0, &w.0)
}

/// `(U, V', W')` with `V = U ⊕ V'` and `W = U ⊕ W'`.
#[pyfunction]
fn decompose(v: &PyBundle, w: &PyBundle) -> PyResult<(PyBundle, PyBundle, PyBundle)> {
    let d = common_factor_decompose(&v.0, &w.0).map_err(value_err)?;
    Ok((PyBundle(d.common), PyBundle(d.v_rest), PyBundle(d.w_rest)))
}

#[pyfunction]
fn pairing(v: &PyBundle, w: &PyBundle) -> PyResult<i64> {
    deg_pair(&v.0, &w.0).map_err(value_err)
}

#[pyfunction]
fn pairing_nonneg(v: &PyBundle, w: &PyBundle) -> PyResult<i64> {
    deg_pair_nonneg(&v.0, &w.0).map_err(value_err)
}

#[pyfunction]
fn c(e: &PyBundle, f: &PyBundle, q: &PyBundle) -> PyResult<i64> {
    c_value(&e.0, &f.0, &q.0).map_err(value_err)
}

/// `(c, violated_hypothesis)`; the hypothesis is `None` when all hold.
#[pyfunction]
fn key_inequality(e: &PyBundle, f: &PyBundle, q: &PyBundle) -> PyResult<(i64, Option<String>)> {
    let r = key_inequality_check(&e.0, &f.0, &q.0).map_err(value_err)?;
    Ok((r.c, r.violated_hypothesis.map(|h| h.to_string())))
}

#[pyfunction]
fn max_reduction(v: &PyBundle, w: &PyBundle) -> PyResult<PyBundle> {
    max_slope_reduction(&v.0, &w.0).map(PyBundle).map_err(value_err)
}

/// List of `(F_n, U_n, c_n)`.
#[pyfunction]
fn reduce(e: &PyBundle, f: &PyBundle, q: &PyBundle) -> PyResult<Vec<(PyBundle, PyBundle, i64)>> {
    let t = slope_reduction_sequence(&e.0, &f.0, &q.0).map_err(value_err)?;
    Ok(t.steps.into_iter().map(|s| (PyBundle(s.f), PyBundle(s.u), s.c)).collect())
}

#[pyfunction]
#[pyo3(signature = (bundles, align = "left"))]
fn svg(bundles: Vec<PyBundle>, align: &str) -> PyResult<String> {
    let align: Alignment = align.parse().map_err(value_err)?;
    let bs: Vec<Bundle> = bundles.into_iter().map(|b| b.0).collect();
    Ok(render_svg(&bs, align))
}

/// Runs the property suite and returns the report as JSON text.
#[pyfunction]
#[pyo3(signature = (max_rank = 2, max_deg = 2, max_den = 1))]
fn verify(max_rank: u64, max_deg: u64, max_den: u64) -> PyResult<String> {
    let bounds = EnumBounds::new(max_rank, max_deg, max_den).map_err(value_err)?;
    let report = run_property_suite(&bounds).map_err(value_err)?;
    canonical_json(&report).map_err(value_err)
}

#[pymodule]
fn pyhnpoly(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBundle>()?;
    m.add_function(wrap_pyfunction!(quotient, m)?)?;
    m.add_function(wrap_pyfunction!(quotient_polygonal, m)?)?;
    m.add_function(wrap_pyfunction!(sub_sufficient, m)?)?;
    m.add_function(wrap_pyfunction!(sub_necessary, m)?)?;
    m.add_function(wrap_pyfunction!(globally_generated, m)?)?;
    m.add_function(wrap_pyfunction!(dominates, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(pairing, m)?)?;
    m.add_function(wrap_pyfunction!(pairing_nonneg, m)?)?;
    m.add_function(wrap_pyfunction!(c, m)?)?;
    m.add_function(wrap_pyfunction!(key_inequality, m)?)?;
    m.add_function(wrap_pyfunction!(max_reduction, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(svg, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
