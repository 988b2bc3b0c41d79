//! Python bindings. Structured results cross the boundary as JSON and are
//! decoded into plain dicts.

use manin_toric::counting::{count_points as count_impl, zeta_partial as zeta_impl, HeightMode, DEFAULT_BOX_BUDGET};
use manin_toric::euler::EulerConfig;
use manin_toric::generators::{generators_for, DEFAULT_ENUMERATION_BUDGET};
use manin_toric::manin::{analyze as analyze_impl, manin_constant as manin_impl, ManinConfig};
use manin_toric::polynomial::GeneralizedPolynomial;
use manin_toric::problem::{ProblemFile, ToricProblem, Variety};
use manin_toric::quadrature::QuadConfig;
use manin_toric::volume;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(manin_toric, ManinError, PyValueError);

fn err(e: manin_toric::Error) -> PyErr {
    ManinError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| ManinError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

#[pyclass(name = "Polynomial", frozen)]
struct PyPolynomial {
    inner: GeneralizedPolynomial,
}

#[pymethods]
impl PyPolynomial {
    #[new]
    #[pyo3(signature = (text, nvars=None))]
    fn new(text: &str, nvars: Option<usize>) -> PyResult<Self> {
        Ok(PyPolynomial { inner: GeneralizedPolynomial::parse(text, nvars).map_err(err)? })
    }

    #[getter]
    fn nvars(&self) -> usize {
        self.inner.nvars
    }

    fn degree(&self) -> String {
        manin_toric::rational::format_q(&self.inner.top_degree())
    }

    fn is_homogeneous(&self) -> bool {
        self.inner.is_homogeneous()
    }

    fn is_elliptic(&self) -> bool {
        self.inner.check_elliptic().is_ok()
    }

    fn __call__(&self, x: Vec<f64>) -> PyResult<f64> {
        if x.len() != self.inner.nvars {
            return Err(PyValueError::new_err("wrong number of variables"));
        }
        Ok(self.inner.eval(&x))
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Polynomial('{}')", self.inner)
    }
}

#[pyclass(name = "Problem", frozen)]
struct PyProblem {
    inner: Variety,
}

#[pymethods]
impl PyProblem {
    #[staticmethod]
    fn projective_torus(n: usize) -> PyResult<Self> {
        Ok(PyProblem { inner: Variety::Toric(ToricProblem::new(n + 1, Vec::new()).map_err(err)?) })
    }

    #[staticmethod]
    fn hypersurface(a: Vec<u64>) -> PyResult<Self> {
        ToricProblem::hypersurface(&a).map_err(err)?;
        Ok(PyProblem { inner: Variety::Hypersurface(a) })
    }

    #[staticmethod]
    fn from_matrix(matrix: Vec<Vec<i64>>) -> PyResult<Self> {
        let n = matrix.first().map(|r| r.len()).ok_or_else(|| PyValueError::new_err("empty matrix"))?;
        Ok(PyProblem { inner: Variety::Toric(ToricProblem::new(n, matrix).map_err(err)?) })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let pf = ProblemFile::from_json(text).map_err(err)?;
        Ok(PyProblem { inner: pf.variety().map_err(err)? })
    }

    #[getter]
    fn ncoords(&self) -> usize {
        self.inner.ncoords()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn sign_count(&self) -> PyResult<u64> {
        Ok(self.inner.toric().map_err(err)?.sign_count().map_err(err)?.value)
    }

    fn matrix(&self) -> PyResult<Vec<Vec<i64>>> {
        Ok(self.inner.toric().map_err(err)?.matrix)
    }

    fn __repr__(&self) -> String {
        match &self.inner {
            Variety::Toric(p) => format!("Problem(matrix={:?}, ncoords={})", p.matrix, p.ncoords),
            Variety::Hypersurface(a) => format!("Problem.hypersurface({a:?})"),
        }
    }
}

fn mode(sup_norm: bool) -> HeightMode {
    if sup_norm {
        HeightMode::SupNorm
    } else {
        HeightMode::Polynomial
    }
}

#[pyfunction]
#[pyo3(signature = (problem, cap=None))]
fn generators<'py>(py: Python<'py>, problem: &PyProblem, cap: Option<u32>) -> PyResult<Bound<'py, PyAny>> {
    let g = py.detach(|| generators_for(&problem.inner, cap, DEFAULT_ENUMERATION_BUDGET)).map_err(err)?;
    to_py(py, &serde_json::json!({ "generators": g.points, "cap": g.cap, "stabilized": g.stabilized }))
}

#[pyfunction]
#[pyo3(signature = (problem, cap=None))]
fn analyze<'py>(py: Python<'py>, problem: &PyProblem, cap: Option<u32>) -> PyResult<Bound<'py, PyAny>> {
    let a = py.detach(|| analyze_impl(&problem.inner, cap, DEFAULT_ENUMERATION_BUDGET)).map_err(err)?;
    let mut v = a.diagonal.summary(&a.polyhedron);
    v["stabilized"] = a.generators.stabilized.into();
    to_py(py, &v)
}

#[pyfunction]
#[pyo3(signature = (problem, polynomial=None, sup_norm=false, prime_cutoff=100_000, quad_tol=1e-9, euler_tol=1e-15, precision=160, seed=0))]
#[allow(clippy::too_many_arguments)]
fn manin_constant<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    polynomial: Option<&PyPolynomial>,
    sup_norm: bool,
    prime_cutoff: u64,
    quad_tol: f64,
    euler_tol: f64,
    precision: usize,
    seed: u32,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = ManinConfig {
        quad: QuadConfig { abs_tol: quad_tol, rel_tol: quad_tol, seed, ..QuadConfig::default() },
        euler: EulerConfig { prime_cutoff, tol: euler_tol, precision_bits: precision },
        ..ManinConfig::default()
    };
    let p = polynomial.map(|p| p.inner.clone());
    let r = py.detach(|| manin_impl(&problem.inner, p.as_ref(), mode(sup_norm), &cfg)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (problem, t, polynomial=None, sup_norm=false, budget=DEFAULT_BOX_BUDGET))]
fn count_points<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    t: f64,
    polynomial: Option<&PyPolynomial>,
    sup_norm: bool,
    budget: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let p = polynomial.map(|p| p.inner.clone());
    let r = py.detach(|| count_impl(&problem.inner, p.as_ref(), t, mode(sup_norm), budget)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (problem, s, cutoff, iota, rho, polynomial=None, sup_norm=false, budget=DEFAULT_BOX_BUDGET))]
#[allow(clippy::too_many_arguments)]
fn zeta_partial<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    s: Vec<f64>,
    cutoff: f64,
    iota: f64,
    rho: u32,
    polynomial: Option<&PyPolynomial>,
    sup_norm: bool,
    budget: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let p = polynomial.map(|p| p.inner.clone());
    let r = py
        .detach(|| zeta_impl(&problem.inner, p.as_ref(), &s, cutoff, mode(sup_norm), iota, rho, budget))
        .map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn sargos_constant<'py>(py: Python<'py>, polynomial: &PyPolynomial) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| volume::sargos_constant(&polynomial.inner, &QuadConfig::default())).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn mahler_constant<'py>(py: Python<'py>, polynomial: &PyPolynomial) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| volume::mahler_constant(&polynomial.inner, &QuadConfig::default())).map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
#[pyo3(name = "manin_toric")]
fn manin_toric_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ManinError", m.py().get_type::<ManinError>())?;
    m.add_class::<PyPolynomial>()?;
    m.add_class::<PyProblem>()?;
    m.add_function(wrap_pyfunction!(generators, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(manin_constant, m)?)?;
    m.add_function(wrap_pyfunction!(count_points, m)?)?;
    m.add_function(wrap_pyfunction!(zeta_partial, m)?)?;
    m.add_function(wrap_pyfunction!(sargos_constant, m)?)?;
    m.add_function(wrap_pyfunction!(mahler_constant, m)?)?;
    Ok(())
}
