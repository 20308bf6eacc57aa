//! Python bindings. Matrices cross the boundary as lists of rows of complex
//! numbers; reports come back as JSON strings.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use opineq::config::ExperimentConfig;
use opineq::matcore::{self, CMatrix, HermitianMatrix, PdMatrix};
use opineq::scalarfun::{self, legendre_numeric, LEGENDRE_TOL};
use opineq::tracefun::{self, FunctionalSpec, Mode, PgdInit, SolverOptions};
use opineq::{golden, Error};

type Rows = Vec<Vec<Complex64>>;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_hermitian(rows: Rows) -> PyResult<HermitianMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("expected a non-empty square matrix"));
    }
    let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
    HermitianMatrix::new(CMatrix::from_row_slice(n, n, &flat)).map_err(err)
}

fn to_pd(rows: Rows) -> PyResult<PdMatrix> {
    to_hermitian(rows)?.to_pd().map_err(err)
}

fn to_rows(m: &CMatrix) -> Rows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "convex" => Ok(Mode::Convex),
        "concave" => Ok(Mode::Concave),
        other => Err(PyValueError::new_err(format!(
            "mode must be 'convex' or 'concave', got {other:?}"
        ))),
    }
}

/// A catalog function, built from a tag such as `"log"` or `"power:0.5"`.
#[pyclass(name = "ScalarFunction", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyScalarFunction {
    inner: scalarfun::ScalarFunction,
}

#[pymethods]
impl PyScalarFunction {
    #[new]
    fn new(tag: &str) -> PyResult<Self> {
        Ok(Self {
            inner: tag.parse().map_err(err)?,
        })
    }

    fn __call__(&self, x: f64) -> PyResult<f64> {
        self.inner.eval(x).map_err(err)
    }

    /// `-h(1/x)`.
    fn tilde(&self) -> Self {
        Self {
            inner: scalarfun::tilde(&self.inner),
        }
    }

    /// `inf_x t x - h(x)`; closed form when available.
    fn check(&self, t: f64) -> PyResult<f64> {
        use scalarfun::RealFunction;
        scalarfun::check(&self.inner)
            .and_then(|c| c.eval(t))
            .map_err(err)
    }

    fn breve(&self, t: f64) -> PyResult<f64> {
        use scalarfun::RealFunction;
        scalarfun::breve(&self.inner)
            .and_then(|c| c.eval(t))
            .map_err(err)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("ScalarFunction({:?})", self.inner.to_string())
    }
}

/// Strictly positive map `X ↦ Σ C_i* X C_i`.
#[pyclass(name = "PositiveMap", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPositiveMap {
    inner: opineq::PositiveMap,
}

#[pymethods]
impl PyPositiveMap {
    /// Kraus operators as `in_dim x out_dim` row lists.
    #[new]
    fn new(kraus: Vec<Rows>) -> PyResult<Self> {
        let mats = kraus
            .into_iter()
            .map(|rows| {
                let (r, c) = (rows.len(), rows.first().map_or(0, Vec::len));
                if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
                    return Err(PyValueError::new_err("ragged or empty Kraus operator"));
                }
                let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
                Ok(CMatrix::from_row_slice(r, c, &flat))
            })
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Self {
            inner: opineq::PositiveMap::new(mats).map_err(err)?,
        })
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        Self {
            inner: opineq::PositiveMap::identity(n),
        }
    }

    #[staticmethod]
    fn random(m: usize, k: usize, kraus_count: usize, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: opineq::PositiveMap::random(m, k, kraus_count, seed).map_err(err)?,
        })
    }

    #[getter]
    fn in_dim(&self) -> usize {
        self.inner.in_dim()
    }

    #[getter]
    fn out_dim(&self) -> usize {
        self.inner.out_dim()
    }

    /// Smallest eigenvalue of `Φ(I)`.
    #[getter]
    fn certificate(&self) -> f64 {
        self.inner.certificate()
    }

    fn apply(&self, x: Rows) -> PyResult<Rows> {
        let y = self.inner.apply(&to_hermitian(x)?).map_err(err)?;
        Ok(to_rows(y.entries()))
    }

    fn normalize_unital(&self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.normalize_unital().map_err(err)?,
        })
    }
}

/// Ascending eigenvalues and the unitary of eigenvectors (columns).
#[pyfunction]
fn eigh(matrix: Rows) -> PyResult<(Vec<f64>, Rows)> {
    let s = matcore::eigh(&to_hermitian(matrix)?).map_err(err)?;
    Ok((s.eigenvalues.clone(), to_rows(&s.unitary)))
}

#[pyfunction]
#[pyo3(signature = (n, seed, lo = 0.1, hi = 10.0))]
fn random_pd(n: usize, seed: u64, lo: f64, hi: f64) -> PyResult<Rows> {
    let a = matcore::random_pd(n, seed, (lo, hi)).map_err(err)?;
    Ok(to_rows(a.as_hermitian().entries()))
}

/// `(value, argmin, at_boundary)` of `inf_x t x - h(x)`.
#[pyfunction]
fn legendre(h: &PyScalarFunction, t: f64) -> PyResult<(f64, f64, bool)> {
    let c = legendre_numeric(&h.inner, t, LEGENDRE_TOL).map_err(err)?;
    Ok((c.value, c.argmin, c.at_boundary))
}

#[allow(clippy::too_many_arguments)]
fn spec(
    h: &PyScalarFunction,
    f: &PyScalarFunction,
    g: &PyScalarFunction,
    phi: &PyPositiveMap,
    psi: &PyPositiveMap,
    mode: &str,
) -> PyResult<FunctionalSpec> {
    FunctionalSpec::new(
        h.inner.clone(),
        f.inner.clone(),
        g.inner.clone(),
        phi.inner.clone(),
        psi.inner.clone(),
        parse_mode(mode)?,
    )
    .map_err(err)
}

/// `Tr h(Φ(f(A))^{1/2} Ψ(g(B)) Φ(f(A))^{1/2})`.
#[pyfunction]
#[pyo3(signature = (h, f, g, phi, psi, a, b, mode = "convex"))]
#[allow(clippy::too_many_arguments)]
fn core_functional(
    h: &PyScalarFunction,
    f: &PyScalarFunction,
    g: &PyScalarFunction,
    phi: &PyPositiveMap,
    psi: &PyPositiveMap,
    a: Rows,
    b: Rows,
    mode: &str,
) -> PyResult<f64> {
    let spec = spec(h, f, g, phi, psi, mode)?;
    tracefun::core_functional(&spec, &to_pd(a)?, &to_pd(b)?).map_err(err)
}

/// `-Tr h~(A'^{-1/2} B'^{-1} A'^{-1/2})`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn inverse_form(
    h: &PyScalarFunction,
    f: &PyScalarFunction,
    g: &PyScalarFunction,
    phi: &PyPositiveMap,
    psi: &PyPositiveMap,
    a: Rows,
    b: Rows,
) -> PyResult<f64> {
    let spec = spec(h, f, g, phi, psi, "convex")?;
    tracefun::inverse_form(&spec, &to_pd(a)?, &to_pd(b)?).map_err(err)
}

/// `Tr h(A)` through `inf_B Tr(AB - hˇ(B))`: returns
/// `(pgd_value, oracle_value, iterations)`.
#[pyfunction]
#[pyo3(signature = (h, a, from_identity = false))]
fn trace_h_variational(
    h: &PyScalarFunction,
    a: Rows,
    from_identity: bool,
) -> PyResult<(f64, f64, usize)> {
    let opts = SolverOptions {
        init: if from_identity {
            PgdInit::Identity
        } else {
            PgdInit::Stationary
        },
        max_iter: if from_identity { 20_000 } else { 500 },
        ..SolverOptions::default()
    };
    let r = tracefun::trace_h_variational_pgd(&h.inner, &to_pd(a)?, &opts).map_err(err)?;
    Ok((r.value, r.oracle_value, r.iterations))
}

/// Runs every suite of a JSON experiment config; returns one JSON report per suite.
#[pyfunction]
fn run_experiment(py: Python<'_>, config_json: &str) -> PyResult<Vec<String>> {
    let cfg = ExperimentConfig::from_json(config_json).map_err(err)?;
    py.detach(|| {
        cfg.suites
            .iter()
            .map(|s| s.run().and_then(|r| r.to_json()))
            .collect::<opineq::Result<Vec<_>>>()
    })
    .map_err(err)
}

/// `(name, max_error, worst_t)` rows of the golden-value table.
#[pyfunction]
fn golden_table() -> PyResult<Vec<(String, f64, f64)>> {
    Ok(golden::all_rows()
        .map_err(err)?
        .into_iter()
        .map(|r| (r.name, r.max_error, r.worst_t))
        .collect())
}

#[pymodule(name = "opineq")]
fn opineq_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScalarFunction>()?;
    m.add_class::<PyPositiveMap>()?;
    m.add_function(wrap_pyfunction!(eigh, m)?)?;
    m.add_function(wrap_pyfunction!(random_pd, m)?)?;
    m.add_function(wrap_pyfunction!(legendre, m)?)?;
    m.add_function(wrap_pyfunction!(core_functional, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_form, m)?)?;
    m.add_function(wrap_pyfunction!(trace_h_variational, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(golden_table, m)?)?;
    Ok(())
}
