//! Python bindings. Structured results (scan reports, verification and probe
//! reports, iteration outcomes) come back as plain dicts and lists.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use fixscan_core::analysis::{alpha_sequence, fr_closedness_probe};
use fixscan_core::construction::{verify_construction, ConstructedScene, FSigmaSpec, VerifyGrid};
use fixscan_core::dynamics::{classify_alpha, classify_alpha_from, reduced_beta, IterationConfig};
use fixscan_core::geometry::{ConvexSetDescriptor, PointN};
use fixscan_core::report::{run_scan, ScanConfig};
use fixscan_core::{planar, Error};

fn err(e: Error) -> PyErr {
    match e {
        Error::DimensionMismatch { .. } | Error::Contract(_) | Error::InvalidSpec { .. } | Error::Json(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn point(coords: Vec<f64>) -> PyResult<PointN> {
    PointN::new(coords).map_err(err)
}

/// Serializes through JSON into Python objects.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A closed convex set with an exact projection.
#[pyclass(name = "ConvexSet", module = "fixscan", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyConvexSet {
    inner: ConvexSetDescriptor,
}

#[pymethods]
impl PyConvexSet {
    #[staticmethod]
    fn singleton(coords: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: ConvexSetDescriptor::singleton(coords).map_err(err)?,
        })
    }

    #[staticmethod]
    fn vertical_ray(x: f64, y: f64) -> Self {
        Self {
            inner: ConvexSetDescriptor::vertical_ray(x, y),
        }
    }

    /// `{(x, y) : y >= x²}`.
    #[staticmethod]
    fn parabola() -> Self {
        Self {
            inner: ConvexSetDescriptor::ParabolaEpigraph,
        }
    }

    #[staticmethod]
    fn product_with_half_line(planar: &PyConvexSet) -> PyResult<Self> {
        Ok(Self {
            inner: ConvexSetDescriptor::product_with_half_line(planar.inner.clone()).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn project(&self, p: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.project(&point(p)?).map_err(err)?.into_vec())
    }

    #[pyo3(signature = (p, slack = 0.0))]
    fn contains(&self, p: Vec<f64>, slack: f64) -> PyResult<bool> {
        Ok(self.inner.contains(&point(p)?, slack))
    }

    fn __repr__(&self) -> String {
        format!("ConvexSet({:?})", self.inner)
    }
}

/// Nested closed levels `F_1 ⊂ F_2 ⊂ …` of a set `F ⊂ [0, 1]`.
#[pyclass(name = "FSigmaSpec", module = "fixscan", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFSigmaSpec {
    inner: FSigmaSpec,
}

#[pymethods]
impl PyFSigmaSpec {
    /// A spec from its level intervals, e.g. `[[(0, 0), (0.2, 0.4)]]`.
    #[new]
    fn new(levels: Vec<Vec<(f64, f64)>>) -> PyResult<Self> {
        let levels = levels
            .into_iter()
            .map(fixscan_core::construction::IntervalUnion::new)
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        Ok(Self {
            inner: FSigmaSpec::new(levels, Default::default()).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: FSigmaSpec::from_json(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn hash(&self) -> String {
        self.inner.hash()
    }

    fn contains(&self, alpha: f64) -> bool {
        self.inner.contains(alpha)
    }

    fn boundary_points(&self) -> Vec<f64> {
        self.inner.boundary_points()
    }

    fn __repr__(&self) -> String {
        format!("FSigmaSpec({})", self.inner.to_json())
    }
}

/// The three sets built from a spec.
#[pyclass(name = "Scene", module = "fixscan", frozen)]
struct PyScene {
    inner: ConstructedScene,
}

#[pymethods]
impl PyScene {
    #[new]
    fn new(spec: &PyFSigmaSpec) -> PyResult<Self> {
        Ok(Self {
            inner: ConstructedScene::new(spec.inner.clone()).map_err(err)?,
        })
    }

    #[getter]
    fn spec(&self) -> PyFSigmaSpec {
        PyFSigmaSpec {
            inner: self.inner.spec().clone(),
        }
    }

    #[getter]
    fn a1(&self) -> PyConvexSet {
        PyConvexSet {
            inner: self.inner.a1().clone(),
        }
    }

    #[getter]
    fn a2(&self) -> PyConvexSet {
        PyConvexSet {
            inner: self.inner.a2().clone(),
        }
    }

    #[getter]
    fn a3(&self) -> PyConvexSet {
        PyConvexSet {
            inner: self.inner.a3().clone(),
        }
    }

    /// `(value, [f_x, f_z], [[f_xx, f_xz], [f_zx, f_zz]])`.
    #[pyo3(signature = (x, z, tol = 1e-15))]
    fn f_eval(&self, x: f64, z: f64, tol: f64) -> PyResult<(f64, [f64; 2], [[f64; 2]; 2])> {
        let j = self.inner.f_eval(x, z, tol).map_err(err)?.jet;
        Ok((j.value, j.grad, j.hess))
    }

    /// Classifies the `k`-fold composition at `alpha`.
    #[pyo3(signature = (alpha, k = 3, start = None, max_iters = 200_000, eps_fix = 1e-9))]
    fn classify<'py>(
        &self,
        py: Python<'py>,
        alpha: f64,
        k: u32,
        start: Option<Vec<f64>>,
        max_iters: usize,
        eps_fix: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let cfg = IterationConfig {
            max_iters,
            eps_fix,
            ..IterationConfig::default()
        };
        let out = match start {
            Some(s) => {
                let s = point(s)?;
                py.detach(|| classify_alpha_from(&self.inner, alpha, k, &s, &cfg))
            }
            None => py.detach(|| classify_alpha(&self.inner, alpha, k, &cfg)),
        }
        .map_err(err)?;
        to_py(py, &out.class)
    }

    /// Scan report as `{"meta": ..., "rows": [...]}`.
    #[pyo3(signature = (k = 3, alpha_min = 0.0, alpha_max = 1.0, alpha_step = 0.01, workers = None))]
    fn scan<'py>(
        &self,
        py: Python<'py>,
        k: u32,
        alpha_min: f64,
        alpha_max: f64,
        alpha_step: f64,
        workers: Option<usize>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let cfg = ScanConfig {
            k,
            alpha_min,
            alpha_max,
            alpha_step,
            iteration: IterationConfig::default(),
            workers,
        };
        let report = py.detach(|| run_scan(&self.inner, &cfg)).map_err(err)?;
        let d = to_py(py, &report)?;
        d.set_item("exit_code", report.exit_code())?;
        Ok(d)
    }

    /// The same scan as CSV text.
    #[pyo3(signature = (k = 3, alpha_min = 0.0, alpha_max = 1.0, alpha_step = 0.01, workers = None))]
    fn scan_csv(
        &self,
        py: Python<'_>,
        k: u32,
        alpha_min: f64,
        alpha_max: f64,
        alpha_step: f64,
        workers: Option<usize>,
    ) -> PyResult<String> {
        let cfg = ScanConfig {
            k,
            alpha_min,
            alpha_max,
            alpha_step,
            iteration: IterationConfig::default(),
            workers,
        };
        Ok(py.detach(|| run_scan(&self.inner, &cfg)).map_err(err)?.to_csv())
    }

    #[pyo3(signature = (nx = 200, nz = 100, tol = 1e-15))]
    fn verify<'py>(&self, py: Python<'py>, nx: usize, nz: usize, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let grid = VerifyGrid {
            nx,
            nz,
            ..VerifyGrid::default()
        };
        let report = py.detach(|| verify_construction(&self.inner, &grid, tol)).map_err(err)?;
        to_py(py, &report)
    }

    /// Follows `alpha0 + rate/n` for `n = 1..terms`.
    #[pyo3(signature = (alpha0, rate, r, terms = 10, k = 3))]
    fn closedness_probe<'py>(
        &self,
        py: Python<'py>,
        alpha0: f64,
        rate: f64,
        r: f64,
        terms: usize,
        k: u32,
    ) -> PyResult<Bound<'py, PyAny>> {
        let alphas = alpha_sequence(alpha0, rate, terms);
        let report = py
            .detach(|| fr_closedness_probe(&self.inner, &alphas, alpha0, k, r, &IterationConfig::default()))
            .map_err(err)?;
        to_py(py, &report)
    }
}

#[pyfunction]
fn psi(alpha: f64) -> PyResult<f64> {
    planar::psi(alpha).map_err(err)
}

#[pyfunction]
fn phi(alpha: f64) -> PyResult<f64> {
    planar::phi(alpha).map_err(err)
}

/// `(u, P_B1(u))` for the planar composition.
#[pyfunction]
fn planar_fixed_point(alpha: f64, beta: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let fp = planar::planar_fixed_point_closed_form(alpha, beta).map_err(err)?;
    Ok((fp.u.into_vec(), fp.x_proj.into_vec()))
}

#[pyfunction]
fn planar_residual(alpha: f64, beta: f64, u: Vec<f64>) -> PyResult<f64> {
    planar::planar_residual(alpha, beta, &point(u)?).map_err(err)
}

#[pyfunction(name = "reduced_beta")]
fn py_reduced_beta(alpha: f64, k: u32) -> PyResult<f64> {
    reduced_beta(alpha, k).map_err(err)
}

#[pymodule]
fn fixscan(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", fixscan_core::report::TOOL_VERSION)?;
    m.add_class::<PyConvexSet>()?;
    m.add_class::<PyFSigmaSpec>()?;
    m.add_class::<PyScene>()?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(planar_fixed_point, m)?)?;
    m.add_function(wrap_pyfunction!(planar_residual, m)?)?;
    m.add_function(wrap_pyfunction!(py_reduced_beta, m)?)?;
    Ok(())
}
