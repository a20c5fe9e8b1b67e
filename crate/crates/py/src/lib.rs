//! Python bindings: thin wrappers that release the GIL around every computation.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;
use siegel_capture::capture::{
    capture_polys, param_map_phi as core_param_map_phi, trace_component_boundary, trace_parameter_ray, trace_zakeri as core_trace_zakeri,
    RayOptions, TraceOptions, ZakeriOptions,
};
use siegel_capture::classify::{capture_level as core_capture_level, classify_parameter_c as core_classify, Budgets};
use siegel_capture::family::{CubicSiegelMap, RotationNumber as CoreRotation, Slice};
use siegel_capture::render::{render as core_render, write_image, write_sidecar, ImageFormat, Plane, RenderJob};
use siegel_capture::siegel::{siegel_boundary as core_boundary, LinearizationData, LinearizationOptions};
use siegel_capture::{Complex64, Error};

fn to_py_err(error: Error) -> PyErr {
    match error {
        Error::InvalidArgument(_) | Error::InvalidRotation { .. } | Error::ZeroParameter => PyValueError::new_err(error.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn to_python<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn theta_of(spec: &str) -> PyResult<CoreRotation> {
    CoreRotation::parse(spec).map_err(to_py_err)
}

/// Rotation number with eventually periodic continued fraction.
#[pyclass(name = "RotationNumber", frozen)]
struct PyRotationNumber {
    inner: CoreRotation,
}

#[pymethods]
impl PyRotationNumber {
    #[new]
    #[pyo3(signature = (spec = "golden"))]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Self { inner: theta_of(spec)? })
    }

    #[getter]
    fn value(&self) -> f64 {
        self.inner.value()
    }

    #[getter]
    fn multiplier(&self) -> Complex64 {
        self.inner.multiplier()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("RotationNumber('{}')", self.inner)
    }
}

/// Capture-component centers per level, `[[c, ...], ...]`.
#[pyfunction]
#[pyo3(signature = (max_level, theta = "golden"))]
fn centers(py: Python<'_>, max_level: usize, theta: &str) -> PyResult<Vec<Vec<Complex64>>> {
    let theta = theta_of(theta)?;
    let report = py.detach(|| capture_polys(&theta, max_level)?.census()).map_err(to_py_err)?;
    Ok(report.centers.iter().map(|level| level.iter().map(|center| center.c).collect()).collect())
}

/// Full census report as a dict.
#[pyfunction]
#[pyo3(signature = (max_level, theta = "golden"))]
fn census<'py>(py: Python<'py>, max_level: usize, theta: &str) -> PyResult<Bound<'py, PyAny>> {
    let theta = theta_of(theta)?;
    let report = py.detach(|| capture_polys(&theta, max_level)?.census()).map_err(to_py_err)?;
    to_python(py, &report)
}

/// Boundary verdict and critical-orbit classes of `P_c`.
#[pyfunction]
#[pyo3(signature = (c, theta = "golden", max_iter = 2000))]
fn classify_parameter_c<'py>(py: Python<'py>, c: Complex64, theta: &str, max_iter: usize) -> PyResult<Bound<'py, PyAny>> {
    let theta = theta_of(theta)?;
    let budgets = Budgets { max_iterations: max_iter, ..Budgets::default() };
    let class = py.detach(|| core_classify(&theta, c, &budgets));
    let out = to_python(py, &class)?;
    out.cast::<PyDict>()?.set_item("in_capture_set", class.in_capture_set())?;
    Ok(out)
}

/// Level of the free critical orbit, or `None` when not captured within `n_max` steps.
#[pyfunction]
#[pyo3(signature = (c, theta = "golden", n_max = 2000))]
fn capture_level(py: Python<'_>, c: Complex64, theta: &str, n_max: usize) -> PyResult<Option<usize>> {
    let theta = theta_of(theta)?;
    Ok(py.detach(|| core_capture_level(&theta, c, n_max)))
}

/// Parameter map of a level-`level` capture component.
#[pyfunction]
#[pyo3(signature = (c, level, theta = "golden"))]
fn param_map_phi(py: Python<'_>, c: Complex64, level: usize, theta: &str) -> PyResult<Complex64> {
    let theta = theta_of(theta)?;
    py.detach(|| core_param_map_phi(&theta, c, level)).map_err(to_py_err)
}

/// Linearization summary of `P_c`: conformal radius, residual, diameter and critical distances.
#[pyfunction]
#[pyo3(signature = (c, theta = "golden", terms = 256))]
fn linearization<'py>(py: Python<'py>, c: Complex64, theta: &str, terms: usize) -> PyResult<Bound<'py, PyDict>> {
    let theta = theta_of(theta)?;
    let lin = py
        .detach(|| {
            let map = CubicSiegelMap::c_plane(&theta, c)?;
            LinearizationData::new(&map, &LinearizationOptions::default().with_terms(terms))
        })
        .map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("terms", lin.terms())?;
    out.set_item("rho", lin.rho())?;
    out.set_item("residual", lin.residual())?;
    out.set_item("diameter", lin.diameter())?;
    out.set_item("critical_distances", lin.critical_distances().to_vec())?;
    out.set_item("boundary_critical_point", lin.boundary_critical_point())?;
    Ok(out)
}

/// `samples` uniform points on the Siegel boundary of `P_c`.
#[pyfunction]
#[pyo3(signature = (c, theta = "golden", terms = 256, samples = 512))]
fn siegel_boundary(py: Python<'_>, c: Complex64, theta: &str, terms: usize, samples: usize) -> PyResult<Vec<Complex64>> {
    let theta = theta_of(theta)?;
    py.detach(|| {
        let map = CubicSiegelMap::c_plane(&theta, c)?;
        let lin = LinearizationData::new(&map, &LinearizationOptions::default().with_terms(terms))?;
        core_boundary(&lin, samples)
    })
    .map_err(to_py_err)
}

/// Renders `plane` ("param-c", "param-a" or "dyn") to `out` with a JSON sidecar; returns the class histogram.
#[pyfunction]
#[pyo3(signature = (plane, out, center = Complex64::new(0.0, 0.0), width = 64.0, res = 512, theta = "golden", parameter = None, slice = "c", supersample = 1, threads = None))]
#[allow(clippy::too_many_arguments)]
fn render<'py>(
    py: Python<'py>,
    plane: &str,
    out: PathBuf,
    center: Complex64,
    width: f64,
    res: usize,
    theta: &str,
    parameter: Option<Complex64>,
    slice: &str,
    supersample: usize,
    threads: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let theta = theta_of(theta)?;
    let plane = match plane {
        "param-c" => Plane::ParamC,
        "param-a" => Plane::ParamA,
        "dyn" => {
            let parameter = parameter.ok_or_else(|| PyValueError::new_err("plane \"dyn\" needs a parameter"))?;
            let slice = match slice {
                "c" => Slice::C,
                "a" => Slice::A,
                other => return Err(PyValueError::new_err(format!("unknown slice {other:?}"))),
            };
            Plane::Dynamical { slice, parameter }
        }
        other => return Err(PyValueError::new_err(format!("unknown plane {other:?}"))),
    };
    let format = ImageFormat::from_path(&out).map_err(to_py_err)?;
    let mut job = RenderJob::new(theta, plane, center, width, res);
    job.supersampling = supersample;
    job.threads = threads;
    job.validate().map_err(to_py_err)?;
    let histogram = py
        .detach(|| {
            let start = std::time::Instant::now();
            let image = core_render(&job)?;
            let elapsed = start.elapsed().as_secs_f64();
            write_image(&image, &out, format)?;
            let mut sidecar = out.clone().into_os_string();
            sidecar.push(".json");
            write_sidecar(&job, &image, elapsed, &PathBuf::from(sidecar))?;
            Ok(image.histogram)
        })
        .map_err(to_py_err)?;
    to_python(py, &histogram)
}

/// Vertices of the Zakeri curve along `samples` directions.
#[pyfunction]
#[pyo3(signature = (samples = 64, theta = "golden"))]
fn trace_zakeri(py: Python<'_>, samples: usize, theta: &str) -> PyResult<Vec<Complex64>> {
    let theta = theta_of(theta)?;
    let opts = ZakeriOptions { directions: samples, ..ZakeriOptions::default() };
    Ok(py.detach(|| core_trace_zakeri(&theta, &opts)).map_err(to_py_err)?.points)
}

/// One parameter ray as a dict with `path`, `anchors` and `landing`.
#[pyfunction]
#[pyo3(signature = (center, level, angle, theta = "golden", r_stop = 0.995))]
fn trace_ray<'py>(py: Python<'py>, center: Complex64, level: usize, angle: f64, theta: &str, r_stop: f64) -> PyResult<Bound<'py, PyAny>> {
    let theta = theta_of(theta)?;
    let opts = RayOptions { r_stop, ..RayOptions::default() };
    let trace = py.detach(|| trace_parameter_ray(&theta, center, level, angle, &opts)).map_err(to_py_err)?;
    to_python(py, &trace)
}

/// Landing polygon of a capture component as a dict.
#[pyfunction]
#[pyo3(signature = (center, level, rays = 256, theta = "golden"))]
fn trace_component<'py>(py: Python<'py>, center: Complex64, level: usize, rays: usize, theta: &str) -> PyResult<Bound<'py, PyAny>> {
    let theta = theta_of(theta)?;
    let opts = TraceOptions { rays, ..TraceOptions::default() };
    let trace = py.detach(|| trace_component_boundary(&theta, center, level, &opts)).map_err(to_py_err)?;
    let out = to_python(py, &trace)?;
    out.cast::<PyDict>()?.set_item("relative_gap", trace.relative_gap())?;
    Ok(out)
}

#[pymodule]
fn siegel_capture_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRotationNumber>()?;
    m.add_function(wrap_pyfunction!(centers, m)?)?;
    m.add_function(wrap_pyfunction!(census, m)?)?;
    m.add_function(wrap_pyfunction!(classify_parameter_c, m)?)?;
    m.add_function(wrap_pyfunction!(capture_level, m)?)?;
    m.add_function(wrap_pyfunction!(param_map_phi, m)?)?;
    m.add_function(wrap_pyfunction!(linearization, m)?)?;
    m.add_function(wrap_pyfunction!(siegel_boundary, m)?)?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    m.add_function(wrap_pyfunction!(trace_zakeri, m)?)?;
    m.add_function(wrap_pyfunction!(trace_ray, m)?)?;
    m.add_function(wrap_pyfunction!(trace_component, m)?)?;
    Ok(())
}
