//! Python bindings: the pointwise covector algebra, oriented chain
//! integration of polynomial forms, and the scenario/verification runners
//! (reports come back as JSON strings).

use emforms_core::chains::{self, parse_chain, write_chain};
use emforms_core::error::Error;
use emforms_core::exterior::{two_form_to_vector, KCovector, Parity, VolumeForm};
use emforms_core::fields::PolyForm;
use emforms_core::scenarios::{
    run_custom, run_faraday_disc, run_sliding_bar, run_translating_body, selftest,
    ScenarioConfig,
};
use emforms_core::specfile::{parse_polynomial, parse_spec};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn to_py_err(err: Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn parse_parity(text: &str) -> PyResult<Parity> {
    match text {
        "even" => Ok(Parity::Even),
        "odd" => Ok(Parity::Odd),
        other => Err(PyValueError::new_err(format!(
            "parity must be 'even' or 'odd', got '{other}'"
        ))),
    }
}

/// An alternating k-linear map on R^n (n = 2, 3 or 4).
#[pyclass(name = "Covector", from_py_object)]
#[derive(Clone)]
struct PyCovector {
    inner: KCovector,
}

#[pymethods]
impl PyCovector {
    /// Coefficients run over the lexicographically sorted strictly
    /// increasing multi-indices.
    #[new]
    #[pyo3(signature = (dim, degree, coeffs, parity = "even"))]
    fn new(dim: usize, degree: usize, coeffs: Vec<f64>, parity: &str) -> PyResult<Self> {
        let inner =
            KCovector::from_coeffs(dim, degree, parse_parity(parity)?, coeffs).map_err(to_py_err)?;
        Ok(PyCovector { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn parity(&self) -> String {
        self.inner.parity().to_string()
    }

    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.inner.coeffs().to_vec()
    }

    /// Evaluate on `degree` vectors.
    fn apply(&self, vectors: Vec<Vec<f64>>) -> PyResult<f64> {
        let refs: Vec<&[f64]> = vectors.iter().map(|v| v.as_slice()).collect();
        self.inner.apply(&refs).map_err(to_py_err)
    }

    fn wedge(&self, other: &PyCovector) -> PyResult<PyCovector> {
        Ok(PyCovector { inner: self.inner.wedge(&other.inner).map_err(to_py_err)? })
    }

    fn contract(&self, v: Vec<f64>) -> PyResult<PyCovector> {
        Ok(PyCovector { inner: self.inner.contract(&v).map_err(to_py_err)? })
    }

    fn scaled(&self, s: f64) -> PyCovector {
        PyCovector { inner: self.inner.scaled(s) }
    }

    fn add(&self, other: &PyCovector) -> PyCovector {
        PyCovector { inner: self.inner.add(&other.inner) }
    }

    fn __repr__(&self) -> String {
        format!(
            "Covector(dim={}, degree={}, parity='{}', coeffs={:?})",
            self.inner.dim(),
            self.inner.degree(),
            self.inner.parity(),
            self.inner.coeffs()
        )
    }
}

/// The flux (n-1)-covector mu.u of the standard volume form.
#[pyfunction]
#[pyo3(signature = (u, parity = "even"))]
fn mu_contract(u: Vec<f64>, parity: &str) -> PyResult<PyCovector> {
    let mu = VolumeForm::standard(u.len());
    let inner = mu.contract_vector(&u, parse_parity(parity)?).map_err(to_py_err)?;
    Ok(PyCovector { inner })
}

/// The unique vector u with mu.u = w, for a 2-covector in R^3.
#[pyfunction]
fn vector_of_two_form(w: &PyCovector) -> PyResult<Vec<f64>> {
    two_form_to_vector(&w.inner, &VolumeForm::standard(3)).map_err(to_py_err)
}

/// Serialized unit square in the z = 0 plane (two triangles, CCW).
#[pyfunction]
fn chain_unit_square() -> String {
    write_chain(&chains::unit_square_z(0.0))
}

/// Serialized unit cube volume (six positively oriented tetrahedra).
#[pyfunction]
fn chain_unit_cube() -> String {
    write_chain(&chains::unit_cube())
}

/// Integrate a polynomial form (components in x, y, z, t) over a chain in
/// the line-oriented text format. Even forms use inner-oriented
/// integration; odd forms need outer frames on every simplex.
#[pyfunction]
#[pyo3(signature = (components, degree, chain_text, parity = "even", depth = 3, time = 0.0))]
fn integrate(
    components: Vec<String>,
    degree: usize,
    chain_text: &str,
    parity: &str,
    depth: usize,
    time: f64,
) -> PyResult<f64> {
    let parity = parse_parity(parity)?;
    let polys = components
        .iter()
        .enumerate()
        .map(|(i, c)| parse_polynomial(c, i + 1))
        .collect::<Result<Vec<_>, _>>()
        .map_err(to_py_err)?;
    let form = PolyForm::new(3, degree, parity, polys).map_err(to_py_err)?.as_field();
    let chain = parse_chain(chain_text).map_err(to_py_err)?;
    match parity {
        Parity::Even => chains::integrate_inner(&form, &chain, time, depth).map_err(to_py_err),
        Parity::Odd => {
            chains::integrate_outer(&form, &chain, &VolumeForm::standard(3), time, depth)
                .map_err(to_py_err)
        }
    }
}

/// Run a canonical scenario; returns the JSON report.
#[pyfunction]
#[pyo3(signature = (name, b0 = 1.0, v0 = 1.0, omega = 1.0, length = 1.0, radius = 1.0,
                    depth = 3, tolerance = 1e-4, boost = None))]
#[allow(clippy::too_many_arguments)]
fn run_scenario(
    name: &str,
    b0: f64,
    v0: f64,
    omega: f64,
    length: f64,
    radius: f64,
    depth: usize,
    tolerance: f64,
    boost: Option<Vec<f64>>,
) -> PyResult<String> {
    let cfg = ScenarioConfig {
        b0,
        v0,
        omega_spin: omega,
        length,
        radius,
        depth,
        tolerance,
        boost,
        ..Default::default()
    };
    let report = match name {
        "translating_body" => run_translating_body(&cfg),
        "sliding_bar" => run_sliding_bar(&cfg),
        "faraday_disc" => run_faraday_disc(&cfg),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown scenario '{other}' (translating_body, sliding_bar, faraday_disc)"
            )))
        }
    }
    .map_err(to_py_err)?;
    Ok(report.to_json())
}

/// Evaluate every applicable law residual on a custom spec (the text format
/// of `emforms verify`); returns the JSON report.
#[pyfunction]
fn verify_spec(text: &str) -> PyResult<String> {
    let spec = parse_spec(text).map_err(to_py_err)?;
    Ok(run_custom(&spec).map_err(to_py_err)?.to_json())
}

/// Run the deterministic invariant suite; returns the JSON report.
#[pyfunction]
fn run_selftest() -> String {
    selftest().to_json()
}

#[pymodule]
fn emforms_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCovector>()?;
    m.add_function(wrap_pyfunction!(mu_contract, m)?)?;
    m.add_function(wrap_pyfunction!(vector_of_two_form, m)?)?;
    m.add_function(wrap_pyfunction!(chain_unit_square, m)?)?;
    m.add_function(wrap_pyfunction!(chain_unit_cube, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(verify_spec, m)?)?;
    m.add_function(wrap_pyfunction!(run_selftest, m)?)?;
    Ok(())
}
