//! Python bindings. Spins and projections are passed as strings (`"1/2"`,
//! `"smax"`, `"sqrt(2)"`) or numbers, the same forms the CLI accepts.

use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use spinfn::coupling::{self, RmsPattern};
use spinfn::numbers::{parse_rational, Projection};
use spinfn::observables;
use spinfn::reactions::{self, ParticleTable, Reaction};
use spinfn::regularization::{self, InnerProduct, Weight};
use spinfn::verify::{self, Status};
use spinfn::{Error, HalfInt, Ladder, Scalar, Surd};

fn err(e: Error) -> PyErr {
    match e {
        Error::Accuracy { .. } | Error::SingularCoefficient(_) | Error::EndpointDivergence { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A spin or projection given as text or as a number.
#[derive(FromPyObject)]
enum Value {
    Text(String),
    Number(f64),
}

impl Value {
    fn text(&self) -> String {
        match self {
            Value::Text(s) => s.clone(),
            Value::Number(x) => format!("{x}"),
        }
    }

    fn half(&self) -> PyResult<HalfInt> {
        HalfInt::parse(&self.text()).map_err(err)
    }

    fn projection(&self, j: HalfInt) -> PyResult<Projection> {
        match self {
            // a Python float is already inexact
            Value::Number(x) => Ok(Projection::Real(*x)),
            Value::Text(s) => Projection::parse(s, j).map_err(err),
        }
    }
}

fn weight(name: &str) -> PyResult<Weight> {
    match name.trim().to_ascii_lowercase().as_str() {
        "1" | "one" => Ok(Weight::One),
        "cos" | "p1" => Ok(Weight::CosTheta),
        "p2" => Ok(Weight::Legendre(2)),
        "p3" => Ok(Weight::Legendre(3)),
        "p4" => Ok(Weight::Legendre(4)),
        other => Err(PyValueError::new_err(format!("unknown weight '{other}' (one, cos, p2, p3, p4)"))),
    }
}

fn pattern(text: &str) -> PyResult<RmsPattern> {
    text.parse().map_err(err)
}

#[derive(Clone)]
enum Built {
    Exact(spinfn::DFunction<Surd>),
    Float(spinfn::DFunction<f64>),
}

/// D^j_{n m} with its two branches.
#[pyclass(name = "DFunction", module = "spinfn", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDFunction {
    inner: Built,
}

fn exact_text<S: Scalar>(ip: &InnerProduct<S>) -> Option<String> {
    ip.exact().map(|e| e.to_string())
}

#[pymethods]
impl PyDFunction {
    #[new]
    fn new(j: Value, n: Value, m: Value) -> PyResult<Self> {
        let (j, m) = (j.half()?, m.half()?);
        let inner = match n.projection(j)? {
            Projection::Exact(s) => Built::Exact(spinfn::DFunction::build(j, s, m).map_err(err)?),
            Projection::Real(x) => Built::Float(spinfn::DFunction::build(j, x, m).map_err(err)?),
        };
        Ok(PyDFunction { inner })
    }

    #[getter]
    fn label(&self) -> String {
        match &self.inner {
            Built::Exact(d) => d.label().to_string(),
            Built::Float(d) => d.label().to_string(),
        }
    }

    #[getter]
    fn exact(&self) -> bool {
        matches!(self.inner, Built::Exact(_))
    }

    #[pyo3(signature = (theta, phi = 0.0, chi = 0.0))]
    fn evaluate(&self, theta: f64, phi: f64, chi: f64) -> PyResult<Complex64> {
        match &self.inner {
            Built::Exact(d) => d.evaluate(phi, theta, chi),
            Built::Float(d) => d.evaluate(phi, theta, chi),
        }
        .map_err(err)
    }

    /// The raised (`up=True`) or lowered neighbour.
    #[pyo3(signature = (up = true))]
    fn ladder(&self, up: bool) -> Self {
        let dir = if up { Ladder::Raise } else { Ladder::Lower };
        let inner = match &self.inner {
            Built::Exact(d) => Built::Exact(d.ladder(dir)),
            Built::Float(d) => Built::Float(d.ladder(dir)),
        };
        PyDFunction { inner }
    }

    fn spin_inversion(&self) -> Self {
        let inner = match &self.inner {
            Built::Exact(d) => Built::Exact(d.spin_inversion()),
            Built::Float(d) => Built::Float(d.spin_inversion()),
        };
        PyDFunction { inner }
    }

    fn is_null(&self) -> bool {
        match &self.inner {
            Built::Exact(d) => d.is_null(),
            Built::Float(d) => d.is_null(),
        }
    }

    /// (exact text or None, float value) of the regularized ⟨self|W|other⟩.
    #[pyo3(signature = (other, weight = "one"))]
    fn inner(&self, other: &PyDFunction, weight: &str) -> PyResult<(Option<String>, f64)> {
        let w = self::weight(weight)?;
        match (&self.inner, &other.inner) {
            (Built::Exact(a), Built::Exact(b)) => {
                let ip = regularization::inner_product(a, b, &w).map_err(err)?;
                Ok((exact_text(&ip), ip.value().re))
            }
            (Built::Float(a), Built::Float(b)) => {
                let ip = regularization::inner_product(a, b, &w).map_err(err)?;
                Ok((None, ip.value().re))
            }
            _ => Err(PyValueError::new_err("mixing exact and floating projections; pass both as text or both as floats")),
        }
    }

    fn norm(&self) -> PyResult<(Option<String>, f64)> {
        self.inner(self, "one")
    }

    /// (exact text or None, float value) of ⟨W⟩ by regularized integration.
    #[pyo3(signature = (weight = "cos"))]
    fn expectation(&self, weight: &str) -> PyResult<(Option<String>, f64)> {
        let w = self::weight(weight)?;
        match &self.inner {
            Built::Exact(d) => {
                let e = regularization::expectation(d, &w).map_err(err)?;
                Ok((e.exact.map(|x| x.to_string()), e.value))
            }
            Built::Float(d) => Ok((None, regularization::expectation(d, &w).map_err(err)?.value)),
        }
    }

    fn __str__(&self) -> String {
        match &self.inner {
            Built::Exact(d) => d.to_string(),
            Built::Float(d) => d.to_string(),
        }
    }

    fn __repr__(&self) -> String {
        format!("DFunction({})", self.label())
    }
}

/// ⟨P_k⟩ through the coupling product; exact text when n is exact.
#[pyfunction]
fn expect_pk(j: Value, n: Value, m: Value, k: u32) -> PyResult<(Option<String>, f64)> {
    let (j, m) = (j.half()?, m.half()?);
    match n.projection(j)? {
        Projection::Exact(s) if !s.is_symbolic() => {
            let e = observables::expect_pk_exact(j, &s, m, k).map_err(err)?;
            Ok((Some(e.to_string()), e.to_f64().unwrap_or(f64::NAN)))
        }
        p => Ok((None, observables::expect_pk(j, p.to_f64(), m, k).map_err(err)?)),
    }
}

#[pyfunction]
fn cg(j1: Value, m1: Value, j2: Value, m2: Value, j3: Value) -> PyResult<f64> {
    Ok(coupling::cg(j1.half()?, m1.half()?, j2.half()?, m2.half()?, j3.half()?))
}

#[pyfunction]
fn cg_sq_continuous(j1: Value, x1: f64, j2: Value, x2: f64, j3: Value) -> PyResult<f64> {
    coupling::cg_sq_continuous(j1.half()?, x1, j2.half()?, x2, j3.half()?).map_err(err)
}

#[pyfunction]
fn internal_cg(j: Value, n: Value, k: u32) -> PyResult<f64> {
    let j = j.half()?;
    coupling::internal_cg(j, n.projection(j)?.to_f64(), k).map_err(err)
}

#[pyfunction]
fn rms<'py>(py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyDict>> {
    let r = coupling::rms_internal_cg(&pattern(name)?).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("squared", r.squared)?;
    d.set_item("rms", r.rms)?;
    d.set_item("error_estimate", r.quadrature.error)?;
    d.set_item("closed_form", r.closed_form)?;
    Ok(d)
}

/// Sampled (x, density) columns over [lo, hi] plus the total area.
#[pyfunction]
#[pyo3(signature = (name, samples = 4001, lo = None, hi = None))]
fn quasiprob(name: &str, samples: usize, lo: Option<f64>, hi: Option<f64>) -> PyResult<(Vec<f64>, Vec<f64>, f64)> {
    let p = pattern(name)?;
    let (dlo, dhi) = coupling::default_range(&p);
    let c = coupling::quasiprob_curve(&p, (lo.unwrap_or(dlo), hi.unwrap_or(dhi)), samples).map_err(err)?;
    let (xs, ys) = c.points.iter().copied().unzip();
    Ok((xs, ys, c.area()))
}

#[pyfunction]
fn g_factor(s: Value, n: Value) -> PyResult<(Option<String>, f64)> {
    let s = s.half()?;
    let g = match n.projection(s)? {
        Projection::Exact(x) if !x.is_symbolic() => observables::g_factor_exact(s, &x),
        p => observables::g_factor(s, p.to_f64()),
    }
    .map_err(err)?;
    Ok((g.exact.map(|e| e.to_string()), g.g))
}

/// (magnitude, imaginary) of the projection giving factor g.
#[pyfunction]
fn projection_for_g(s: Value, g: Value) -> PyResult<(f64, bool)> {
    let s = s.half()?;
    let p = match parse_rational(&g.text()) {
        Some(q) => observables::projection_for_g_exact(s, &q),
        None => observables::projection_for_g(s, g.text().parse().map_err(|_| PyValueError::new_err("g must be a number"))?),
    }
    .map_err(err)?;
    Ok((p.magnitude, p.imaginary))
}

/// Audits a reaction against the bundled table, or the table at `particles`.
#[pyfunction]
#[pyo3(signature = (text, particles = None))]
fn check_reaction<'py>(py: Python<'py>, text: &str, particles: Option<&str>) -> PyResult<Bound<'py, PyDict>> {
    let table = match particles {
        Some(p) => ParticleTable::load(std::path::Path::new(p)).map_err(err)?,
        None => ParticleTable::bundled(),
    };
    let rep = reactions::check_reaction(&Reaction::parse(text, &table).map_err(err)?).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("verdict", rep.verdict.to_string())?;
    d.set_item("coefficient", rep.coefficient)?;
    d.set_item("rationale", rep.rationale)?;
    Ok(d)
}

#[pyfunction]
fn solve_projection(text: &str) -> PyResult<(String, f64)> {
    let r = Reaction::parse(text, &ParticleTable::bundled()).map_err(err)?;
    let s = reactions::conservation_solve(&r).map_err(err)?;
    Ok((s.particle, s.n))
}

#[pyfunction]
fn dark_matter_fraction(ratio: f64) -> PyResult<f64> {
    reactions::dark_matter_fraction(ratio).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (m_e = None, m_mu = None, m_tau = None))]
fn koide(m_e: Option<f64>, m_mu: Option<f64>, m_tau: Option<f64>) -> PyResult<f64> {
    match (m_e, m_mu, m_tau) {
        (Some(a), Some(b), Some(c)) => reactions::koide(a, b, c),
        (None, None, None) => reactions::koide_from_table(&ParticleTable::bundled()),
        _ => return Err(PyValueError::new_err("give all three masses or none")),
    }
    .map_err(err)
}

/// The acceptance checklist as a list of dicts.
#[pyfunction]
#[pyo3(signature = (criterion = None))]
fn run_checks<'py>(py: Python<'py>, criterion: Option<u8>) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let checks = match criterion {
        Some(id) => vec![verify::run(id).map_err(err)?],
        None => verify::run_all(),
    };
    checks
        .into_iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("id", c.id)?;
            d.set_item("title", c.title)?;
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::KnownDeviation => "known-deviation",
            };
            d.set_item("status", status)?;
            d.set_item("detail", c.detail)?;
            d.set_item("seconds", c.elapsed.as_secs_f64())?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
#[pyo3(name = "spinfn")]
fn spinfn_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDFunction>()?;
    m.add_function(wrap_pyfunction!(expect_pk, m)?)?;
    m.add_function(wrap_pyfunction!(cg, m)?)?;
    m.add_function(wrap_pyfunction!(cg_sq_continuous, m)?)?;
    m.add_function(wrap_pyfunction!(internal_cg, m)?)?;
    m.add_function(wrap_pyfunction!(rms, m)?)?;
    m.add_function(wrap_pyfunction!(quasiprob, m)?)?;
    m.add_function(wrap_pyfunction!(g_factor, m)?)?;
    m.add_function(wrap_pyfunction!(projection_for_g, m)?)?;
    m.add_function(wrap_pyfunction!(check_reaction, m)?)?;
    m.add_function(wrap_pyfunction!(solve_projection, m)?)?;
    m.add_function(wrap_pyfunction!(dark_matter_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(koide, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    Ok(())
}
