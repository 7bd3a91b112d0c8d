use std::collections::BTreeMap;
use std::path::PathBuf;

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rand_chacha::ChaCha8Rng;

use bishape_core::enumerate::{enumerate_shapes_with, ShapeEnumOptions};
use bishape_core::sample::{cache_dir as resolve_cache_dir, BishapeSampler, SamplerConfig, ShapeTable};
use bishape_core::series::{self, IntPolynomial, PowerSeries};
use bishape_core::{self as core, ErrorKind, LoopProfile};

create_exception!(bishape, InfeasibleError, PyException);

fn py_err(e: core::Error) -> PyErr {
    match e.kind() {
        ErrorKind::Input => PyValueError::new_err(e.to_string()),
        ErrorKind::Infeasible => InfeasibleError::new_err(e.to_string()),
        ErrorKind::Internal => PyRuntimeError::new_err(e.to_string()),
    }
}

fn shape_of(d: &Diagram) -> PyResult<core::Shape> {
    core::Shape::new(d.inner.clone()).map_err(py_err)
}

fn coefficients(p: &IntPolynomial) -> Vec<BigInt> {
    p.coeffs().to_vec()
}

fn series_coefficients(s: &PowerSeries) -> Vec<BigInt> {
    s.coeffs().to_vec()
}

/// Diagram over one or more backbones; vertices and arcs are 1-based.
#[pyclass(frozen, eq, hash, skip_from_py_object, module = "bishape")]
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Diagram {
    inner: core::Diagram,
}

impl From<core::Diagram> for Diagram {
    fn from(inner: core::Diagram) -> Self {
        Diagram { inner }
    }
}

impl From<core::Shape> for Diagram {
    fn from(s: core::Shape) -> Self {
        Diagram { inner: s.into_diagram() }
    }
}

fn loops_dict(p: &LoopProfile) -> BTreeMap<&'static str, usize> {
    BTreeMap::from([
        ("hairpin", p.hairpin),
        ("interior", p.interior),
        ("multi", p.multi),
        ("pseudoknot", p.pseudoknot),
        ("plant", p.plant),
        ("empty", p.empty),
        ("alpha", p.alpha),
        ("beta", p.beta),
    ])
}

#[pymethods]
impl Diagram {
    #[new]
    fn new(lengths: Vec<usize>, arcs: Vec<(usize, usize)>) -> PyResult<Self> {
        core::Diagram::new(lengths, &arcs).map(Diagram::from).map_err(py_err)
    }

    /// Parses the two-line text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        core::parse_diagram(text).map(Diagram::from).map_err(py_err)
    }

    #[staticmethod]
    fn from_code(code: &str) -> PyResult<Self> {
        core::Diagram::from_canonical_code(code).map(Diagram::from).map_err(py_err)
    }

    #[getter]
    fn lengths(&self) -> Vec<usize> {
        self.inner.backbone_lengths().to_vec()
    }

    #[getter]
    fn arcs(&self) -> Vec<(usize, usize)> {
        self.inner.arcs()
    }

    #[getter]
    fn planted(&self) -> bool {
        self.inner.is_planted()
    }

    fn partner(&self, v: usize) -> PyResult<Option<usize>> {
        if v == 0 || v > self.inner.vertex_count() {
            return Err(PyValueError::new_err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.partner(v))
    }

    fn genus(&self) -> i64 {
        core::genus_of(&self.inner)
    }

    /// `(genus, r, cycles)` with cycles as lists of 1-based half-edges.
    fn boundary(&self) -> (i64, usize, Vec<Vec<usize>>) {
        let b = core::boundary_components(&self.inner);
        (b.genus, b.r, b.cycles)
    }

    fn loops(&self) -> BTreeMap<&'static str, usize> {
        loops_dict(&core::classify_loops(&self.inner))
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    fn components(&self) -> Vec<Diagram> {
        self.inner.components().into_iter().map(Diagram::from).collect()
    }

    fn plant(&self) -> PyResult<Diagram> {
        self.inner.plant().map(Diagram::from).map_err(py_err)
    }

    fn strip_plants(&self) -> PyResult<Diagram> {
        self.inner.strip_plants().map(Diagram::from).map_err(py_err)
    }

    /// `(projected diagram, empty)`.
    fn project(&self) -> (Diagram, bool) {
        let p = core::project_shape(&self.inner);
        (p.diagram.into(), p.empty)
    }

    fn is_shape(&self) -> bool {
        core::is_shape(&self.inner)
    }

    /// "A" or "B" for a one-backbone shape.
    fn shape_class(&self) -> PyResult<String> {
        let class = core::shape_class(&shape_of(self)?).map_err(py_err)?;
        Ok(format!("{class:?}"))
    }

    fn code(&self) -> String {
        self.inner.canonical_code()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Diagram.from_code('{}')", self.inner.canonical_code())
    }
}

#[pyfunction]
fn theta(d: &Diagram) -> PyResult<Diagram> {
    core::theta(&shape_of(d)?).map(Diagram::from).map_err(py_err)
}

#[pyfunction]
fn theta_inv(d: &Diagram) -> PyResult<Diagram> {
    core::theta_inv(&shape_of(d)?).map(Diagram::from).map_err(py_err)
}

#[pyfunction]
fn eta(d: &Diagram) -> PyResult<Diagram> {
    core::eta(&shape_of(d)?).map(Diagram::from).map_err(py_err)
}

#[pyfunction]
fn eta_inv(d: &Diagram) -> PyResult<Diagram> {
    core::eta_inv(&shape_of(d)?).map(Diagram::from).map_err(py_err)
}

#[pyfunction]
fn kappa(g: usize, t: usize) -> PyResult<BigInt> {
    series::kappa(g, t).map_err(py_err)
}

/// Coefficients of the shape polynomial, index = number of arcs.
#[pyfunction]
#[pyo3(signature = (backbones, genus))]
fn shape_poly(backbones: usize, genus: usize) -> PyResult<Vec<BigInt>> {
    let p = match backbones {
        1 => series::shape_poly_1bb(genus),
        2 => series::shape_poly_2bb(genus),
        _ => return Err(PyValueError::new_err("backbones must be 1 or 2")),
    };
    p.map(|p| coefficients(&p)).map_err(py_err)
}

#[pyfunction]
fn fiber_series(l: usize, order: usize) -> PyResult<Vec<BigInt>> {
    series::fiber_gf(l, order).map(|s| series_coefficients(&s)).map_err(py_err)
}

#[pyfunction]
fn w_series(genus: usize, order: usize) -> PyResult<Vec<BigInt>> {
    series::w_gf(genus, order).map(|s| series_coefficients(&s)).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (backbones, genus, include_disconnected = false, best_effort = false))]
fn enumerate_shapes(
    py: Python<'_>,
    backbones: usize,
    genus: usize,
    include_disconnected: bool,
    best_effort: bool,
) -> PyResult<Vec<Diagram>> {
    let options = ShapeEnumOptions {
        include_disconnected,
        best_effort,
        ..ShapeEnumOptions::default()
    };
    let shapes = py
        .detach(|| enumerate_shapes_with(backbones, genus, &options))
        .map_err(py_err)?;
    Ok(shapes.into_iter().map(Diagram::from).collect())
}

#[pyfunction]
fn count_fiber(py: Python<'_>, d: &Diagram, arcs: usize) -> PyResult<u64> {
    let s = shape_of(d)?;
    py.detach(|| core::count_fiber(&s, arcs)).map_err(py_err)
}

/// Uniform sampler of connected two-backbone shapes of a fixed genus.
#[pyclass(module = "bishape")]
pub struct Sampler {
    table: ShapeTable,
    arcs: Option<usize>,
    rng: ChaCha8Rng,
    attempts: u64,
    accepted: u64,
}

#[pymethods]
impl Sampler {
    #[new]
    #[pyo3(signature = (genus, seed = 1, arcs = None, cache_dir = None, best_effort = false))]
    fn new(
        py: Python<'_>,
        genus: usize,
        seed: u64,
        arcs: Option<usize>,
        cache_dir: Option<PathBuf>,
        best_effort: bool,
    ) -> PyResult<Self> {
        let dir = resolve_cache_dir(cache_dir.as_deref());
        let table = py
            .detach(|| ShapeTable::load_or_build(1, genus + 1, &dir, best_effort))
            .map_err(py_err)?;
        BishapeSampler::new(&table, arcs).map_err(py_err)?;
        let config = SamplerConfig {
            seed,
            genus,
            arcs,
            count: 0,
        };
        Ok(Sampler {
            table,
            arcs,
            rng: config.rng(0),
            attempts: 0,
            accepted: 0,
        })
    }

    fn sample(&mut self) -> PyResult<Diagram> {
        Ok(self.sample_many(1)?.remove(0))
    }

    fn sample_many(&mut self, n: usize) -> PyResult<Vec<Diagram>> {
        let mut sampler = BishapeSampler::new(&self.table, self.arcs).map_err(py_err)?;
        let out = (0..n)
            .map(|_| sampler.sample(&mut self.rng).map(Diagram::from))
            .collect::<Result<Vec<_>, _>>()
            .map_err(py_err)?;
        self.attempts += sampler.attempts();
        self.accepted += sampler.accepted();
        Ok(out)
    }

    #[getter]
    fn attempts(&self) -> u64 {
        self.attempts
    }

    #[getter]
    fn accepted(&self) -> u64 {
        self.accepted
    }

    #[getter]
    fn table_size(&self) -> usize {
        self.table.len()
    }
}

#[pymodule]
fn bishape(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Diagram>()?;
    m.add_class::<Sampler>()?;
    m.add("InfeasibleError", m.py().get_type::<InfeasibleError>())?;
    m.add_function(wrap_pyfunction!(theta, m)?)?;
    m.add_function(wrap_pyfunction!(theta_inv, m)?)?;
    m.add_function(wrap_pyfunction!(eta, m)?)?;
    m.add_function(wrap_pyfunction!(eta_inv, m)?)?;
    m.add_function(wrap_pyfunction!(kappa, m)?)?;
    m.add_function(wrap_pyfunction!(shape_poly, m)?)?;
    m.add_function(wrap_pyfunction!(fiber_series, m)?)?;
    m.add_function(wrap_pyfunction!(w_series, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_shapes, m)?)?;
    m.add_function(wrap_pyfunction!(count_fiber, m)?)?;
    Ok(())
}
