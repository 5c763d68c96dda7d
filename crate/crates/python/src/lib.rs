//! Python bindings.
//!
//! Words cross the boundary as lists of 1-based generator indices, coset
//! labels as bit strings, and couplings as rational strings.
//!
//! ```python
//! import treespin
//! spec = treespin.SubgroupSpec.build(3, 3)
//! spec.generator_vectors         # ['100', '010', '001', '111']
//! res = treespin.count_periodic_ground_states(spec, 8, "-1")
//! res.periodic_count, res.formula_count
//! ```

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use treespin_core::census::{self, CensusOptions, DEFAULT_BUDGET};
use treespin_core::dot::export_dot;
use treespin_core::io::{parse_coupling, ConfigFile, SpecFile};
use treespin_core::{
    self as core, CosetColoring, CosetLabel, CouplingSign, ModelParams, TreeParams, Word,
};

fn py_err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn word(k: u32, letters: &[u32]) -> PyResult<Word> {
    core::reduce(letters, TreeParams::new(k).map_err(py_err)?).map_err(py_err)
}

fn letters(w: &Word) -> Vec<u32> {
    w.letters().to_vec()
}

/// Reduced form of a letter sequence.
#[pyfunction]
fn reduce(k: u32, letters: Vec<u32>) -> PyResult<Vec<u32>> {
    Ok(word(k, &letters)?.letters().to_vec())
}

#[pyfunction]
fn multiply(k: u32, x: Vec<u32>, y: Vec<u32>) -> PyResult<Vec<u32>> {
    let product = word(k, &x)?.multiply(&word(k, &y)?).map_err(py_err)?;
    Ok(letters(&product))
}

#[pyfunction]
fn distance(k: u32, x: Vec<u32>, y: Vec<u32>) -> PyResult<usize> {
    word(k, &x)?.distance(&word(k, &y)?).map_err(py_err)
}

/// Words within `radius` of `center`, in canonical order.
#[pyfunction]
fn ball(k: u32, center: Vec<u32>, radius: usize) -> PyResult<Vec<Vec<u32>>> {
    Ok(core::ball(&word(k, &center)?, radius)
        .iter()
        .map(letters)
        .collect())
}

#[pyfunction]
fn sphere(k: u32, n: usize) -> PyResult<Vec<Vec<u32>>> {
    let tree = TreeParams::new(k).map_err(py_err)?;
    Ok(core::sphere(n, tree).iter().map(letters).collect())
}

#[pyfunction]
fn kronecker_u(spins: Vec<u32>, q: u32) -> PyResult<usize> {
    core::kronecker_u(&spins, q).map_err(py_err)
}

#[pyfunction]
fn u_extremes(ball_size: usize, q: u32) -> PyResult<(usize, usize)> {
    if ball_size == 0 {
        return Err(PyValueError::new_err("ball_size must be >= 1"));
    }
    Ok(core::u_extremes(ball_size, q))
}

#[pyfunction]
fn theorem2_formula(q: u32, k: u32) -> PyResult<u128> {
    core::theorem2_formula(q, k).map_err(py_err)
}

#[pyfunction]
fn build_alpha_patterns(m: u32) -> PyResult<Vec<String>> {
    Ok(core::build_alpha_patterns(m)
        .map_err(py_err)?
        .iter()
        .map(|p| p.to_string())
        .collect())
}

#[pyclass(name = "SubgroupSpec", frozen)]
struct PySubgroupSpec {
    inner: core::SubgroupSpec,
}

#[pymethods]
impl PySubgroupSpec {
    /// Literal construction for `k = 2^(m-1) - 1`.
    #[staticmethod]
    fn build(k: u32, m: u32) -> PyResult<Self> {
        Ok(Self {
            inner: core::build_a_sets(k, m).map_err(py_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (k, m, vectors=None))]
    fn generalize(k: u32, m: u32, vectors: Option<Vec<String>>) -> PyResult<Self> {
        let vectors = vectors
            .map(|vs| {
                vs.iter()
                    .map(|v| CosetLabel::parse(v))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()
            .map_err(py_err)?;
        Ok(Self {
            inner: core::generalize_a_sets(k, m, vectors.as_deref()).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: SpecFile =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self {
            inner: file.spec().map_err(py_err)?,
        })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&SpecFile::from(&self.inner)).expect("serializable")
    }

    #[getter]
    fn k(&self) -> u32 {
        self.inner.k()
    }

    #[getter]
    fn m(&self) -> u32 {
        self.inner.m()
    }

    #[getter]
    fn a_sets(&self) -> Vec<Vec<u32>> {
        self.inner.a_sets().to_vec()
    }

    #[getter]
    fn generator_vectors(&self) -> Vec<String> {
        self.inner
            .generator_vectors()
            .iter()
            .map(|v| v.to_string())
            .collect()
    }

    fn is_valid(&self) -> bool {
        self.inner.is_valid()
    }

    fn is_full_index(&self) -> bool {
        self.inner.is_full_index()
    }

    fn rank(&self) -> u32 {
        self.inner.rank()
    }

    fn parity_vector(&self, word_letters: Vec<u32>) -> PyResult<String> {
        let w = word(self.inner.k(), &word_letters)?;
        Ok(core::parity_vector(&w, &self.inner)
            .map_err(py_err)?
            .to_string())
    }

    /// `(pass, witness)`; the witness is the first failing center.
    fn gamma_check(&self, radius: usize) -> (bool, Option<Vec<u32>>) {
        let report = core::gamma_check(&self.inner, radius);
        (report.pass, report.witness.as_ref().map(letters))
    }

    fn cooccurrence_differences(&self) -> Vec<String> {
        core::cooccurrence_differences(&self.inner)
            .iter()
            .map(|d| d.to_string())
            .collect()
    }

    fn count_by_constraint_graph(&self, q: u32) -> PyResult<u128> {
        core::count_by_constraint_graph(&self.inner, q).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "SubgroupSpec(k={}, m={}, A={:?})",
            self.inner.k(),
            self.inner.m(),
            self.inner.a_sets()
        )
    }
}

/// A spin configuration on `V_n` together with its model parameters.
#[pyclass(name = "Configuration", frozen)]
struct PyConfiguration {
    params: ModelParams,
    n: usize,
    config: core::SpinConfiguration,
}

#[pymethods]
impl PyConfiguration {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: ConfigFile =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self {
            params: file.params().map_err(py_err)?,
            n: file.n,
            config: file.configuration().map_err(py_err)?,
        })
    }

    /// Periodic configuration from per-label colors (index = label value).
    #[staticmethod]
    #[pyo3(signature = (spec, colors, n, q, j, r=2))]
    fn periodic(
        spec: &PySubgroupSpec,
        colors: Vec<u32>,
        n: usize,
        q: u32,
        j: &str,
        r: u32,
    ) -> PyResult<Self> {
        let coloring = CosetColoring::new(spec.inner.m(), colors).map_err(py_err)?;
        let config = core::periodic_config(&coloring, &spec.inner, n, q).map_err(py_err)?;
        let params = ModelParams::new(spec.inner.k(), r, q, parse_coupling(j).map_err(py_err)?)
            .map_err(py_err)?;
        Ok(Self { params, n, config })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&ConfigFile::from_parts(&self.params, self.n, &self.config))
            .expect("serializable")
    }

    fn to_dot(&self) -> PyResult<String> {
        export_dot(&self.config, self.n).map_err(py_err)
    }

    fn spin(&self, word_letters: Vec<u32>) -> PyResult<Option<u32>> {
        Ok(self.config.get(&word(self.params.k(), &word_letters)?))
    }

    /// Exact energy as a rational string.
    fn hamiltonian(&self) -> PyResult<String> {
        Ok(core::hamiltonian(&self.config, &self.params, self.n)
            .map_err(py_err)?
            .to_string())
    }

    /// `(pass, [(center, u_value, target, pass), ...])`, failing balls first.
    #[allow(clippy::type_complexity)]
    fn is_ground_state(&self) -> PyResult<(bool, Vec<(Vec<u32>, usize, usize, bool)>)> {
        let report = core::is_ground_state(&self.config, &self.params, self.n).map_err(py_err)?;
        let balls = report
            .reports
            .iter()
            .map(|b| (letters(&b.center), b.u_value, b.target, b.pass))
            .collect();
        Ok((report.pass, balls))
    }

    fn __len__(&self) -> usize {
        self.config.len()
    }
}

#[pyclass(name = "CensusResult", frozen)]
struct PyCensusResult {
    inner: core::CensusResult,
}

#[pymethods]
impl PyCensusResult {
    #[getter]
    fn min_energy(&self) -> Option<String> {
        self.inner.min_energy.as_ref().map(|e| e.to_string())
    }

    #[getter]
    fn minimizer_count(&self) -> Option<u128> {
        self.inner.minimizer_count
    }

    #[getter]
    fn minimizers(&self) -> Vec<Vec<u32>> {
        self.inner.minimizers.clone()
    }

    #[getter]
    fn periodic_count(&self) -> Option<u128> {
        self.inner.periodic_count
    }

    #[getter]
    fn constraint_graph_count(&self) -> Option<u128> {
        self.inner.constraint_graph_count
    }

    #[getter]
    fn formula_count(&self) -> Option<u128> {
        self.inner.formula_count
    }

    #[getter]
    fn restriction_count(&self) -> Option<u128> {
        self.inner.restriction_count
    }

    #[getter]
    fn agreement(&self) -> BTreeMap<String, bool> {
        self.inner.agreement.clone()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("serializable")
    }
}

fn options(workers: usize, budget: u128) -> PyResult<CensusOptions> {
    if workers == 0 {
        return Err(PyValueError::new_err("workers must be >= 1"));
    }
    Ok(CensusOptions::default()
        .with_workers(workers)
        .with_budget(budget))
}

#[pyfunction]
#[pyo3(signature = (k, r, q, j, n, workers=1, budget=DEFAULT_BUDGET))]
#[allow(clippy::too_many_arguments)]
fn exhaustive_min_energy(
    py: Python<'_>,
    k: u32,
    r: u32,
    q: u32,
    j: &str,
    n: usize,
    workers: usize,
    budget: u128,
) -> PyResult<PyCensusResult> {
    let params = ModelParams::new(k, r, q, parse_coupling(j).map_err(py_err)?).map_err(py_err)?;
    let opts = options(workers, budget)?;
    let inner = py
        .detach(|| census::exhaustive_min_energy(&params, n, &opts))
        .map_err(py_err)?;
    Ok(PyCensusResult { inner })
}

#[pyfunction]
#[pyo3(signature = (spec, q, j, workers=1, budget=DEFAULT_BUDGET))]
fn count_periodic_ground_states(
    py: Python<'_>,
    spec: &PySubgroupSpec,
    q: u32,
    j: &str,
    workers: usize,
    budget: u128,
) -> PyResult<PyCensusResult> {
    let sign = CouplingSign::of(&parse_coupling(j).map_err(py_err)?).map_err(py_err)?;
    let opts = options(workers, budget)?;
    let inner = py
        .detach(|| census::count_periodic_ground_states(&spec.inner, q, sign, &opts))
        .map_err(py_err)?;
    Ok(PyCensusResult { inner })
}

#[pymodule]
fn treespin(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(multiply, m)?)?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(ball, m)?)?;
    m.add_function(wrap_pyfunction!(sphere, m)?)?;
    m.add_function(wrap_pyfunction!(kronecker_u, m)?)?;
    m.add_function(wrap_pyfunction!(u_extremes, m)?)?;
    m.add_function(wrap_pyfunction!(theorem2_formula, m)?)?;
    m.add_function(wrap_pyfunction!(build_alpha_patterns, m)?)?;
    m.add_function(wrap_pyfunction!(exhaustive_min_energy, m)?)?;
    m.add_function(wrap_pyfunction!(count_periodic_ground_states, m)?)?;
    m.add_class::<PySubgroupSpec>()?;
    m.add_class::<PyConfiguration>()?;
    m.add_class::<PyCensusResult>()?;
    Ok(())
}
