//! Python bindings: the main types and operations of `partial-records`.
//!
//! Exact rationals cross the boundary as `"num/den"` strings (feed them to
//! `fractions.Fraction`); floating results stay floats.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use partial_records::model::{self, BasePermutation};
use partial_records::rng::SplitMix64;
use partial_records::{families, formulas, mc, oracle, parse_rational, Prob};

fn err(e: partial_records::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "BasePermutation")]
struct PyBasePermutation {
    inner: BasePermutation,
}

#[pymethods]
impl PyBasePermutation {
    #[new]
    fn new(values: Vec<u32>) -> PyResult<Self> {
        Ok(Self {
            inner: BasePermutation::new(values).map_err(err)?,
        })
    }

    /// (1, 2, ..., n)
    #[staticmethod]
    fn identity(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: families::identity(n).map_err(err)?,
        })
    }

    /// The shifted extremal family (n-k, ..., n, 1, ..., n-k-1) with
    /// k = floor(sqrt(n/p)) unless overridden.
    #[staticmethod]
    #[pyo3(signature = (n, p, k=None))]
    fn bmb(n: usize, p: f64, k: Option<usize>) -> PyResult<Self> {
        Ok(Self {
            inner: families::shifted(n, p, k).map_err(err)?,
        })
    }

    #[staticmethod]
    fn random(n: usize, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: families::random_uniform(n, &mut SplitMix64::new(seed)),
        })
    }

    /// Parse the one-line text format, e.g. "3 1 2".
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: families::parse_permutation(text).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn values(&self) -> Vec<u32> {
        self.inner.values().to_vec()
    }

    fn text(&self) -> String {
        families::format_permutation(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("BasePermutation(\"{}\")", self.text())
    }
}

#[pyclass(name = "RealizedPermutation")]
struct PyRealizedPermutation {
    inner: model::RealizedPermutation,
}

#[pymethods]
impl PyRealizedPermutation {
    fn values(&self) -> Vec<u32> {
        self.inner.values().to_vec()
    }

    fn marks(&self) -> Vec<bool> {
        self.inner.marks().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("RealizedPermutation(values={:?})", self.inner.values())
    }
}

#[pyclass(name = "RecordTally")]
struct PyRecordTally {
    #[pyo3(get)]
    total: u32,
    #[pyo3(get)]
    unmarked: u32,
    #[pyo3(get)]
    marked: u32,
}

#[pymethods]
impl PyRecordTally {
    fn __repr__(&self) -> String {
        format!(
            "RecordTally(total={}, unmarked={}, marked={})",
            self.total, self.unmarked, self.marked
        )
    }
}

#[pyclass(name = "MCEstimate")]
struct PyMCEstimate {
    inner: mc::MCEstimate,
}

#[pymethods]
impl PyMCEstimate {
    #[getter]
    fn mean_total(&self) -> f64 {
        self.inner.mean_total()
    }

    #[getter]
    fn mean_unmarked(&self) -> f64 {
        self.inner.mean_unmarked()
    }

    #[getter]
    fn mean_marked(&self) -> f64 {
        self.inner.mean_marked()
    }

    #[getter]
    fn var_total(&self) -> f64 {
        self.inner.var_total()
    }

    #[getter]
    fn var_unmarked(&self) -> f64 {
        self.inner.var_unmarked()
    }

    #[getter]
    fn var_marked(&self) -> f64 {
        self.inner.var_marked()
    }

    #[getter]
    fn samples(&self) -> u64 {
        self.inner.samples()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed()
    }

    #[getter]
    fn stderr_total(&self) -> f64 {
        self.inner.stderr_total()
    }

    /// Pool with an estimate over the adjacent replica range of the same run.
    fn merge(&self, other: &PyMCEstimate) -> PyResult<PyMCEstimate> {
        Ok(PyMCEstimate {
            inner: self.inner.merge(&other.inner).map_err(err)?,
        })
    }

    /// z * sqrt(var/samples) for (total, unmarked, marked).
    fn ci_halfwidth(&self, z: f64) -> PyResult<(f64, f64, f64)> {
        self.inner.ci_halfwidth(z).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.inner.record())
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!(
            "MCEstimate(mean_total={}, samples={}, seed={})",
            self.inner.mean_total(),
            self.inner.samples(),
            self.inner.seed()
        )
    }
}

#[pyclass(name = "ExactExpectation")]
struct PyExactExpectation {
    inner: oracle::ExactExpectation,
}

fn rat_str(r: &num_rational::BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn rat_f64(r: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[pymethods]
impl PyExactExpectation {
    #[getter]
    fn e_total(&self) -> String {
        rat_str(&self.inner.e_total)
    }

    #[getter]
    fn e_unmarked(&self) -> String {
        rat_str(&self.inner.e_unmarked)
    }

    #[getter]
    fn e_marked(&self) -> String {
        rat_str(&self.inner.e_marked)
    }

    #[getter]
    fn e_total_float(&self) -> f64 {
        rat_f64(&self.inner.e_total)
    }

    #[getter]
    fn e_unmarked_float(&self) -> f64 {
        rat_f64(&self.inner.e_unmarked)
    }

    #[getter]
    fn e_marked_float(&self) -> f64 {
        rat_f64(&self.inner.e_marked)
    }

    /// P(A_k) per position, as "num/den" strings.
    fn per_position_unmarked(&self) -> Vec<String> {
        self.inner
            .per_position_unmarked
            .iter()
            .map(rat_str)
            .collect()
    }

    /// P(B_l) per value, as "num/den" strings.
    fn per_value_marked(&self) -> Vec<String> {
        self.inner.per_value_marked.iter().map(rat_str).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "ExactExpectation(e_total={}, e_unmarked={}, e_marked={})",
            self.e_total(),
            self.e_unmarked(),
            self.e_marked()
        )
    }
}

/// Mark each position with probability p and shuffle the marked values.
#[pyfunction]
fn partial_shuffle(base: &PyBasePermutation, p: f64, seed: u64) -> PyResult<PyRealizedPermutation> {
    if !(0.0..=1.0).contains(&p) {
        return Err(PyValueError::new_err(format!("p={p} not in [0,1]")));
    }
    let mut rng = SplitMix64::new(seed);
    Ok(PyRealizedPermutation {
        inner: model::apply_partial_shuffle(&base.inner, p, &mut rng),
    })
}

/// Count left-to-right maxima, split by mark flag.
#[pyfunction]
fn count_records(x: &PyRealizedPermutation) -> PyRecordTally {
    let t = model::count_records(&x.inner);
    PyRecordTally {
        total: t.total,
        unmarked: t.unmarked,
        marked: t.marked,
    }
}

/// Quadrant counts (n11, n12, n21, n22) of base split at position k by value v.
#[pyfunction]
fn quadrant_counts(
    base: &PyBasePermutation,
    k: usize,
    v: u32,
) -> PyResult<(usize, usize, usize, usize)> {
    let q = model::quadrant_counts(&base.inner, k, v).map_err(err)?;
    Ok((q.n11, q.n12, q.n21, q.n22))
}

/// Exact expectations by full enumeration; p must be "num/den".
#[pyfunction]
fn exact_expectations(base: &PyBasePermutation, p: &str) -> PyResult<PyExactExpectation> {
    let p = parse_rational(p).map_err(err)?;
    Ok(PyExactExpectation {
        inner: oracle::exact_expectations(&base.inner, &p).map_err(err)?,
    })
}

/// Exact P(A_k) as "num/den"; p must be "num/den".
#[pyfunction]
fn prob_unmarked_record_at(base: &PyBasePermutation, p: &str, k: usize) -> PyResult<String> {
    let p = parse_rational(p).map_err(err)?;
    Ok(rat_str(
        &oracle::prob_unmarked_record_at(&base.inner, &p, k).map_err(err)?,
    ))
}

/// Exact P(B_l) (or P(B_{l,k}) when k is given) as "num/den".
#[pyfunction]
#[pyo3(signature = (base, p, l, k=None))]
fn prob_marked_record(
    base: &PyBasePermutation,
    p: &str,
    l: u32,
    k: Option<usize>,
) -> PyResult<String> {
    let p = parse_rational(p).map_err(err)?;
    Ok(rat_str(
        &oracle::prob_marked_record(&base.inner, &p, l, k).map_err(err)?,
    ))
}

/// Monte Carlo estimate from `samples` reproducible replicas.
#[pyfunction]
fn mc_estimate(
    base: &PyBasePermutation,
    p: f64,
    samples: u64,
    seed: u64,
) -> PyResult<PyMCEstimate> {
    Ok(PyMCEstimate {
        inner: mc::estimate(&base.inner, p, samples, seed).map_err(err)?,
    })
}

/// sum_{j=1..n} (1 - (1-p)^j)/j, the sharp bound on E[marked records].
#[pyfunction]
fn marked_records_sum(n: usize, p: f64) -> f64 {
    formulas::marked_records_sum_real(n, p)
}

/// Exact-rational mode of `marked_records_sum`; p and result are "num/den".
#[pyfunction]
fn marked_records_sum_exact(n: usize, p: &str) -> PyResult<String> {
    let p = parse_rational(p).map_err(err)?;
    Ok(rat_str(&formulas::marked_records_sum_exact(n, &p)))
}

/// (1 - (1-p)^(n-l+1)) / (n-l+1), the closed bound on P(B_l).
#[pyfunction]
fn marked_value_bound(n: usize, l: u32, p: f64) -> PyResult<f64> {
    formulas::marked_value_bound_real(n, l, p).map_err(err)
}

/// Literal sum for the probability of an unmarked record at position k.
#[pyfunction]
fn unmarked_record_formula(n: usize, k: usize, value: u32, n12: usize, p: f64) -> PyResult<f64> {
    let prob = Prob::real(p).map_err(err)?;
    let inputs = formulas::FormulaInputs::new(n, k, value, n12, prob).map_err(err)?;
    Ok(formulas::unmarked_record_formula_real(&inputs, p))
}

/// Literal sum for the probability that value l is a marked record at k.
#[pyfunction]
fn marked_record_formula(n: usize, k: usize, value: u32, n12: usize, p: f64) -> PyResult<f64> {
    let prob = Prob::real(p).map_err(err)?;
    let inputs = formulas::FormulaInputs::new(n, k, value, n12, prob).map_err(err)?;
    Ok(formulas::marked_record_formula_real(&inputs, p))
}

/// The extremal growth scale (1-p) sqrt(n/p).
#[pyfunction]
fn extremal_scale(n: usize, p: f64) -> PyResult<f64> {
    formulas::extremal_scale(n, p).map_err(err)
}

/// log C(n, k); -inf outside 0 <= k <= n.
#[pyfunction]
fn log_binom(n: u64, k: i64) -> f64 {
    formulas::log_binom(n, k)
}

#[pymodule]
fn partial_records_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBasePermutation>()?;
    m.add_class::<PyRealizedPermutation>()?;
    m.add_class::<PyRecordTally>()?;
    m.add_class::<PyMCEstimate>()?;
    m.add_class::<PyExactExpectation>()?;
    m.add_function(wrap_pyfunction!(partial_shuffle, m)?)?;
    m.add_function(wrap_pyfunction!(count_records, m)?)?;
    m.add_function(wrap_pyfunction!(quadrant_counts, m)?)?;
    m.add_function(wrap_pyfunction!(exact_expectations, m)?)?;
    m.add_function(wrap_pyfunction!(prob_unmarked_record_at, m)?)?;
    m.add_function(wrap_pyfunction!(prob_marked_record, m)?)?;
    m.add_function(wrap_pyfunction!(mc_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(marked_records_sum, m)?)?;
    m.add_function(wrap_pyfunction!(marked_records_sum_exact, m)?)?;
    m.add_function(wrap_pyfunction!(marked_value_bound, m)?)?;
    m.add_function(wrap_pyfunction!(unmarked_record_formula, m)?)?;
    m.add_function(wrap_pyfunction!(marked_record_formula, m)?)?;
    m.add_function(wrap_pyfunction!(extremal_scale, m)?)?;
    m.add_function(wrap_pyfunction!(log_binom, m)?)?;
    Ok(())
}
