//! Python bindings: `import pyrmcount`.
//!
//! Codewords cross the boundary as lists of 0/1 ints. Long computations
//! release the interpreter lock.

use pyo3::exceptions::{PyMemoryError, PyValueError};
use pyo3::prelude::*;

use rmcount::oracle::{rate_of_count, EnergyHistogram};
use rmcount::{
    BitVector, Constraint, EnergyFunction, EstimatorConfig, GibbsParams, InitMode, LowerBoundReading, RngStream,
    Schedule, DEFAULT_EXHAUSTIVE_K, EXTENDED_EXHAUSTIVE_K,
};

fn to_py(e: rmcount::Error) -> PyErr {
    match e {
        rmcount::Error::Resource(msg) => PyMemoryError::new_err(msg),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn bits_in(bits: Vec<u8>) -> PyResult<BitVector> {
    if bits.iter().any(|&b| b > 1) {
        return Err(PyValueError::new_err("bits must be 0 or 1"));
    }
    Ok(BitVector::from_bits(&bits.iter().map(|&b| b == 1).collect::<Vec<_>>()))
}

fn bits_out(v: &BitVector) -> Vec<u8> {
    v.to_bits().into_iter().map(u8::from).collect()
}

fn bound(allow_k29: bool) -> usize {
    if allow_k29 {
        EXTENDED_EXHAUSTIVE_K
    } else {
        DEFAULT_EXHAUSTIVE_K
    }
}

/// Binary Reed-Muller code RM(m, r).
#[pyclass(name = "RmCode", module = "pyrmcount", frozen)]
pub struct PyRmCode {
    inner: rmcount::RmCode,
}

#[pymethods]
impl PyRmCode {
    #[new]
    fn new(m: usize, r: usize) -> PyResult<Self> {
        Ok(PyRmCode {
            inner: rmcount::RmCode::new(m, r).map_err(to_py)?,
        })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn min_distance(&self) -> usize {
        self.inner.min_distance()
    }

    #[getter]
    fn rate(&self) -> f64 {
        self.inner.rate()
    }

    fn encode(&self, message: Vec<u8>) -> PyResult<Vec<u8>> {
        let c = self.inner.encode(&bits_in(message)?).map_err(to_py)?;
        Ok(bits_out(&c))
    }

    fn contains(&self, word: Vec<u8>) -> PyResult<bool> {
        Ok(self.inner.contains(&bits_in(word)?))
    }

    #[pyo3(signature = (seed=0))]
    fn random_codeword(&self, seed: u64) -> Vec<u8> {
        bits_out(&self.inner.random_codeword(&mut RngStream::new(seed).generator()))
    }

    /// `count` uniform minimum-weight codewords.
    #[pyo3(signature = (count=1, seed=0))]
    fn sample_min_weight(&self, count: usize, seed: u64) -> Vec<Vec<u8>> {
        let mut g = RngStream::new(seed).generator();
        (0..count)
            .map(|_| bits_out(&self.inner.sample_min_weight_codeword(&mut g)))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("RmCode(m={}, r={})", self.inner.m(), self.inner.r())
    }
}

/// An `rll:<d>` or `weight:<w>` constraint.
#[pyclass(name = "Constraint", module = "pyrmcount", frozen)]
pub struct PyConstraint {
    inner: Constraint,
}

#[pymethods]
impl PyConstraint {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(PyConstraint {
            inner: spec.parse().map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn rll(d: usize) -> PyResult<Self> {
        Ok(PyConstraint {
            inner: Constraint::rll(d).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn weight(w: usize) -> Self {
        PyConstraint {
            inner: Constraint::weight(w),
        }
    }

    fn energy(&self, word: Vec<u8>) -> PyResult<u32> {
        Ok(self.inner.energy(&bits_in(word)?))
    }

    fn is_satisfied(&self, word: Vec<u8>) -> PyResult<bool> {
        Ok(self.inner.is_satisfied(&bits_in(word)?))
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Constraint({:?})", self.inner.to_string())
    }
}

/// Result of one estimate, or the median of several.
#[pyclass(name = "Estimate", module = "pyrmcount", frozen, get_all)]
pub struct PyEstimate {
    log2_estimate: f64,
    rate: f64,
    steps_used: u64,
    converged: bool,
    final_beta: f64,
    ratio_trace: Vec<f64>,
    replica_log2: Vec<f64>,
}

#[pymethods]
impl PyEstimate {
    #[getter]
    fn estimate(&self) -> f64 {
        self.log2_estimate.exp2()
    }

    fn __repr__(&self) -> String {
        format!(
            "Estimate(Z_hat={}, rate={:.4}, steps={}, converged={})",
            rmcount::estimator::format_sci(self.log2_estimate),
            self.rate,
            self.steps_used,
            self.converged
        )
    }
}

#[pyfunction]
#[pyo3(signature = (code, constraint, allow_k29=false))]
fn exact_count(py: Python<'_>, code: &PyRmCode, constraint: &PyConstraint, allow_k29: bool) -> PyResult<u128> {
    let c = constraint.inner;
    py.detach(|| rmcount::exact_constrained_count(&code.inner, &c, bound(allow_k29)))
        .map_err(to_py)
}

/// `A(w)` for `w = 0..=n`; falls back to the dual code when `k` is too large.
#[pyfunction]
#[pyo3(signature = (code, allow_k29=false))]
fn weight_enumerator(py: Python<'_>, code: &PyRmCode, allow_k29: bool) -> PyResult<Vec<u128>> {
    let b = bound(allow_k29);
    py.detach(|| {
        if code.inner.k() <= b {
            rmcount::weight_enumerator(&code.inner, b)
        } else {
            rmcount::weight_enumerator_via_dual(&code.inner, b)
        }
    })
    .map_err(to_py)
}

#[pyfunction]
fn partition_function(py: Python<'_>, code: &PyRmCode, constraint: &PyConstraint, beta: f64) -> PyResult<f64> {
    let c = constraint.inner;
    py.detach(|| EnergyHistogram::compute(&code.inner, &c, DEFAULT_EXHAUSTIVE_K))
        .map(|h| h.partition_function(beta))
        .map_err(to_py)
}

#[pyfunction]
fn rate_of(count: u128, n: usize) -> f64 {
    rate_of_count(count, n)
}

/// Runs `tau` Metropolis steps at inverse temperature `beta`.
#[pyfunction]
#[pyo3(signature = (code, constraint, beta, tau, init=None, seed=0))]
fn run_chain(
    py: Python<'_>,
    code: &PyRmCode,
    constraint: &PyConstraint,
    beta: f64,
    tau: u64,
    init: Option<Vec<u8>>,
    seed: u64,
) -> PyResult<Vec<u8>> {
    let params = GibbsParams::new(beta, constraint.inner).map_err(to_py)?;
    let start = match init {
        Some(bits) => bits_in(bits)?,
        None => BitVector::zeros(code.inner.n()),
    };
    let out = py.detach(|| {
        let mut g = RngStream::new(seed).generator();
        rmcount::run_chain(&code.inner, &params, tau, start, &mut g)
    });
    out.map(|c| bits_out(&c)).map_err(to_py)
}

/// Adaptive estimate (or fixed schedule when `beta_star` is given), median
/// over `replicas` independent runs.
#[pyfunction]
#[pyo3(signature = (code, constraint, t=100, tau=10_000, delta=0.001, beta_star=None, seed=0, replicas=1, init="zero"))]
#[allow(clippy::too_many_arguments)]
fn estimate(
    py: Python<'_>,
    code: &PyRmCode,
    constraint: &PyConstraint,
    t: usize,
    tau: u64,
    delta: f64,
    beta_star: Option<f64>,
    seed: u64,
    replicas: usize,
    init: &str,
) -> PyResult<PyEstimate> {
    let config = EstimatorConfig {
        init: init.parse::<InitMode>().map_err(to_py)?,
        ..EstimatorConfig::with_samples(t, tau)
    };
    let schedule = match beta_star {
        Some(beta_star) => Schedule::Fixed { beta_star },
        None => Schedule::Adaptive { delta },
    };
    let c = constraint.inner;
    let med = py
        .detach(|| rmcount::median_amplify(&code.inner, &c, schedule, &config, replicas, seed))
        .map_err(to_py)?;
    // Diagnostics come from the replica closest to the median.
    let pick = med
        .replicas
        .iter()
        .min_by(|a, b| {
            (a.log2_estimate - med.log2_median)
                .abs()
                .total_cmp(&(b.log2_estimate - med.log2_median).abs())
        })
        .expect("at least one replica");
    Ok(PyEstimate {
        log2_estimate: med.log2_median,
        rate: med.rate,
        steps_used: pick.steps_used,
        converged: med.replicas.iter().all(|r| r.converged),
        final_beta: pick.final_beta,
        ratio_trace: pick.ratio_trace.clone(),
        replica_log2: med.replicas.iter().map(|r| r.log2_estimate).collect(),
    })
}

/// `(t_star, total_samples)` for schedule length `ell` and accuracy `epsilon`.
#[pyfunction]
#[pyo3(signature = (ell, epsilon=1.0))]
fn sample_budget(ell: u64, epsilon: f64) -> PyResult<(u64, u128)> {
    let b = rmcount::sample_budget(ell, epsilon).map_err(to_py)?;
    Ok((b.t_star, b.total_samples()))
}

/// `(first_branch, second_branch, value)` of the RLL(1) rate lower bound.
#[pyfunction]
#[pyo3(signature = (m, r, reading="log2"))]
fn rll_rate_lower_bound(m: usize, r: usize, reading: &str) -> PyResult<(f64, f64, f64)> {
    let reading: LowerBoundReading = reading.parse().map_err(to_py)?;
    let b = rmcount::rll_rate_lower_bound(m, r, reading).map_err(to_py)?;
    Ok((b.first_branch, b.second_branch, b.value))
}

#[pymodule]
mod pyrmcount {
    #[pymodule_export]
    use super::{
        estimate, exact_count, partition_function, rate_of, rll_rate_lower_bound, run_chain, sample_budget,
        weight_enumerator, PyConstraint, PyEstimate, PyRmCode,
    };
}
