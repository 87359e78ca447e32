//! Python bindings: the state vector, the exact distributions, and the
//! end-to-end order-finding, factoring and discrete-log runs.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use shorsim_core::bounds::{dlog_bounds, order_bounds, BoundCheck};
use shorsim_core::dlog::{find_dlog as core_find_dlog, DlogPolicy};
use shorsim_core::gates::Gate;
use shorsim_core::shor::{analytic_c_distribution, Backend, OrderPolicy};
use shorsim_core::{modarith, numtheory, qft, seeded_rng, shor, Error, GateKind};

fn to_py(e: Error) -> PyErr {
    if e.is_precondition() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn backend(name: &str) -> PyResult<Backend> {
    name.parse().map_err(to_py)
}

#[pyclass(name = "StateVector", module = "shorsim")]
struct PyStateVector {
    inner: shorsim_core::StateVector,
}

#[pymethods]
impl PyStateVector {
    /// Basis state `|index>` on `wires` wires.
    #[new]
    #[pyo3(signature = (wires, index = 0))]
    fn new(wires: usize, index: u64) -> PyResult<Self> {
        Ok(Self { inner: shorsim_core::StateVector::basis(wires, index).map_err(to_py)? })
    }

    #[staticmethod]
    fn from_amplitudes(wires: usize, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        Ok(Self { inner: shorsim_core::StateVector::from_amplitudes(wires, amplitudes).map_err(to_py)? })
    }

    #[getter]
    fn wire_count(&self) -> usize {
        self.inner.wire_count()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    fn norm_sqr(&self) -> f64 {
        self.inner.norm_sqr()
    }

    /// Applies a named gate ("R", "CNOT", "Toffoli", "Fredkin", "s_gate(m)", ...).
    fn apply_gate(&mut self, kind: &str, wires: Vec<usize>) -> PyResult<()> {
        let kind: GateKind = kind.parse().map_err(to_py)?;
        self.inner.apply_unitary(&shorsim_core::standard_gate(kind), &wires).map_err(to_py)
    }

    /// Applies a unitary given as rows; the first wire is the most significant gate bit.
    fn apply_matrix(&mut self, rows: Vec<Vec<Complex64>>, wires: Vec<usize>) -> PyResult<()> {
        let gate = Gate::new(rows).map_err(to_py)?;
        self.inner.apply_unitary(&gate, &wires).map_err(to_py)
    }

    /// Applies the QFT to `register` and returns the wires to read the result from.
    fn apply_qft(&mut self, register: Vec<usize>) -> PyResult<Vec<usize>> {
        let circuit = qft::qft_circuit(register.len()).map_err(to_py)?;
        circuit.apply(&mut self.inner, &register).map_err(to_py)
    }

    fn exact_distribution(&self, wires: Vec<usize>) -> PyResult<Vec<f64>> {
        Ok(self.inner.exact_distribution(&wires).map_err(to_py)?.probabilities().to_vec())
    }

    /// Measures `wires`; returns the outcome and the collapsed state.
    fn measure(&self, wires: Vec<usize>, seed: u64) -> PyResult<(u64, PyStateVector)> {
        let m = self.inner.sample_measurement(&mut seeded_rng(seed), &wires).map_err(to_py)?;
        Ok((m.observed, PyStateVector { inner: m.collapsed }))
    }

    fn __repr__(&self) -> String {
        format!("StateVector(wires={})", self.inner.wire_count())
    }
}

#[pyfunction]
fn qft_matrix(q: u64) -> PyResult<Vec<Vec<Complex64>>> {
    qft::qft_matrix(q).map_err(to_py)
}

#[pyfunction]
fn bit_reverse(i: u64, l: u32) -> u64 {
    qft::bit_reverse(i, l)
}

/// Exact first-register marginal for an element of order `r`.
#[pyfunction]
fn c_distribution(q: u64, r: u64) -> PyResult<Vec<f64>> {
    Ok(analytic_c_distribution(q, r).map_err(to_py)?.marginal)
}

/// Smallest-denominator fraction within `1/(2q)` of `c/q`, as `(numerator, denominator)`.
#[pyfunction]
fn nearest_fraction(c: u64, q: u64, bound: u64) -> Option<(u64, u64)> {
    numtheory::nearest_fraction(c, q, bound).map(|f| (f.numerator, f.denominator))
}

#[pyfunction]
fn crt(residues: Vec<(u64, u64)>) -> PyResult<(u64, u64)> {
    numtheory::crt(&residues).map_err(to_py)
}

#[pyfunction]
fn modinv(c: u64, n: u64) -> PyResult<u64> {
    numtheory::modinv(c, n).map_err(to_py)
}

#[pyfunction]
fn brute_order(x: u64, n: u64) -> PyResult<u64> {
    numtheory::brute_order(x, n).map_err(to_py)
}

/// Images of `b -> b c mod n` on an `l`-bit register.
#[pyfunction]
fn mul_const_mod(c: u64, n: u64, l: u32) -> PyResult<Vec<u32>> {
    Ok(modarith::mul_const_mod(c, n, l).map_err(to_py)?.images().to_vec())
}

#[pyfunction]
#[pyo3(signature = (n, x, seed, trials = 20, backend = "closed_form"))]
fn find_order(n: u64, x: u64, seed: u64, trials: usize, backend: &str) -> PyResult<u64> {
    let policy = OrderPolicy { max_trials: trials, backend: self::backend(backend)?, ..Default::default() };
    let report = shor::find_order(n, x, &policy, &mut seeded_rng(seed)).map_err(to_py)?;
    Ok(report.order.expect("find_order returns a verified order"))
}

#[pyfunction]
#[pyo3(signature = (n, seed, trials = 20))]
fn factor(n: u64, seed: u64, trials: usize) -> PyResult<u64> {
    let policy = OrderPolicy { max_trials: trials, ..Default::default() };
    let report = shor::factor(n, &policy, &mut seeded_rng(seed)).map_err(to_py)?;
    Ok(report.divisor.expect("factor returns a divisor"))
}

#[pyfunction]
#[pyo3(signature = (p, g, x, seed, backend = "closed_form"))]
fn find_dlog(p: u64, g: u64, x: u64, seed: u64, backend: &str) -> PyResult<u64> {
    let policy = DlogPolicy { backend: self::backend(backend)?, ..Default::default() };
    let report = core_find_dlog(p, g, x, &policy, &mut seeded_rng(seed)).map_err(to_py)?;
    Ok(report.r.expect("find_dlog returns a verified logarithm"))
}

fn rows(checks: Vec<BoundCheck>) -> Vec<(String, f64, f64, bool)> {
    checks.into_iter().map(|c| (c.name, c.observed, c.bound, c.pass)).collect()
}

/// `(name, observed, bound, pass)` for the order-finding bounds.
#[pyfunction]
fn verify_order_bounds(q: u64, r: u64) -> PyResult<Vec<(String, f64, f64, bool)>> {
    Ok(rows(order_bounds(q, r).map_err(to_py)?))
}

/// `(name, observed, bound, pass)` for the discrete-log bounds.
#[pyfunction]
fn verify_dlog_bounds(p: u64, g: u64, x: u64) -> PyResult<Vec<(String, f64, f64, bool)>> {
    Ok(rows(dlog_bounds(p, g, x).map_err(to_py)?))
}

#[pymodule]
fn shorsim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStateVector>()?;
    m.add_function(wrap_pyfunction!(qft_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(bit_reverse, m)?)?;
    m.add_function(wrap_pyfunction!(c_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(nearest_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(crt, m)?)?;
    m.add_function(wrap_pyfunction!(modinv, m)?)?;
    m.add_function(wrap_pyfunction!(brute_order, m)?)?;
    m.add_function(wrap_pyfunction!(mul_const_mod, m)?)?;
    m.add_function(wrap_pyfunction!(find_order, m)?)?;
    m.add_function(wrap_pyfunction!(factor, m)?)?;
    m.add_function(wrap_pyfunction!(find_dlog, m)?)?;
    m.add_function(wrap_pyfunction!(verify_order_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(verify_dlog_bounds, m)?)?;
    Ok(())
}
