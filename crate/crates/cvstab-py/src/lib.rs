use cvstab::circuit::parse_circuit;
use cvstab::encoding::{encode_basis_state as encode, EmbeddingParams};
use cvstab::pipeline::{self, VerifyOptions, DEFAULT_MAX_BRANCHES};
use cvstab::report::Report;
use cvstab::rsb::Method;
use cvstab::wigner::{input_wavefunction, negativity, wigner_of_wavefunction};
use cvstab::Error;
use pyo3::create_exception;
use pyo3::exceptions::{PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

create_exception!(cvstab_py, CircuitRejected, PyValueError, "The circuit is not simulatable as a qudit Clifford circuit.");
create_exception!(cvstab_py, OracleMismatch, PyRuntimeError, "A reference oracle disagrees with the tableau.");

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Parse { .. } | Error::Argument(_) => PyValueError::new_err(e.to_string()),
        Error::IndexOutOfRange { .. } => PyIndexError::new_err(e.to_string()),
        Error::NonCliffordGate { .. } | Error::NotAdmitted(_) | Error::MethodTwoInputViolation { .. } => {
            CircuitRejected::new_err(e.to_string())
        }
        Error::OracleMismatch(_) => OracleMismatch::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn method(m: Option<&str>) -> PyResult<Option<Method>> {
    match m {
        None => Ok(None),
        Some("one") => Ok(Some(Method::One)),
        Some("two") => Ok(Some(Method::Two)),
        Some(other) => Err(PyValueError::new_err(format!("method must be 'one' or 'two', not {:?}", other))),
    }
}

/// Stabilizer state of n qudits of dimension d.
#[pyclass(name = "Tableau", module = "cvstab_py", skip_from_py_object)]
#[derive(Clone)]
struct PyTableau(cvstab::Tableau);

#[pymethods]
impl PyTableau {
    /// All-zero computational basis state.
    #[staticmethod]
    fn zero(n: usize, d: u64) -> PyResult<Self> {
        cvstab::Tableau::new_zero_state(n, d).map(PyTableau).map_err(py_err)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        cvstab::Tableau::from_text(text).map(PyTableau).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn d(&self) -> u64 {
        self.0.d()
    }

    fn fourier(&mut self, k: usize) -> PyResult<()> {
        self.0.apply_fourier(k).map_err(py_err)
    }

    fn fourier_inv(&mut self, k: usize) -> PyResult<()> {
        self.0.apply_fourier_inv(k).map_err(py_err)
    }

    fn phase(&mut self, k: usize) -> PyResult<()> {
        self.0.apply_phase_gate(k).map_err(py_err)
    }

    fn sum(&mut self, control: usize, target: usize) -> PyResult<()> {
        self.0.apply_sum(control, target).map_err(py_err)
    }

    fn cz(&mut self, a: usize, b: usize) -> PyResult<()> {
        self.0.apply_cz(a, b).map_err(py_err)
    }

    /// `X^x Z^z` on qudit k.
    fn pauli(&mut self, k: usize, x: i64, z: i64) -> PyResult<()> {
        self.0.apply_local_pauli(k, x, z).map_err(py_err)
    }

    /// `(offset, stride)` of the outcomes a Z measurement of qudit k can give.
    fn z_support(&self, k: usize) -> PyResult<(u64, u64)> {
        self.0.z_support(k).map(|s| (s.offset, s.stride)).map_err(py_err)
    }

    /// Samples a Z measurement; returns the outcome and its probability as "n/d".
    #[pyo3(signature = (k, seed = 0))]
    fn measure_z(&mut self, k: usize, seed: u64) -> PyResult<(u64, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = self.0.measure_z(k, &mut rng).map_err(py_err)?;
        Ok((r.outcome, r.probability.to_string()))
    }

    fn measure_z_forced(&mut self, k: usize, outcome: u64) -> PyResult<String> {
        self.0.measure_z_forced(k, outcome).map(|r| r.probability.to_string()).map_err(py_err)
    }

    fn states_equal(&self, other: &PyTableau) -> PyResult<bool> {
        self.0.states_equal(&other.0).map_err(py_err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    fn __repr__(&self) -> String {
        format!("Tableau(n={}, d={})", self.0.n(), self.0.d())
    }
}

/// A parsed circuit compiled to a qudit Clifford program.
#[pyclass(name = "Compiled", module = "cvstab_py")]
struct PyCompiled(pipeline::Compiled);

#[pymethods]
impl PyCompiled {
    #[getter]
    fn d2(&self) -> u64 {
        self.0.plan.d2()
    }

    #[getter]
    fn instructions(&self) -> usize {
        self.0.program.len()
    }

    #[getter]
    fn initial(&self) -> PyTableau {
        PyTableau(self.0.initial.clone())
    }

    /// `cvstab-report/1` JSON including the compiled program.
    fn report(&self) -> String {
        let mut r = Report::new("compile", &self.0);
        r.program = Some(self.0.program.clone());
        r.to_json()
    }

    /// Every outcome tuple with its exact probability ("n/d") and logical value.
    #[pyo3(signature = (max_branches = DEFAULT_MAX_BRANCHES))]
    fn run_strong(&self, max_branches: usize) -> PyResult<Vec<(Vec<u64>, String, Vec<Option<u64>>)>> {
        let s = pipeline::run_strong(&self.0, max_branches).map_err(py_err)?;
        Ok(s.outcomes.into_iter().map(|o| (o.outcomes, o.probability.to_string(), o.logical)).collect())
    }

    /// `(outcomes, count)` pairs over `shots` seeded shots, and the number of aborted shots.
    #[pyo3(signature = (shots, seed = 0, model_postselection = false))]
    fn run_weak(&self, shots: usize, seed: u64, model_postselection: bool) -> PyResult<(Vec<(Vec<u64>, usize)>, usize)> {
        let w = pipeline::run_weak(&self.0, shots, seed, model_postselection).map_err(py_err)?;
        Ok((w.counts.into_iter().map(|c| (c.outcomes, c.count)).collect(), w.aborted))
    }

    /// Compares with the dense and grid or Fock oracles; returns the JSON
    /// report and raises `OracleMismatch` if a comparison fails.
    #[pyo3(signature = (delta = 0.15, envelope = None, alpha = 6.0, n_max = None))]
    fn verify(&self, delta: f64, envelope: Option<f64>, alpha: f64, n_max: Option<usize>) -> PyResult<String> {
        let opts = VerifyOptions { delta, delta_env: envelope.unwrap_or(delta), n_max, fallback_alpha: alpha, ..VerifyOptions::default() };
        let v = pipeline::verify(&self.0, &opts).map_err(py_err)?;
        let passed = v.passed;
        let mut r = Report::new("verify", &self.0);
        r.verify = Some(v);
        let json = r.to_json();
        if !passed {
            return Err(OracleMismatch::new_err(json));
        }
        Ok(json)
    }
}

/// Parses and compiles circuit text; `method` forces the RSB embedding ("one" or "two").
#[pyfunction]
#[pyo3(signature = (text, method = None))]
fn compile(text: &str, method: Option<&str>) -> PyResult<PyCompiled> {
    let m = self::method(method)?;
    pipeline::compile_text(text, m).map(PyCompiled).map_err(py_err)
}

/// Encoded basis state `|j>` of a d1-level code inside d2 = d1 a^2.
#[pyfunction]
fn encode_basis_state(d1: u64, a: u64, j: u64) -> PyResult<PyTableau> {
    let p = EmbeddingParams::new(d1, a).map_err(py_err)?;
    encode(p, j).map(PyTableau).map_err(py_err)
}

/// Negativity of the input codeword on `mode`: `(min W, negative volume, log negativity)`.
#[pyfunction]
#[pyo3(signature = (text, mode = 0, delta = 0.2, envelope = None))]
fn wigner_negativity(text: &str, mode: usize, delta: f64, envelope: Option<f64>) -> PyResult<(f64, f64, f64)> {
    let c = parse_circuit(text).map_err(py_err)?;
    let psi = input_wavefunction(&c, mode, delta, envelope.unwrap_or(delta)).map_err(py_err)?;
    let g = wigner_of_wavefunction(&psi).map_err(py_err)?;
    let r = negativity(&g).map_err(py_err)?;
    Ok((r.min_value, r.negative_volume, r.log_negativity))
}

#[pymodule]
fn cvstab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTableau>()?;
    m.add_class::<PyCompiled>()?;
    m.add_function(wrap_pyfunction!(compile, m)?)?;
    m.add_function(wrap_pyfunction!(encode_basis_state, m)?)?;
    m.add_function(wrap_pyfunction!(wigner_negativity, m)?)?;
    m.add("CircuitRejected", m.py().get_type::<CircuitRejected>())?;
    m.add("OracleMismatch", m.py().get_type::<OracleMismatch>())?;
    Ok(())
}
