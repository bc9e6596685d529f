use num_bigint::BigUint;
use num_rational::BigRational;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList, PyString};

use riffle_core::asymptotics::{self, Regime};
use riffle_core::distances::{self, ClosedForm};
use riffle_core::experiments::{self, parse_theta_exact, parse_theta_float, Command, RunConfig};
use riffle_core::perm::{self, Permutation};
use riffle_core::report::Format;
use riffle_core::shuffle::{self, BiasVector, Direction};
use riffle_core::{Backend, Caps, Error};

create_exception!(
    riffle,
    CapacityError,
    PyException,
    "A configured size cap was exceeded."
);
create_exception!(
    riffle,
    DivergenceError,
    PyException,
    "A series does not converge for these parameters."
);
create_exception!(
    riffle,
    ValidityError,
    PyException,
    "Parameters outside a formula's range of validity."
);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(m) => PyValueError::new_err(m),
        e @ Error::Capacity { .. } => CapacityError::new_err(e.to_string()),
        Error::Divergence(m) => DivergenceError::new_err(m),
        Error::Validity(m) => ValidityError::new_err(m),
    }
}

/// θ may be a number, a string such as "7/20", a `fractions.Fraction`, or a
/// sequence of those giving the whole bias vector.
fn theta_spec(theta: &Bound<'_, PyAny>) -> PyResult<String> {
    if theta.is_instance_of::<PyString>() {
        return theta.extract();
    }
    if let Ok(items) = theta.try_iter() {
        let parts: PyResult<Vec<String>> = items.map(|x| Ok(x?.str()?.to_string())).collect();
        return Ok(parts?.join(","));
    }
    Ok(theta.str()?.to_string())
}

fn exact_theta(theta: &Bound<'_, PyAny>) -> PyResult<BiasVector<BigRational>> {
    parse_theta_exact(&theta_spec(theta)?).map_err(to_py)
}

fn float_theta(theta: &Bound<'_, PyAny>) -> PyResult<BiasVector<f64>> {
    parse_theta_float(&theta_spec(theta)?).map_err(to_py)
}

fn rational(py: Python<'_>, r: BigRational) -> PyResult<Py<PyAny>> {
    Ok(r.into_pyobject(py)?.into_any().unbind())
}

fn float(py: Python<'_>, v: f64) -> PyResult<Py<PyAny>> {
    Ok(v.into_pyobject(py)?.into_any().unbind())
}

#[pyclass(name = "Permutation", eq, frozen, from_py_object, module = "riffle")]
#[derive(Clone, PartialEq)]
struct PyPermutation(Permutation);

#[pymethods]
impl PyPermutation {
    #[new]
    fn new(word: Vec<usize>) -> PyResult<Self> {
        Permutation::new(word).map(PyPermutation).map_err(to_py)
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        PyPermutation(Permutation::identity(n))
    }

    #[staticmethod]
    fn reversal(n: usize) -> Self {
        PyPermutation(Permutation::reversal(n))
    }

    #[getter]
    fn word(&self) -> Vec<usize> {
        self.0.word().to_vec()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn inverse(&self) -> Self {
        PyPermutation(self.0.inverse())
    }

    /// `self ∘ other`.
    fn compose(&self, other: &PyPermutation) -> PyResult<Self> {
        self.0.compose(&other.0).map(PyPermutation).map_err(to_py)
    }

    fn descent_set(&self) -> Vec<usize> {
        self.0.descent_set().elements().to_vec()
    }

    fn ides(&self) -> Vec<usize> {
        self.0.ides().elements().to_vec()
    }

    fn cycle_type(&self) -> Vec<usize> {
        self.0.cycle_type().partition().parts().to_vec()
    }

    fn sign(&self) -> i8 {
        self.0.sign()
    }

    fn lyndon_factors(&self) -> PyResult<Vec<Vec<usize>>> {
        lyndon_factorization(self.0.word().to_vec())
    }

    fn __len__(&self) -> usize {
        self.0.n()
    }

    fn __repr__(&self) -> String {
        format!("Permutation({:?})", self.0.word())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

#[pyfunction]
fn lyndon_factorization(word: Vec<usize>) -> PyResult<Vec<Vec<usize>>> {
    perm::lyndon_factorization(&word)
        .map(|f| f.factors().to_vec())
        .map_err(to_py)
}

/// `P_θ^{*k}(w)`; a `Fraction` when `exact`.
#[pyfunction]
#[pyo3(signature = (word, theta, k=1, exact=false))]
fn exact_prob(
    py: Python<'_>,
    word: Vec<usize>,
    theta: &Bound<'_, PyAny>,
    k: u32,
    exact: bool,
) -> PyResult<Py<PyAny>> {
    let w = Permutation::new(word).map_err(to_py)?;
    let caps = Caps::default();
    if exact {
        let tk = shuffle::convolve_power(&exact_theta(theta)?, k, &caps).map_err(to_py)?;
        rational(py, shuffle::exact_prob(&w, &tk))
    } else {
        let tk = shuffle::convolve_power(&float_theta(theta)?, k, &caps).map_err(to_py)?;
        float(py, shuffle::exact_prob(&w, &tk))
    }
}

/// The whole law as `[(word, probability), ...]` in lexicographic order.
#[pyfunction]
#[pyo3(signature = (n, theta, k=1, exact=false))]
fn exact_law(
    py: Python<'_>,
    n: usize,
    theta: &Bound<'_, PyAny>,
    k: u32,
    exact: bool,
) -> PyResult<Py<PyList>> {
    let caps = Caps::default();
    let out = PyList::empty(py);
    if exact {
        let tk = shuffle::convolve_power(&exact_theta(theta)?, k, &caps).map_err(to_py)?;
        let law = shuffle::exact_law(n, &tk, &caps).map_err(to_py)?;
        for (w, p) in law.iter() {
            out.append((w.word().to_vec(), rational(py, p.clone())?))?;
        }
    } else {
        let tk = shuffle::convolve_power(&float_theta(theta)?, k, &caps).map_err(to_py)?;
        let law = shuffle::exact_law(n, &tk, &caps).map_err(to_py)?;
        for (w, p) in law.iter() {
            out.append((w.word().to_vec(), *p))?;
        }
    }
    Ok(out.unbind())
}

fn closed<S: ClosedForm>(
    n: usize,
    theta: BiasVector<S>,
    k: u32,
    which: fn(usize, &BiasVector<S>, u32, &Caps) -> riffle_core::Result<S>,
) -> PyResult<S> {
    which(n, &theta, k, &Caps::default()).map_err(to_py)
}

/// Separation distance after `k` shuffles, from the cycle-type closed form.
#[pyfunction]
#[pyo3(signature = (n, theta, k, exact=false))]
fn separation(
    py: Python<'_>,
    n: usize,
    theta: &Bound<'_, PyAny>,
    k: u32,
    exact: bool,
) -> PyResult<Py<PyAny>> {
    if exact {
        let th = exact_theta(theta)?;
        let v = py.detach(|| closed(n, th, k, distances::sep_partition))?;
        rational(py, v)
    } else {
        let th = float_theta(theta)?;
        float(py, py.detach(|| closed(n, th, k, distances::sep_partition))?)
    }
}

/// ℓ∞ distance `max_w |n!·P(w) - 1|` after `k` shuffles.
#[pyfunction]
#[pyo3(signature = (n, theta, k, exact=false))]
fn linf(py: Python<'_>, n: usize, theta: &Bound<'_, PyAny>, k: u32, exact: bool) -> PyResult<Py<PyAny>> {
    if exact {
        let th = exact_theta(theta)?;
        let v = py.detach(|| closed(n, th, k, distances::linf_partition))?;
        rational(py, v)
    } else {
        let th = float_theta(theta)?;
        float(py, py.detach(|| closed(n, th, k, distances::linf_partition))?)
    }
}

/// Total variation to uniform, by enumerating `S_n`.
#[pyfunction]
#[pyo3(signature = (n, theta, k, exact=false))]
fn total_variation(
    py: Python<'_>,
    n: usize,
    theta: &Bound<'_, PyAny>,
    k: u32,
    exact: bool,
) -> PyResult<Py<PyAny>> {
    if exact {
        let th = exact_theta(theta)?;
        let v = py.detach(|| closed(n, th, k, distances::tv_enum))?;
        rational(py, v)
    } else {
        let th = float_theta(theta)?;
        float(py, py.detach(|| closed(n, th, k, distances::tv_enum))?)
    }
}

#[pyfunction]
#[pyo3(signature = (n, theta, k, exact=false))]
fn birthday_bound(
    py: Python<'_>,
    n: usize,
    theta: &Bound<'_, PyAny>,
    k: u32,
    exact: bool,
) -> PyResult<Py<PyAny>> {
    if exact {
        rational(py, distances::birthday_bound(n, &exact_theta(theta)?, k))
    } else {
        float(py, distances::birthday_bound(n, &float_theta(theta)?, k))
    }
}

/// `[(shape, eigenvalue, multiplicity), ...]`, one entry per partition of `n`.
#[pyfunction]
#[pyo3(signature = (n, theta, exact=false))]
fn spectrum(py: Python<'_>, n: usize, theta: &Bound<'_, PyAny>, exact: bool) -> PyResult<Py<PyList>> {
    let caps = Caps::default();
    let out = PyList::empty(py);
    let push = |shape: Vec<usize>, eig: Py<PyAny>, mult: BigUint| out.append((shape, eig, mult));
    if exact {
        for e in distances::spectrum(n, &exact_theta(theta)?, &caps).map_err(to_py)? {
            push(
                e.shape.parts().to_vec(),
                rational(py, e.eigenvalue)?,
                e.multiplicity,
            )?;
        }
    } else {
        for e in distances::spectrum(n, &float_theta(theta)?, &caps).map_err(to_py)? {
            push(e.shape.parts().to_vec(), float(py, e.eigenvalue)?, e.multiplicity)?;
        }
    }
    Ok(out.unbind())
}

/// One draw from `P_θ^{*k}` as a one-line word.
#[pyfunction]
#[pyo3(signature = (n, theta, k=1, seed=0, sampler="forward"))]
fn sample(n: usize, theta: &Bound<'_, PyAny>, k: u32, seed: u64, sampler: &str) -> PyResult<PyPermutation> {
    let s = shuffle::DigitSampler::new(&float_theta(theta)?);
    let mut rng = shuffle::stream_rng(seed, 0);
    let w = match sampler.parse::<Direction>().map_err(to_py)? {
        Direction::Forward => shuffle::forward_sample_k(n, &s, k, &mut rng),
        Direction::Inverse => shuffle::inverse_sample_k(n, &s, k, &mut rng),
    };
    Ok(PyPermutation(w))
}

/// Monte Carlo tail of the strong stationary time.
#[pyfunction]
#[pyo3(signature = (n, theta, k_max, trials, seed))]
fn sst_tail<'py>(
    py: Python<'py>,
    n: usize,
    theta: &Bound<'py, PyAny>,
    k_max: u32,
    trials: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let th = float_theta(theta)?;
    let t = py
        .detach(|| distances::sst_tail_mc(n, &th, k_max, trials, seed))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("tail", t.tail)?;
    d.set_item("stderr", t.stderr)?;
    d.set_item("censored", t.censored)?;
    d.set_item("trials", t.trials)?;
    Ok(d)
}

#[pyfunction]
fn big_m(n: usize, theta: f64, k: f64) -> PyResult<f64> {
    asymptotics::big_m(n, theta, k, asymptotics::DEFAULT_SERIES_TOL)
        .map(|s| s.m)
        .map_err(to_py)
}

#[pyfunction]
fn ell_approx<'py>(py: Python<'py>, n: usize, theta: f64, k: f64) -> PyResult<Bound<'py, PyDict>> {
    let e = asymptotics::ell_approx(n, theta, k).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("M", e.m)?;
    d.set_item("ell_approx", e.ell_approx)?;
    d.set_item("threshold", e.threshold)?;
    d.set_item("valid", e.valid)?;
    d.set_item("error_scale", e.error_scale())?;
    d.set_item("last_j", e.last_j)?;
    d.set_item("tail_bound", e.tail_bound)?;
    Ok(d)
}

#[pyfunction]
fn cutoff_k(n: usize, theta: f64, c: f64) -> PyResult<i64> {
    asymptotics::cutoff_k(n, theta, c).map_err(to_py)
}

/// Limits for regime "fixed", "kappa" (needs `kappa`) or "extreme".
#[pyfunction]
#[pyo3(signature = (regime, c, kappa=None))]
fn regime_prediction<'py>(
    py: Python<'py>,
    regime: &str,
    c: f64,
    kappa: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let r = match (regime, kappa) {
        ("fixed", _) => Regime::Fixed { c },
        ("kappa", Some(kappa)) => Regime::Kappa { kappa, c },
        ("kappa", None) => return Err(PyValueError::new_err("kappa regime needs kappa=")),
        ("extreme", _) => Regime::Extreme { c },
        (other, _) => return Err(PyValueError::new_err(format!("unknown regime `{other}`"))),
    };
    let p = asymptotics::regime_prediction(r).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("ell", p.ell)?;
    d.set_item("linf", p.linf)?;
    d.set_item("sep", p.sep)?;
    Ok(d)
}

/// Runs a command exactly as the `riffle` binary would and returns the
/// rendered CSV or JSON text.
#[pyfunction]
#[pyo3(signature = (command, n=0, theta="1/2", k=None, c=None, trials=None, seed=None, backend="float", sampler="forward", format="csv"))]
#[allow(clippy::too_many_arguments)]
fn run(
    py: Python<'_>,
    command: &str,
    n: usize,
    theta: &str,
    k: Option<Vec<u32>>,
    c: Option<Vec<f64>>,
    trials: Option<u64>,
    seed: Option<u64>,
    backend: &str,
    sampler: &str,
    format: &str,
) -> PyResult<String> {
    let cfg = RunConfig {
        n,
        theta: theta.to_string(),
        k: k.unwrap_or_default(),
        c: c.unwrap_or_default(),
        trials,
        seed,
        backend: backend.parse::<Backend>().map_err(PyValueError::new_err)?,
        sampler: sampler.parse().map_err(to_py)?,
        format: format.parse::<Format>().map_err(PyValueError::new_err)?,
        ..RunConfig::new(command.parse::<Command>().map_err(to_py)?)
    };
    let table = py.detach(|| experiments::run(&cfg)).map_err(to_py)?;
    Ok(table.render(cfg.format))
}

#[pymodule]
fn riffle(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("CapacityError", m.py().get_type::<CapacityError>())?;
    m.add("DivergenceError", m.py().get_type::<DivergenceError>())?;
    m.add("ValidityError", m.py().get_type::<ValidityError>())?;
    m.add_class::<PyPermutation>()?;
    m.add_function(wrap_pyfunction!(lyndon_factorization, m)?)?;
    m.add_function(wrap_pyfunction!(exact_prob, m)?)?;
    m.add_function(wrap_pyfunction!(exact_law, m)?)?;
    m.add_function(wrap_pyfunction!(separation, m)?)?;
    m.add_function(wrap_pyfunction!(linf, m)?)?;
    m.add_function(wrap_pyfunction!(total_variation, m)?)?;
    m.add_function(wrap_pyfunction!(birthday_bound, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(sst_tail, m)?)?;
    m.add_function(wrap_pyfunction!(big_m, m)?)?;
    m.add_function(wrap_pyfunction!(ell_approx, m)?)?;
    m.add_function(wrap_pyfunction!(cutoff_k, m)?)?;
    m.add_function(wrap_pyfunction!(regime_prediction, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
