//! Python bindings for the `sgqpt` simulator.
//!
//! Unitaries cross the boundary as a `Unitary` class; parameters, waveplate
//! angles and statistics as plain tuples, lists and dicts. Every stochastic
//! function takes an explicit integer seed.

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sgqpt::harness::{self, ExperimentConfig, FitWindow, Preset};
use sgqpt::measurement::{NoiseModel, ShotBudget};
use sgqpt::spsa::{GainSchedule, RecordSpacing};
use sgqpt::su2::{self as core, Su2Params, Unitary2, WaveplateTriple};
use sgqpt::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn noise(epsilon_deg: Option<f64>) -> PyResult<NoiseModel> {
    match epsilon_deg {
        None => Ok(NoiseModel::Ideal),
        Some(eps) => NoiseModel::jitter(eps).map_err(to_py),
    }
}

/// A 2x2 unitary matrix.
#[pyclass(name = "Unitary", frozen, from_py_object)]
#[derive(Clone)]
struct PyUnitary(Unitary2);

#[pymethods]
impl PyUnitary {
    /// Builds a unitary from nested rows; raises ValueError if not unitary.
    #[new]
    fn new(rows: [[Complex64; 2]; 2]) -> PyResult<Self> {
        Unitary2::new(rows).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn identity() -> Self {
        Self(Unitary2::identity())
    }

    #[staticmethod]
    fn pauli(axis: &str) -> PyResult<Self> {
        match axis {
            "x" => Ok(Self(Unitary2::pauli_x())),
            "y" => Ok(Self(Unitary2::pauli_y())),
            "z" => Ok(Self(Unitary2::pauli_z())),
            _ => Err(PyValueError::new_err(format!("unknown Pauli axis {axis:?}"))),
        }
    }

    fn to_list(&self) -> [[Complex64; 2]; 2] {
        *self.0.entries()
    }

    fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    fn det(&self) -> Complex64 {
        self.0.det()
    }

    fn __matmul__(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    fn __repr__(&self) -> String {
        format!("Unitary({:?})", self.0.entries())
    }
}

/// `exp(i alpha n . sigma)` with axis `n` at polar angle theta and azimuth phi.
#[pyfunction]
fn su2_from_params(alpha: f64, theta: f64, phi: f64) -> PyResult<PyUnitary> {
    core::su2_from_params(Su2Params::new(alpha, theta, phi))
        .map(PyUnitary)
        .map_err(to_py)
}

/// `|tr(V^dagger U)|^2 / 4`.
#[pyfunction]
fn process_fidelity(u: &PyUnitary, v: &PyUnitary) -> PyResult<f64> {
    core::process_fidelity(&u.0, &v.0).map_err(to_py)
}

#[pyfunction]
fn infidelity(u: &PyUnitary, v: &PyUnitary) -> PyResult<f64> {
    core::infidelity(&u.0, &v.0).map_err(to_py)
}

#[pyfunction]
fn haar_random_su2(seed: u64) -> PyUnitary {
    PyUnitary(core::haar_random_su2(&mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Quarter-, half-, quarter-wave plate sequence at the given angles in degrees.
#[pyfunction]
fn waveplate_compose(q1: f64, h: f64, q2: f64) -> PyUnitary {
    PyUnitary(core::waveplate_compose(WaveplateTriple::new(q1, h, q2)))
}

/// Plate angles `(q1, h, q2)` in degrees realizing `u` up to global phase.
#[pyfunction]
fn decompose_to_waveplates(u: &PyUnitary) -> PyResult<(f64, f64, f64)> {
    let w = core::decompose_to_waveplates(&u.0).map_err(to_py)?;
    Ok((w.q1, w.h, w.q2))
}

/// 3x3 rotation of the Bloch sphere induced by `u`.
#[pyfunction]
fn bloch_rotation(u: &PyUnitary) -> [[f64; 3]; 3] {
    let r = core::bloch_rotation(&u.0);
    std::array::from_fn(|i| std::array::from_fn(|j| r[(i, j)]))
}

/// Runs the learner against `target` and returns per-iteration infidelities.
///
/// Gains default to the noiseless preset.
#[pyfunction]
#[pyo3(signature = (target, iterations, shots, seed, gamma=None, alpha_exp=None, epsilon_deg=None, init=None))]
#[allow(clippy::too_many_arguments)]
fn run_learning<'py>(
    py: Python<'py>,
    target: &PyUnitary,
    iterations: u64,
    shots: u64,
    seed: u64,
    gamma: Option<f64>,
    alpha_exp: Option<f64>,
    epsilon_deg: Option<f64>,
    init: Option<(f64, f64, f64)>,
) -> PyResult<Bound<'py, PyDict>> {
    let base = GainSchedule::noiseless_preset();
    let schedule = GainSchedule::with_exponents(gamma.unwrap_or(base.gamma), alpha_exp.unwrap_or(base.alpha_exp))
        .map_err(to_py)?;
    let shots = ShotBudget::new(shots).map_err(to_py)?;
    let noise = noise(epsilon_deg)?;
    let init = init.map_or_else(Su2Params::default_initial, |(a, t, p)| Su2Params::new(a, t, p));
    let target = target.0;
    let trace = py
        .detach(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            sgqpt::spsa::run_learning(&target, init, &schedule, iterations, shots, &noise, &mut rng)
        })
        .map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item(
        "infidelity",
        trace.records.iter().map(|r| r.infidelity).collect::<Vec<_>>(),
    )?;
    out.set_item("shots", trace.records.iter().map(|r| r.shots).collect::<Vec<_>>())?;
    out.set_item("final_params", trace.final_params.to_array())?;
    Ok(out)
}

/// Infidelity of one standard-tomography reconstruction of `target`.
#[pyfunction]
#[pyo3(signature = (target, photons, seed, epsilon_deg=None))]
fn qpt_trial(target: &PyUnitary, photons: u64, seed: u64, epsilon_deg: Option<f64>) -> PyResult<f64> {
    let noise = noise(epsilon_deg)?;
    sgqpt::qpt::qpt_trial(&target.0, photons, &noise, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(to_py)
}

/// TOML text of a named preset, suitable for editing and passing to `run_ensemble`.
#[pyfunction]
fn preset_config(name: &str) -> PyResult<String> {
    let preset = match name {
        "noiseless-scaling" => Preset::NoiselessScaling,
        "jitter-scaling" => Preset::JitterScaling,
        "short-run" => Preset::ShortRun,
        _ => return Err(PyValueError::new_err(format!("unknown preset {name:?}"))),
    };
    ExperimentConfig::preset(preset).to_toml_string().map_err(to_py)
}

/// Runs an ensemble described by TOML and returns its statistics as columns.
#[pyfunction]
#[pyo3(signature = (config, log_per_decade=None))]
fn run_ensemble<'py>(py: Python<'py>, config: &str, log_per_decade: Option<u32>) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = ExperimentConfig::from_toml_str(config).map_err(to_py)?;
    if let Some(per_decade) = log_per_decade {
        cfg.spacing = RecordSpacing::Log { per_decade };
    }
    let output = py.detach(|| harness::run_ensemble(&cfg)).map_err(to_py)?;
    let rows = &output.stats.rows;
    let out = PyDict::new(py);
    out.set_item("iteration", rows.iter().map(|r| r.iteration).collect::<Vec<_>>())?;
    out.set_item("median", rows.iter().map(|r| r.median).collect::<Vec<_>>())?;
    out.set_item("q25", rows.iter().map(|r| r.q25).collect::<Vec<_>>())?;
    out.set_item("q75", rows.iter().map(|r| r.q75).collect::<Vec<_>>())?;
    out.set_item("trial_seeds", output.trials.iter().map(|t| t.seed).collect::<Vec<_>>())?;
    Ok(out)
}

/// Least-squares fit of `median ~ c k^beta`; returns `(c, beta)`.
#[pyfunction]
#[pyo3(signature = (iterations, medians, k_min=None, k_max=None))]
fn fit_power_law(
    iterations: Vec<u64>,
    medians: Vec<f64>,
    k_min: Option<u64>,
    k_max: Option<u64>,
) -> PyResult<(f64, f64)> {
    if iterations.len() != medians.len() {
        return Err(PyValueError::new_err("iterations and medians differ in length"));
    }
    let last = iterations.iter().copied().max().unwrap_or(0);
    let d = FitWindow::default_for(last);
    let stats = harness::EnsembleStats {
        rows: iterations
            .into_iter()
            .zip(medians)
            .map(|(iteration, median)| harness::StatsRow {
                iteration,
                median,
                q25: median,
                q75: median,
            })
            .collect(),
    };
    let fit = harness::fit_power_law(
        &stats,
        FitWindow::new(k_min.unwrap_or(d.k_min), k_max.unwrap_or(d.k_max)),
    )
    .map_err(to_py)?;
    Ok((fit.c, fit.beta))
}

#[pymodule]
fn sgqpt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyUnitary>()?;
    m.add_function(wrap_pyfunction!(su2_from_params, m)?)?;
    m.add_function(wrap_pyfunction!(process_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(infidelity, m)?)?;
    m.add_function(wrap_pyfunction!(haar_random_su2, m)?)?;
    m.add_function(wrap_pyfunction!(waveplate_compose, m)?)?;
    m.add_function(wrap_pyfunction!(decompose_to_waveplates, m)?)?;
    m.add_function(wrap_pyfunction!(bloch_rotation, m)?)?;
    m.add_function(wrap_pyfunction!(run_learning, m)?)?;
    m.add_function(wrap_pyfunction!(qpt_trial, m)?)?;
    m.add_function(wrap_pyfunction!(preset_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_ensemble, m)?)?;
    m.add_function(wrap_pyfunction!(fit_power_law, m)?)?;
    Ok(())
}
