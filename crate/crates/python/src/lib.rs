//! Python bindings: `import adwpt_py`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use adwpt::mcsim::{Allocation, SimConfig};
use adwpt::radopt::RadiusOptimum;
use adwpt::{analytic, mcsim, radopt, scenario};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Scenario parameters (SI units).
#[pyclass(name = "Scenario", module = "adwpt_py", from_py_object)]
#[derive(Clone)]
struct PyScenario {
    inner: scenario::ScenarioParams,
}

#[pymethods]
impl PyScenario {
    #[new]
    #[pyo3(signature = (
        pb_power_w=5.0,
        pb_density_per_m2=0.1,
        sn_density_per_m2=0.2,
        sectors=4,
        charging_radius_m=2.0,
        path_loss_exp=3.0,
        wavelength_m=0.1,
        power_threshold_w=1e-4,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        pb_power_w: f64,
        pb_density_per_m2: f64,
        sn_density_per_m2: f64,
        sectors: u32,
        charging_radius_m: f64,
        path_loss_exp: f64,
        wavelength_m: f64,
        power_threshold_w: f64,
    ) -> PyResult<Self> {
        let params = scenario::ScenarioParams {
            pb_power: pb_power_w,
            pb_density: pb_density_per_m2,
            sn_density: sn_density_per_m2,
            sectors,
            charging_radius: charging_radius_m,
            path_loss_exp,
            attenuation: scenario::sigma_from_wavelength(wavelength_m).map_err(value_err)?,
            power_threshold: power_threshold_w,
            wavelength: Some(wavelength_m),
        };
        Ok(Self {
            inner: params.validate().map_err(value_err)?,
        })
    }

    /// Parses a `key=value` scenario file body.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        scenario::parse_scenario(text)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    fn with_charging_radius(&self, rho: f64) -> PyResult<Self> {
        let inner = self.inner.with_charging_radius(rho).validate().map_err(value_err)?;
        Ok(Self { inner })
    }

    fn with_pb_power(&self, power: f64) -> PyResult<Self> {
        let inner = self.inner.with_pb_power(power).validate().map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn pb_power_w(&self) -> f64 {
        self.inner.pb_power
    }

    #[getter]
    fn charging_radius_m(&self) -> f64 {
        self.inner.charging_radius
    }

    #[getter]
    fn sectors(&self) -> u32 {
        self.inner.sectors
    }

    #[getter]
    fn attenuation(&self) -> f64 {
        self.inner.attenuation
    }

    fn to_config_text(&self) -> String {
        scenario::to_config_text(&self.inner)
    }

    fn mean_power(&self) -> f64 {
        analytic::mean_power(&self.inner)
    }

    fn mean_power_omni(&self) -> f64 {
        analytic::mean_power_omni(&self.inner)
    }

    fn variance_power(&self) -> f64 {
        analytic::variance_power(&self.inner)
    }

    fn variance_omni(&self) -> f64 {
        analytic::variance_omni(&self.inner)
    }

    fn laplace_total(&self, s: f64) -> PyResult<f64> {
        analytic::laplace_total(s, &self.inner).map_err(value_err)
    }

    fn laplace_omni(&self, s: f64) -> PyResult<f64> {
        analytic::laplace_omni(s, &self.inner).map_err(value_err)
    }

    /// `(shape, scale)` of the moment-matched Gamma distribution.
    fn gamma_approx(&self) -> PyResult<(f64, f64)> {
        let g = analytic::gamma_approx(&self.inner).map_err(value_err)?;
        Ok((g.shape, g.scale))
    }

    #[pyo3(signature = (threshold_w=None))]
    fn gamma_ccdf(&self, threshold_w: Option<f64>) -> PyResult<f64> {
        let t = threshold_w.unwrap_or(self.inner.power_threshold);
        analytic::gamma_ccdf(t, &self.inner).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "Scenario(pb_power_w={}, pb_density_per_m2={}, sn_density_per_m2={}, sectors={}, charging_radius_m={}, path_loss_exp={})",
            p.pb_power, p.pb_density, p.sn_density, p.sectors, p.charging_radius, p.path_loss_exp
        )
    }
}

/// Result of a radius optimization.
#[pyclass(name = "RadiusOptimum", module = "adwpt_py", get_all)]
struct PyRadiusOptimum {
    radius: f64,
    objective: f64,
    case_label: String,
    derivative_residual: f64,
    evaluations: usize,
}

impl From<RadiusOptimum> for PyRadiusOptimum {
    fn from(o: RadiusOptimum) -> Self {
        let case_label = match o.case_label {
            radopt::CaseLabel::Mean(m) => format!("{m:?}"),
            radopt::CaseLabel::Active(a) => format!("{a:?}"),
        };
        Self {
            radius: o.radius,
            objective: o.objective,
            case_label,
            derivative_residual: o.derivative_residual,
            evaluations: o.evaluations,
        }
    }
}

#[pymethods]
impl PyRadiusOptimum {
    fn __repr__(&self) -> String {
        format!(
            "RadiusOptimum(radius={}, objective={}, case_label='{}')",
            self.radius, self.objective, self.case_label
        )
    }
}

#[pyfunction]
fn optimal_radius_mean(scenario: &PyScenario) -> PyResult<PyRadiusOptimum> {
    radopt::optimal_radius_mean(&scenario.inner)
        .map(Into::into)
        .map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (scenario, threshold_w=None))]
fn optimal_radius_active(scenario: &PyScenario, threshold_w: Option<f64>) -> PyResult<PyRadiusOptimum> {
    let t = threshold_w.unwrap_or(scenario.inner.power_threshold);
    radopt::optimal_radius_active(&scenario.inner, t)
        .map(Into::into)
        .map_err(value_err)
}

/// Runs Monte Carlo trials and returns the per-trial received power in watts.
#[pyfunction]
#[pyo3(signature = (scenario, trials=20_000, seed=0, allocation="uniform"))]
fn simulate(py: Python<'_>, scenario: &PyScenario, trials: usize, seed: u64, allocation: &str) -> PyResult<Vec<f64>> {
    let allocation: Allocation = allocation.parse().map_err(PyValueError::new_err)?;
    let config = SimConfig::default()
        .with_trials(trials)
        .with_seed(seed)
        .with_allocation(allocation);
    let params = scenario.inner;
    let summary = py
        .detach(|| mcsim::run_trials(&params, &config))
        .map_err(value_err)?;
    Ok(summary.samples)
}

#[pymodule]
fn adwpt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyRadiusOptimum>()?;
    m.add_function(wrap_pyfunction!(optimal_radius_mean, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_radius_active, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
