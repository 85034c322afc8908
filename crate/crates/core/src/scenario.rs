//! Scenario parameters shared by every other module.
//!
//! All quantities are SI: watts, metres, and per-square-metre densities. The
//! reference distance of the path-loss model is fixed at 1 m, so the
//! attenuation constant `attenuation` is the linear path gain at 1 m.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Reference distance of the non-singular path-loss model, in metres.
pub const REF_DISTANCE_M: f64 = 1.0;

/// Largest supported number of sectors per power beacon.
pub const MAX_SECTORS: u32 = 64;

/// Relative tolerance when both `attenuation` and `wavelength` are supplied.
pub const ATTENUATION_MATCH_RTOL: f64 = 1e-9;

/// Physical and network constants of one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// PB transmit power, W.
    pub pb_power: f64,
    /// PB density, per m².
    pub pb_density: f64,
    /// SN density, per m².
    pub sn_density: f64,
    /// Number of equal sectors of each charging region.
    pub sectors: u32,
    /// Charging radius, m.
    pub charging_radius: f64,
    /// Path-loss exponent; must exceed 2.
    pub path_loss_exp: f64,
    /// Linear attenuation at the reference distance.
    pub attenuation: f64,
    /// Operational power threshold of an SN, W.
    pub power_threshold: f64,
    /// Carrier wavelength, m, when the attenuation was derived from it.
    pub wavelength: Option<f64>,
}

impl Default for ScenarioParams {
    /// P_p = 5 W, λ_p = 0.1, λ_s = 0.2, N = 4, ρ = 2 m, α = 3, ν = 0.1 m,
    /// threshold 0.1 mW.
    fn default() -> Self {
        let wavelength = 0.1;
        Self {
            pb_power: 5.0,
            pb_density: 0.1,
            sn_density: 0.2,
            sectors: 4,
            charging_radius: 2.0,
            path_loss_exp: 3.0,
            attenuation: (wavelength / (4.0 * PI * REF_DISTANCE_M)).powi(2),
            power_threshold: 1e-4,
            wavelength: Some(wavelength),
        }
    }
}

impl ScenarioParams {
    pub fn with_charging_radius(mut self, rho: f64) -> Self {
        self.charging_radius = rho;
        self
    }

    pub fn with_pb_power(mut self, power: f64) -> Self {
        self.pb_power = power;
        self
    }

    pub fn with_sn_density(mut self, density: f64) -> Self {
        self.sn_density = density;
        self
    }

    pub fn with_pb_density(mut self, density: f64) -> Self {
        self.pb_density = density;
        self
    }

    pub fn with_sectors(mut self, sectors: u32) -> Self {
        self.sectors = sectors;
        self
    }

    pub fn with_power_threshold(mut self, threshold: f64) -> Self {
        self.power_threshold = threshold;
        self
    }

    /// Attenuation expressed in dB.
    pub fn attenuation_db(&self) -> f64 {
        10.0 * self.attenuation.log10()
    }

    pub fn validate(self) -> Result<Self, ValidationErrors> {
        validate(self)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid parameter: wavelength must be positive and finite (got {0})")]
    NonPositiveWavelength(f64),
}

/// Linear attenuation `(ν / 4π d₀)²` of free space at the reference distance.
pub fn sigma_from_wavelength(wavelength: f64) -> Result<f64, ScenarioError> {
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(ScenarioError::NonPositiveWavelength(wavelength));
    }
    Ok((wavelength / (4.0 * PI * REF_DISTANCE_M)).powi(2))
}

/// Free-space attenuation at the reference distance in dB, `20 log10(ν/4π d₀)`.
pub fn sigma_db_from_wavelength(wavelength: f64) -> Result<f64, ScenarioError> {
    Ok(10.0 * sigma_from_wavelength(wavelength)?.log10())
}

/// A single violated invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamViolation {
    #[error("mean diverges: path_loss_exp must exceed 2 (got {0})")]
    MeanDiverges(f64),
    #[error("invalid sector count: {0} (expected 1..={MAX_SECTORS})")]
    InvalidSectorCount(u32),
    #[error("{field} must be positive (got {value})")]
    NonPositive { field: &'static str, value: f64 },
    #[error("{field} must be nonnegative (got {value})")]
    Negative { field: &'static str, value: f64 },
    #[error("{field} is not finite")]
    NotFinite { field: &'static str },
    #[error("attenuation {given} disagrees with wavelength-derived value {derived}")]
    AttenuationMismatch { given: f64, derived: f64 },
}

/// Every invariant violated by a parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationErrors(pub Vec<ParamViolation>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msgs: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

impl std::error::Error for ValidationErrors {}

impl ValidationErrors {
    pub fn contains(&self, needle: &str) -> bool {
        self.0.iter().any(|v| v.to_string().contains(needle))
    }
}

/// Returns `params` unchanged iff every invariant holds.
pub fn validate(params: ScenarioParams) -> Result<ScenarioParams, ValidationErrors> {
    let mut errs = Vec::new();

    let positive = [
        ("pb_power", params.pb_power),
        ("pb_density", params.pb_density),
        ("sn_density", params.sn_density),
        ("charging_radius", params.charging_radius),
        ("attenuation", params.attenuation),
    ];
    for (field, value) in positive {
        if !value.is_finite() {
            errs.push(ParamViolation::NotFinite { field });
        } else if value <= 0.0 {
            errs.push(ParamViolation::NonPositive { field, value });
        }
    }

    if !params.path_loss_exp.is_finite() {
        errs.push(ParamViolation::NotFinite { field: "path_loss_exp" });
    } else if params.path_loss_exp <= 2.0 {
        errs.push(ParamViolation::MeanDiverges(params.path_loss_exp));
    }

    if params.sectors < 1 || params.sectors > MAX_SECTORS {
        errs.push(ParamViolation::InvalidSectorCount(params.sectors));
    }

    if !params.power_threshold.is_finite() {
        errs.push(ParamViolation::NotFinite { field: "power_threshold" });
    } else if params.power_threshold < 0.0 {
        errs.push(ParamViolation::Negative {
            field: "power_threshold",
            value: params.power_threshold,
        });
    }

    if let Some(w) = params.wavelength {
        match sigma_from_wavelength(w) {
            Ok(derived) => {
                if params.attenuation.is_finite()
                    && (params.attenuation - derived).abs() > ATTENUATION_MATCH_RTOL * derived
                {
                    errs.push(ParamViolation::AttenuationMismatch {
                        given: params.attenuation,
                        derived,
                    });
                }
            }
            Err(_) => errs.push(ParamViolation::NonPositive { field: "wavelength", value: w }),
        }
    }

    if errs.is_empty() {
        Ok(params)
    } else {
        Err(ValidationErrors(errs))
    }
}

/// Errors from the `key=value` scenario file format.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key=value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value `{value}` for `{key}`")]
    InvalidValue { line: usize, key: String, value: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("{0}")]
    Invalid(#[from] ValidationErrors),
}

/// Keys accepted by the scenario file, in canonical order.
pub const SCENARIO_KEYS: [&str; 9] = [
    "pb_power_w",
    "pb_density_per_m2",
    "sn_density_per_m2",
    "sectors",
    "charging_radius_m",
    "path_loss_exp",
    "wavelength_m",
    "sigma_linear",
    "power_threshold_w",
];

/// Partially specified scenario; unset fields fall back to
/// [`ScenarioParams::default`] on [`build`](Self::build).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioBuilder {
    pub pb_power: Option<f64>,
    pub pb_density: Option<f64>,
    pub sn_density: Option<f64>,
    pub sectors: Option<u32>,
    pub charging_radius: Option<f64>,
    pub path_loss_exp: Option<f64>,
    pub wavelength: Option<f64>,
    pub sigma: Option<f64>,
    pub power_threshold: Option<f64>,
}

impl ScenarioBuilder {
    pub fn is_scenario_key(key: &str) -> bool {
        SCENARIO_KEYS.contains(&key)
    }

    /// Sets one key. `line` is only used for error reporting.
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        let bad = || ConfigError::InvalidValue {
            line,
            key: key.to_string(),
            value: value.to_string(),
        };
        let real = || value.trim().parse::<f64>().map_err(|_| bad());
        match key {
            "pb_power_w" => self.pb_power = Some(real()?),
            "pb_density_per_m2" => self.pb_density = Some(real()?),
            "sn_density_per_m2" => self.sn_density = Some(real()?),
            "sectors" => self.sectors = Some(value.trim().parse::<u32>().map_err(|_| bad())?),
            "charging_radius_m" => self.charging_radius = Some(real()?),
            "path_loss_exp" => self.path_loss_exp = Some(real()?),
            "wavelength_m" => self.wavelength = Some(real()?),
            "sigma_linear" => self.sigma = Some(real()?),
            "power_threshold_w" => self.power_threshold = Some(real()?),
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Parses a `key=value` file body. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut builder = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line,
                    text: content.to_string(),
                });
            };
            let key = key.trim();
            if seen.iter().any(|k| k == key) {
                return Err(ConfigError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
            builder.set(key, value, line)?;
            seen.push(key.to_string());
        }
        Ok(builder)
    }

    /// Fills defaults, resolves the attenuation and validates.
    pub fn build(&self) -> Result<ScenarioParams, ConfigError> {
        self.build_on(&ScenarioParams::default())
    }

    /// Like [`build`](Self::build) with unset fields taken from `base`.
    pub fn build_on(&self, base: &ScenarioParams) -> Result<ScenarioParams, ConfigError> {
        let defaults = *base;
        let (attenuation, wavelength) = match (self.sigma, self.wavelength) {
            (Some(s), w) => (s, w),
            (None, Some(w)) => match sigma_from_wavelength(w) {
                Ok(s) => (s, Some(w)),
                Err(_) => {
                    return Err(ValidationErrors(vec![ParamViolation::NonPositive {
                        field: "wavelength",
                        value: w,
                    }])
                    .into())
                }
            },
            (None, None) => (defaults.attenuation, defaults.wavelength),
        };
        let params = ScenarioParams {
            pb_power: self.pb_power.unwrap_or(defaults.pb_power),
            pb_density: self.pb_density.unwrap_or(defaults.pb_density),
            sn_density: self.sn_density.unwrap_or(defaults.sn_density),
            sectors: self.sectors.unwrap_or(defaults.sectors),
            charging_radius: self.charging_radius.unwrap_or(defaults.charging_radius),
            path_loss_exp: self.path_loss_exp.unwrap_or(defaults.path_loss_exp),
            attenuation,
            power_threshold: self.power_threshold.unwrap_or(defaults.power_threshold),
            wavelength,
        };
        Ok(validate(params)?)
    }
}

/// Parses and validates a scenario file body.
pub fn parse_scenario(text: &str) -> Result<ScenarioParams, ConfigError> {
    ScenarioBuilder::parse(text)?.build()
}

/// Renders params in the `key=value` file format.
pub fn to_config_text(params: &ScenarioParams) -> String {
    let mut out = String::new();
    out.push_str(&format!("pb_power_w={}\n", params.pb_power));
    out.push_str(&format!("pb_density_per_m2={}\n", params.pb_density));
    out.push_str(&format!("sn_density_per_m2={}\n", params.sn_density));
    out.push_str(&format!("sectors={}\n", params.sectors));
    out.push_str(&format!("charging_radius_m={}\n", params.charging_radius));
    out.push_str(&format!("path_loss_exp={}\n", params.path_loss_exp));
    match params.wavelength {
        Some(w) => out.push_str(&format!("wavelength_m={w}\n")),
        None => out.push_str(&format!("sigma_linear={}\n", params.attenuation)),
    }
    out.push_str(&format!("power_threshold_w={}\n", params.power_threshold));
    out
}
