//! Experiment harness: figure data, scheme comparison, configuration loading
//! and the invariant suite behind the command-line tool.

mod figures;
mod invariants;
mod schemes;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analytic::AnalyticError;
use crate::mcsim::{Allocation, McError, SimConfig, WindowRadius};
use crate::radopt::RadOptError;
use crate::scenario::{ConfigError, ScenarioBuilder, ScenarioParams};

pub use figures::{figure_defaults, fig2_thresholds, FigureDefaults};
pub use invariants::{validate_invariants, InvariantCheck};
pub use schemes::{compare_schemes, OrderingVerdict, SchemeReport, SchemeRow};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sim(#[from] McError),
    #[error(transparent)]
    Opt(#[from] RadOptError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl BenchError {
    /// True for malformed input as opposed to well-formed but invalid values.
    pub fn is_usage(&self) -> bool {
        match self {
            BenchError::Usage(_) => true,
            BenchError::Config(ConfigError::Invalid(_)) => false,
            BenchError::Config(_) => true,
            BenchError::Sim(McError::Config(_)) => true,
            _ => false,
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
        FigureId::Fig8,
    ];

    pub fn number(&self) -> u8 {
        *self as u8 + 2
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fig{}", self.number())
    }
}

impl FromStr for FigureId {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let digits = lower.strip_prefix("fig").unwrap_or(&lower);
        let n: u8 = digits
            .parse()
            .map_err(|_| BenchError::Usage(format!("unknown figure id `{s}`")))?;
        FigureId::ALL
            .into_iter()
            .find(|f| f.number() == n)
            .ok_or_else(|| BenchError::Usage(format!("unknown figure id `{s}`")))
    }
}

/// One figure run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub figure_id: FigureId,
    /// `key=value` overrides applied on top of the figure defaults.
    pub overrides: Vec<String>,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Trials per simulated point; `None` keeps the figure default.
    pub trials: Option<usize>,
    /// Worker threads; does not affect the output.
    pub workers: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(figure_id: FigureId, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            figure_id,
            overrides: Vec::new(),
            output_dir: output_dir.into(),
            seed: 0,
            trials: None,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestFile {
    pub name: String,
    pub sha256: String,
}

/// Record of one figure run, written as `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub figure: String,
    pub seed: u64,
    pub trials: usize,
    pub overrides: Vec<String>,
    pub params: ScenarioParams,
    pub input_hash: String,
    pub files: Vec<ManifestFile>,
    pub versions: Vec<(String, String)>,
}

/// Keys accepted by `--set` in addition to the scenario keys.
pub const SIM_KEYS: [&str; 6] = [
    "trials",
    "seed",
    "allocation",
    "tail_epsilon",
    "window_radius_m",
    "workers",
];

fn split_override(raw: &str) -> Result<(&str, &str), BenchError> {
    raw.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| BenchError::Usage(format!("expected key=value, got `{raw}`")))
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, BenchError> {
    value
        .parse()
        .map_err(|_| BenchError::Usage(format!("invalid value `{value}` for `{key}`")))
}

fn apply_sim_override(config: &mut SimConfig, key: &str, value: &str) -> Result<(), BenchError> {
    match key {
        "trials" => config.trials = parse_value(key, value)?,
        "seed" => config.master_seed = parse_value(key, value)?,
        "allocation" => {
            config.allocation = Allocation::from_str(value).map_err(BenchError::Usage)?
        }
        "tail_epsilon" => config.tail_epsilon = parse_value(key, value)?,
        "window_radius_m" => {
            config.window_radius = if value.eq_ignore_ascii_case("auto") {
                WindowRadius::Auto
            } else {
                WindowRadius::Fixed(parse_value(key, value)?)
            }
        }
        "workers" => config.workers = Some(parse_value(key, value)?),
        _ => return Err(BenchError::Usage(format!("unknown key `{key}`"))),
    }
    Ok(())
}

/// Applies scenario and simulation overrides on top of `base`.
pub fn apply_overrides(
    base: &ScenarioParams,
    config: &mut SimConfig,
    overrides: &[String],
) -> Result<ScenarioParams, BenchError> {
    let mut builder = ScenarioBuilder::default();
    for raw in overrides {
        let (key, value) = split_override(raw)?;
        if ScenarioBuilder::is_scenario_key(key) {
            builder.set(key, value, 0)?;
        } else {
            apply_sim_override(config, key, value)?;
        }
    }
    Ok(builder.build_on(base)?)
}

/// Reads an optional scenario file and applies `overrides` after it.
pub fn load_config(
    path: Option<&Path>,
    overrides: &[String],
) -> Result<(ScenarioParams, SimConfig), BenchError> {
    let base = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| BenchError::io(p, e))?;
            ScenarioBuilder::parse(&text)?.build()?
        }
        None => ScenarioParams::default(),
    };
    let mut config = SimConfig::default();
    let params = apply_overrides(&base, &mut config, overrides)?;
    Ok((params, config))
}

/// Lowercase hex of a SHA-256 digest.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Git-style object hash: the digest of `blob <len>\0<content>`.
pub fn content_hash(content: &[u8]) -> String {
    let mut data = format!("blob {}\0", content.len()).into_bytes();
    data.extend_from_slice(content);
    sha256_hex(&data)
}

/// Formats a CSV number: plain decimals in the common range, exponents
/// otherwise. Output is identical across runs and platforms.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-3..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// One CSV file: a header naming units plus numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub file_name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Curve {
    pub fn new(file_name: impl Into<String>, header: &[&'static str]) -> Self {
        Self {
            file_name: file_name.into(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Computes the curves of a figure, writes them with `manifest.json` and
/// returns the manifest.
pub fn run_figure(spec: &ExperimentSpec) -> Result<Manifest, BenchError> {
    let defaults = figure_defaults(spec.figure_id);
    let mut config = SimConfig::default()
        .with_trials(spec.trials.unwrap_or(defaults.trials))
        .with_seed(spec.seed);
    config.workers = spec.workers;
    let params = apply_overrides(&defaults.base, &mut config, &spec.overrides)?;
    if config.trials == 0 {
        return Err(BenchError::Usage("trials must be at least 1".into()));
    }
    let curves = figures::compute(spec.figure_id, &params, &config)?;

    let dir = &spec.output_dir;
    fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    let mut files = Vec::with_capacity(curves.len());
    for curve in &curves {
        let path = dir.join(&curve.file_name);
        let body = curve.to_csv();
        fs::write(&path, &body).map_err(|e| BenchError::io(&path, e))?;
        files.push(ManifestFile {
            name: curve.file_name.clone(),
            sha256: sha256_hex(body.as_bytes()),
        });
    }
    let inputs = serde_json::json!({
        "figure": spec.figure_id.to_string(),
        "seed": config.master_seed,
        "trials": config.trials,
        "allocation": config.allocation.name(),
        "tail_epsilon": config.tail_epsilon,
        "params": params,
    });
    let manifest = Manifest {
        figure: spec.figure_id.to_string(),
        seed: config.master_seed,
        trials: config.trials,
        overrides: spec.overrides.clone(),
        params,
        input_hash: content_hash(inputs.to_string().as_bytes()),
        files,
        versions: vec![("adwpt".into(), env!("CARGO_PKG_VERSION").into())],
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|e| BenchError::io(&path, e))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_ids_parse() {
        assert_eq!("fig2".parse::<FigureId>().unwrap(), FigureId::Fig2);
        assert_eq!("Fig8".parse::<FigureId>().unwrap(), FigureId::Fig8);
        assert_eq!("5".parse::<FigureId>().unwrap(), FigureId::Fig5);
        assert!("fig9".parse::<FigureId>().is_err());
        assert!("plot".parse::<FigureId>().is_err());
        assert_eq!(FigureId::Fig4.to_string(), "Fig4");
    }

    #[test]
    fn overrides_apply_after_base() {
        let mut config = SimConfig::default();
        let base = ScenarioParams::default().with_pb_power(10.0);
        let p = apply_overrides(
            &base,
            &mut config,
            &["sn_density_per_m2=0.8".into(), "allocation=greedy".into(), "trials=7".into()],
        )
        .unwrap();
        assert_eq!(p.pb_power, 10.0);
        assert_eq!(p.sn_density, 0.8);
        assert_eq!(config.allocation, Allocation::Greedy);
        assert_eq!(config.trials, 7);
        let err = apply_overrides(&base, &mut config, &["bogus=1".into()]).unwrap_err();
        assert!(err.is_usage() && err.to_string().contains("bogus"));
        let err = apply_overrides(&base, &mut config, &["sectors=0".into()]).unwrap_err();
        assert!(!err.is_usage());
        assert!(apply_overrides(&base, &mut config, &["novalue".into()]).unwrap_err().is_usage());
    }

    #[test]
    fn load_config_minimal_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.cfg");
        fs::write(&path, "pb_density_per_m2=0.2\nsn_density_per_m2=0.4\n").unwrap();
        let (p, c) = load_config(Some(&path), &["pb_power_w=2".into()]).unwrap();
        assert_eq!(p.pb_density, 0.2);
        assert_eq!(p.sn_density, 0.4);
        assert_eq!(p.pb_power, 2.0);
        assert_eq!(p.sectors, ScenarioParams::default().sectors);
        assert_eq!(c, SimConfig::default());

        fs::write(&path, "sigma_linear=1e-4\nwavelength_m=0.1\n").unwrap();
        assert!(load_config(Some(&path), &[]).is_err());
        fs::write(&path, "colour=blue\n").unwrap();
        let err = load_config(Some(&path), &[]).unwrap_err();
        assert!(err.to_string().contains("colour"));
        fs::write(&path, "pb_power_w\n").unwrap();
        assert!(load_config(Some(&path), &[]).unwrap_err().to_string().contains("line 1"));
        assert!(load_config(Some(&dir.path().join("missing")), &[]).is_err());
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(fmt_num(0.05), "0.05");
        assert_eq!(fmt_num(1.5e-4), "1.5e-4");
        assert_eq!(fmt_num(-3.25), "-3.25");
    }

    #[test]
    fn content_hash_is_git_style() {
        let h = content_hash(b"abc");
        assert_eq!(h, sha256_hex(b"blob 3\0abc"));
        assert_eq!(h.len(), 64);
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
