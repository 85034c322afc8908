//! Monte Carlo engine for the received power at the typical SN.
//!
//! Each trial draws PBs and SNs from independent PPPs, lets every PB pick its
//! beams from the SNs actually present in its charging region, and sums the
//! power reaching the SN at the origin. Unlike the closed forms, the SN
//! sharing between overlapping charging regions is kept exact.
//!
//! With [`WindowRadius::Auto`] the PB window `R` is set so that PBs beyond it
//! carry at most `tail_epsilon` of the mean power. Inside `R` only the inner
//! disk, out to where PB fluctuations fall below `tail_epsilon` of the
//! omnidirectional standard deviation, is simulated point by point. The
//! remaining annulus adds its exact mean.

mod beam;
mod export;
mod grid;
pub mod rng;
mod sampling;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::{ScenarioParams, ValidationErrors};

pub use beam::{pb_beam_state, sector_of, Allocation};
pub use export::{summary_json, write_samples_csv, write_summary_json};
pub use sampling::{
    auto_window_radius, fluctuation_radius, sample_disk_ppp, shell_mean_power, NetworkSample,
};

use beam::{beam_gains_into, sector_index};
use grid::BucketGrid;
use rng::{trial_stream, Substream};

/// Planar coordinates in metres.
pub type Point = [f64; 2];

#[derive(Debug, Error)]
pub enum McError {
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("empirical statistics need at least one sample")]
    EmptySamples,
    #[error(transparent)]
    Invalid(#[from] ValidationErrors),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// PB sampling window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum WindowRadius {
    #[default]
    Auto,
    /// Exact sampling of every PB within this radius, in metres.
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub trials: usize,
    pub master_seed: u64,
    pub window_radius: WindowRadius,
    pub allocation: Allocation,
    pub tail_epsilon: f64,
    /// Worker threads; `None` uses the global pool. Results do not depend on it.
    pub workers: Option<usize>,
    /// CCDF evaluation points in watts; empty means the scenario threshold.
    pub ccdf_thresholds: Vec<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            trials: 20_000,
            master_seed: 0,
            window_radius: WindowRadius::Auto,
            allocation: Allocation::Uniform,
            tail_epsilon: 1e-3,
            workers: None,
            ccdf_thresholds: Vec::new(),
        }
    }
}

impl SimConfig {
    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_allocation(mut self, allocation: Allocation) -> Self {
        self.allocation = allocation;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn with_thresholds(mut self, thresholds: Vec<f64>) -> Self {
        self.ccdf_thresholds = thresholds;
        self
    }

    fn check(&self) -> Result<(), McError> {
        if self.trials == 0 {
            return Err(McError::Config("trials must be at least 1".into()));
        }
        if !(self.tail_epsilon > 0.0 && self.tail_epsilon < 1.0) {
            return Err(McError::Config(format!(
                "tail_epsilon must lie in (0, 1), got {}",
                self.tail_epsilon
            )));
        }
        if self.workers == Some(0) {
            return Err(McError::Config("workers must be at least 1".into()));
        }
        if let WindowRadius::Fixed(r) = self.window_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(McError::Config(format!("window radius must be positive, got {r}")));
            }
        }
        Ok(())
    }
}

/// Exactly simulated PB window and the mean added for PBs beyond it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowPlan {
    pub exact_radius: f64,
    pub outer_radius: f64,
    pub shell_mean_w: f64,
}

pub fn window_plan(params: &ScenarioParams, config: &SimConfig) -> Result<WindowPlan, McError> {
    let rho = params.charging_radius;
    match config.window_radius {
        WindowRadius::Fixed(r) => {
            if r < rho {
                return Err(McError::Config(format!(
                    "window radius {r} m is smaller than the charging radius {rho} m"
                )));
            }
            Ok(WindowPlan {
                exact_radius: r,
                outer_radius: r,
                shell_mean_w: 0.0,
            })
        }
        WindowRadius::Auto => {
            let eps = config.tail_epsilon;
            let outer = auto_window_radius(params, eps).max(rho);
            let exact = fluctuation_radius(params, eps).max(rho).max(1.0).min(outer);
            Ok(WindowPlan {
                exact_radius: exact,
                outer_radius: outer,
                shell_mean_w: shell_mean_power(params, exact, outer),
            })
        }
    }
}

/// Power in watts reaching the SN at the origin from the PBs of `sample`.
/// The origin SN counts toward the sector occupancy of every PB within the
/// charging radius. `tie_rng` breaks Greedy ties.
pub fn received_power_origin<R: rand::Rng + ?Sized>(
    sample: &NetworkSample,
    params: &ScenarioParams,
    scheme: Allocation,
    tie_rng: &mut R,
) -> f64 {
    let n = params.sectors;
    let rho = params.charging_radius;
    let alpha = params.path_loss_exp;
    let cell = rho.max(2.0 * sample.sn_window_radius / 512.0);
    let grid = (scheme != Allocation::ForcedOmni)
        .then(|| BucketGrid::new(&sample.sn_points, sample.sn_window_radius, cell));
    let mut counts = vec![0u32; n as usize];
    let mut gains = vec![0.0; n as usize];
    let mut total = 0.0;
    for (pb, &orientation) in sample.pb_points.iter().zip(&sample.pb_orientations) {
        let dist = pb[0].hypot(pb[1]);
        let gain = match &grid {
            None => 1.0,
            Some(grid) => {
                if dist == 0.0 {
                    // Direction to the origin is undefined; treat as omnidirectional.
                    1.0
                } else {
                    counts.fill(0);
                    grid.for_each_within(pb, rho, |sn| {
                        let dx = sn[0] - pb[0];
                        let dy = sn[1] - pb[1];
                        if dx != 0.0 || dy != 0.0 {
                            counts[sector_index(dx, dy, orientation, n)] += 1;
                        }
                    });
                    beam_gains_into(&counts, scheme, tie_rng, &mut gains);
                    gains[sector_index(-pb[0], -pb[1], orientation, n)]
                }
            }
        };
        if gain > 0.0 {
            total += gain * dist.max(1.0).powf(-alpha);
        }
    }
    params.pb_power * params.attenuation * total
}

/// Received power of a single trial, shell mean included.
pub fn simulate_trial(
    params: &ScenarioParams,
    config: &SimConfig,
    plan: &WindowPlan,
    trial_index: u64,
) -> Result<f64, McError> {
    let sample = NetworkSample::draw(params, plan.exact_radius, config.master_seed, trial_index)?;
    let mut tie_rng = trial_stream(config.master_seed, trial_index, Substream::TieBreak);
    Ok(received_power_origin(&sample, params, config.allocation, &mut tie_rng) + plan.shell_mean_w)
}

/// Outcome of a batch of trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    /// Received power of each trial, in trial order, W.
    pub samples: Vec<f64>,
    pub mean: f64,
    /// Unbiased sample variance, W².
    pub variance: f64,
    /// Half-width of the normal 95% interval of the mean, W.
    pub mean_ci95: f64,
    /// `(threshold W, Pr(P ≥ threshold))`.
    pub ccdf: Vec<(f64, f64)>,
}

impl TrialSummary {
    pub fn from_samples(samples: Vec<f64>, thresholds: &[f64]) -> Result<Self, McError> {
        let (mean, variance) = mean_variance(&samples)?;
        let ccdf = empirical_ccdf(&samples, thresholds)?;
        let mean_ci95 = 1.96 * (variance / samples.len() as f64).sqrt();
        Ok(Self {
            samples,
            mean,
            variance,
            mean_ci95,
            ccdf,
        })
    }

    pub fn std_error(&self) -> f64 {
        (self.variance / self.samples.len() as f64).sqrt()
    }

    /// Fraction of trials with power at least `threshold`.
    pub fn active_fraction(&self, threshold: f64) -> f64 {
        self.samples.iter().filter(|&&v| v >= threshold).count() as f64 / self.samples.len() as f64
    }
}

/// Sample mean and unbiased variance (zero for a single sample).
pub fn mean_variance(samples: &[f64]) -> Result<(f64, f64), McError> {
    if samples.is_empty() {
        return Err(McError::EmptySamples);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let variance = if samples.len() > 1 {
        samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok((mean, variance))
}

/// Fraction of `samples` at or above each threshold.
pub fn empirical_ccdf(samples: &[f64], thresholds: &[f64]) -> Result<Vec<(f64, f64)>, McError> {
    if samples.is_empty() {
        return Err(McError::EmptySamples);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(thresholds
        .iter()
        .map(|&t| {
            let below = sorted.partition_point(|&v| v < t);
            (t, (sorted.len() - below) as f64 / n)
        })
        .collect())
}

/// Runs `config.trials` independent trials. Samples are identical for any
/// worker count.
pub fn run_trials(params: &ScenarioParams, config: &SimConfig) -> Result<TrialSummary, McError> {
    let params = params.validate()?;
    config.check()?;
    let plan = window_plan(&params, config)?;
    let work = || {
        (0..config.trials as u64)
            .into_par_iter()
            .map(|i| simulate_trial(&params, config, &plan, i))
            .collect::<Result<Vec<f64>, McError>>()
    };
    let samples = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| McError::Config(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let thresholds = if config.ccdf_thresholds.is_empty() {
        vec![params.power_threshold]
    } else {
        config.ccdf_thresholds.clone()
    };
    TrialSummary::from_samples(samples, &thresholds)
}
