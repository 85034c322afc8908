//! Network realizations and window sizing.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::rng::{trial_stream, Substream};
use super::{McError, Point};
use crate::scenario::ScenarioParams;

/// Homogeneous PPP of `density` restricted to the disk of `radius` about the
/// origin.
pub fn sample_disk_ppp<R: Rng + ?Sized>(
    density: f64,
    radius: f64,
    rng: &mut R,
) -> Result<Vec<Point>, McError> {
    if !(density >= 0.0 && density.is_finite()) {
        return Err(McError::Domain {
            what: "density must be nonnegative",
            value: density,
        });
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(McError::Domain {
            what: "window radius must be positive",
            value: radius,
        });
    }
    let mean = density * PI * radius * radius;
    if mean == 0.0 {
        return Ok(Vec::new());
    }
    let count = Poisson::new(mean)
        .map_err(|_| McError::Domain {
            what: "expected point count out of range",
            value: mean,
        })?
        .sample(rng) as usize;
    Ok((0..count)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            let (s, c) = (TAU * rng.random::<f64>()).sin_cos();
            [r * c, r * s]
        })
        .collect())
}

/// One realization of the PB and SN processes around the typical SN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSample {
    pub pb_points: Vec<Point>,
    /// SN positions; index 0 is the typical SN at the origin.
    pub sn_points: Vec<Point>,
    /// Rotation of sector 0 of each PB, in `[0, 2π/N)`.
    pub pb_orientations: Vec<f64>,
    pub pb_window_radius: f64,
    pub sn_window_radius: f64,
}

impl NetworkSample {
    /// Draws trial `trial_index` of the stream family keyed by `master_seed`.
    /// The SN window exceeds the PB window by the charging radius.
    pub fn draw(
        params: &ScenarioParams,
        pb_window_radius: f64,
        master_seed: u64,
        trial_index: u64,
    ) -> Result<Self, McError> {
        let sn_window_radius = pb_window_radius + params.charging_radius;
        let mut pb_rng = trial_stream(master_seed, trial_index, Substream::PbPoints);
        let pb_points = sample_disk_ppp(params.pb_density, pb_window_radius, &mut pb_rng)?;
        let mut sn_rng = trial_stream(master_seed, trial_index, Substream::SnPoints);
        let mut sn_points = vec![[0.0, 0.0]];
        sn_points.extend(sample_disk_ppp(params.sn_density, sn_window_radius, &mut sn_rng)?);
        let width = TAU / params.sectors as f64;
        let mut or_rng = trial_stream(master_seed, trial_index, Substream::Orientations);
        let pb_orientations = pb_points
            .iter()
            .map(|_| (width * or_rng.random::<f64>()).min(width * (1.0 - f64::EPSILON)))
            .collect();
        Ok(Self {
            pb_points,
            sn_points,
            pb_orientations,
            pb_window_radius,
            sn_window_radius,
        })
    }
}

/// Radius `R` at which the mean power of omnidirectional PBs beyond `R` is
/// `tail_epsilon` times the total omnidirectional mean.
pub fn auto_window_radius(params: &ScenarioParams, tail_epsilon: f64) -> f64 {
    let a = params.path_loss_exp;
    (2.0 / (tail_epsilon * a)).powf(1.0 / (a - 2.0))
}

/// Radius beyond which PBs contribute less than `tail_epsilon` times the
/// omnidirectional standard deviation, so that they can be replaced by their
/// mean.
pub fn fluctuation_radius(params: &ScenarioParams, tail_epsilon: f64) -> f64 {
    let a = params.path_loss_exp;
    (a * tail_epsilon * tail_epsilon).powf(-1.0 / (2.0 * a - 2.0))
}

/// Mean power at the origin from PBs in the annulus `(inner, outer]`, for
/// `inner ≥ 1`. Every allocation has unit expected gain towards a point
/// outside the charging region, so this holds for all schemes.
pub fn shell_mean_power(params: &ScenarioParams, inner: f64, outer: f64) -> f64 {
    if outer <= inner {
        return 0.0;
    }
    let a = params.path_loss_exp;
    2.0 * PI * params.pb_density * params.pb_power * params.attenuation
        * (inner.powf(2.0 - a) - outer.powf(2.0 - a))
        / (a - 2.0)
}
