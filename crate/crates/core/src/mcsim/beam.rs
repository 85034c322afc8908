//! Sector geometry and per-PB beam allocation.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{McError, Point};

/// How a PB splits its power among the sectors of its charging region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Allocation {
    /// Equal power to every occupied sector.
    #[default]
    Uniform,
    /// All power to the most populated sector.
    Greedy,
    /// Power proportional to each sector's SN count.
    Robust,
    /// Omnidirectional regardless of occupancy.
    ForcedOmni,
}

impl Allocation {
    pub const ALL: [Allocation; 4] = [
        Allocation::Uniform,
        Allocation::Greedy,
        Allocation::Robust,
        Allocation::ForcedOmni,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Allocation::Uniform => "uniform",
            Allocation::Greedy => "greedy",
            Allocation::Robust => "robust",
            Allocation::ForcedOmni => "omni",
        }
    }
}

impl std::str::FromStr for Allocation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(Allocation::Uniform),
            "greedy" => Ok(Allocation::Greedy),
            "robust" => Ok(Allocation::Robust),
            "omni" | "forcedomni" | "forced_omni" => Ok(Allocation::ForcedOmni),
            other => Err(format!("unknown allocation '{other}'")),
        }
    }
}

#[inline]
pub(crate) fn sector_index(dx: f64, dy: f64, orientation: f64, n: u32) -> usize {
    let angle = (dy.atan2(dx) - orientation).rem_euclid(TAU);
    let k = (angle / (TAU / n as f64)) as usize;
    k.min(n as usize - 1)
}

/// Sector of the charging region of `pb` that contains `target`.
/// Sector `k` covers angles `[k·2π/N, (k+1)·2π/N)` measured from `orientation`.
pub fn sector_of(pb: Point, target: Point, orientation: f64, n: u32) -> Result<u32, McError> {
    if n == 0 {
        return Err(McError::Domain {
            what: "sector count must be positive",
            value: 0.0,
        });
    }
    let dx = target[0] - pb[0];
    let dy = target[1] - pb[1];
    if dx == 0.0 && dy == 0.0 {
        return Err(McError::Domain {
            what: "target coincides with the PB",
            value: 0.0,
        });
    }
    Ok(sector_index(dx, dy, orientation, n) as u32)
}

/// Writes the intensity gain of each sector into `gains`.
pub(crate) fn beam_gains_into<R: Rng + ?Sized>(
    counts: &[u32],
    scheme: Allocation,
    rng: &mut R,
    gains: &mut [f64],
) {
    let n = counts.len() as f64;
    let active = counts.iter().filter(|&&c| c > 0).count();
    if active == 0 || scheme == Allocation::ForcedOmni {
        gains.fill(1.0);
        return;
    }
    match scheme {
        Allocation::Uniform => {
            let g = n / active as f64;
            for (g_k, &c) in gains.iter_mut().zip(counts) {
                *g_k = if c > 0 { g } else { 0.0 };
            }
        }
        Allocation::Greedy => {
            let max = *counts.iter().max().unwrap_or(&0);
            let ties = counts.iter().filter(|&&c| c == max).count();
            let mut pick = if ties > 1 { rng.random_range(0..ties) } else { 0 };
            gains.fill(0.0);
            for (g_k, &c) in gains.iter_mut().zip(counts) {
                if c == max {
                    if pick == 0 {
                        *g_k = n;
                        break;
                    }
                    pick -= 1;
                }
            }
        }
        Allocation::Robust => {
            let total: u32 = counts.iter().sum();
            for (g_k, &c) in gains.iter_mut().zip(counts) {
                *g_k = n * c as f64 / total as f64;
            }
        }
        Allocation::ForcedOmni => unreachable!(),
    }
}

/// Per-sector intensity gains of a PB whose charging region holds `counts`
/// SNs per sector. Greedy ties are broken uniformly at random using `rng`.
pub fn pb_beam_state<R: Rng + ?Sized>(counts: &[u32], scheme: Allocation, rng: &mut R) -> Vec<f64> {
    let mut gains = vec![0.0; counts.len()];
    beam_gains_into(counts, scheme, rng, &mut gains);
    gains
}
