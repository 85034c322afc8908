//! Optimal charging radius for mean power and for the Gamma-approximated
//! active probability.

use std::cell::Cell;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{self, AnalyticError, BranchTag};
use crate::scenario::{ScenarioParams, ValidationErrors};

/// Relative tolerance for "the mean derivative vanishes at ρ = 1".
pub const UNIT_RADIUS_ZERO_TOL: f64 = 1e-8;

/// `|bracket(1)|` below which the mean optimum is labelled medium density.
pub const MEDIUM_DENSITY_BAND: f64 = 1e-2;

/// Number of log-spaced probes of the active-probability scan.
pub const ACTIVE_GRID_POINTS: usize = 400;

/// Smallest probed radius of the active-probability scan, m.
pub const ACTIVE_GRID_MIN: f64 = 1e-3;

/// Smallest gain over the omnidirectional active probability that counts as
/// an interior optimum.
pub const ACTIVE_MATERIALITY: f64 = 1e-3;

/// Derivative magnitudes below this are treated as zero when scanning for
/// sign changes, 1/m.
pub const ACTIVE_DERIVATIVE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadOptError {
    #[error("no sign change on [{a}, {b}] (f = {fa}, {fb})")]
    Bracket { a: f64, b: f64, fa: f64, fb: f64 },
    #[error("classification failed: {0}")]
    Classification(String),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Invalid(#[from] ValidationErrors),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeanRegime {
    LowDensity,
    MediumDensity,
    HighDensity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActiveCase {
    /// The first stationary point is an interior maximum.
    Case1,
    /// A minimum followed by an interior maximum.
    Case2,
    /// No interior maximum beats omnidirectional WPT materially.
    Case3Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    Mean(MeanRegime),
    Active(ActiveCase),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusOptimum {
    /// Metres.
    pub radius: f64,
    /// Watts for the mean objective, probability for the active one.
    pub objective: f64,
    pub case_label: CaseLabel,
    /// Derivative of the objective at `radius`: the dimensionless bracket
    /// for the mean, per metre for the active probability.
    pub derivative_residual: f64,
    pub evaluations: usize,
}

impl RadiusOptimum {
    pub fn is_boundary(&self) -> bool {
        self.case_label == CaseLabel::Active(ActiveCase::Case3Boundary)
    }
}

/// Bisection on `[a, b]` until the bracket is narrower than `tol`.
pub fn find_root_bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    bracket: (f64, f64),
    tol: f64,
) -> Result<f64, RadOptError> {
    let (mut a, mut b) = bracket;
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(RadOptError::Bracket { a, b, fa, fb });
    }
    while (b - a).abs() > tol {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}

/// Radius maximizing the mean received power.
pub fn optimal_radius_mean(params: &ScenarioParams) -> Result<RadiusOptimum, RadOptError> {
    let params = params.validate()?;
    let evals = Cell::new(0usize);
    let bracket = |rho: f64, branch: BranchTag| {
        evals.set(evals.get() + 1);
        analytic::mean_derivative_bracket_branch(&params.with_charging_radius(rho), branch)
    };
    let at_one = bracket(1.0, BranchTag::RhoAtMostOne);
    let regime = if at_one > MEDIUM_DENSITY_BAND {
        MeanRegime::LowDensity
    } else if at_one < -MEDIUM_DENSITY_BAND {
        MeanRegime::HighDensity
    } else {
        MeanRegime::MediumDensity
    };
    let tol = 1e-13;
    let radius = if at_one.abs() <= UNIT_RADIUS_ZERO_TOL {
        1.0
    } else if at_one < 0.0 {
        find_root_bisect(|r| bracket(r, BranchTag::RhoAtMostOne), (1e-6, 1.0), tol)?
    } else {
        let mut hi = 2.0;
        while bracket(hi, BranchTag::RhoAboveOne) > 0.0 {
            hi *= 2.0;
            if hi > 1e3 {
                return Err(RadOptError::Classification(
                    "mean derivative still positive at 1e3 m".into(),
                ));
            }
        }
        find_root_bisect(|r| bracket(r, BranchTag::RhoAboveOne), (1.0, hi), tol)?
    };
    let at = params.with_charging_radius(radius);
    Ok(RadiusOptimum {
        radius,
        objective: analytic::mean_power(&at),
        case_label: CaseLabel::Mean(regime),
        derivative_residual: analytic::mean_derivative_bracket(&at),
        evaluations: evals.get() + 1,
    })
}

fn ccdf_at(params: &ScenarioParams, rho: f64, threshold: f64) -> Result<f64, AnalyticError> {
    analytic::gamma_ccdf(threshold, &params.with_charging_radius(rho))
}

/// `∂F̃/∂ρ` by a Richardson-extrapolated central difference, per metre.
pub fn d_gamma_ccdf_d_rho(params: &ScenarioParams, threshold: f64) -> Result<f64, RadOptError> {
    let rho = params.charging_radius;
    let h = 1e-5 * rho.max(1.0);
    if rho <= h {
        return Err(RadOptError::Classification(format!(
            "radius {rho} too close to zero for a central difference"
        )));
    }
    let central = |h: f64| -> Result<f64, RadOptError> {
        Ok((ccdf_at(params, rho + h, threshold)? - ccdf_at(params, rho - h, threshold)?) / (2.0 * h))
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Upper end of the active-probability scan, where `p < 1e-8`.
pub fn active_grid_max(params: &ScenarioParams) -> f64 {
    (params.sectors as f64 * 1e8f64.ln() / (params.sn_density * std::f64::consts::PI)).sqrt()
}

/// The log-spaced radii probed by [`optimal_radius_active`].
pub fn active_grid(params: &ScenarioParams) -> Vec<f64> {
    log_grid(ACTIVE_GRID_MIN, active_grid_max(params), ACTIVE_GRID_POINTS)
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Stationary {
    radius: f64,
    is_max: bool,
}

fn sign(d: f64) -> i8 {
    if d > ACTIVE_DERIVATIVE_FLOOR {
        1
    } else if d < -ACTIVE_DERIVATIVE_FLOOR {
        -1
    } else {
        0
    }
}

/// Radius maximizing the Gamma-approximated probability that the received
/// power reaches `threshold`.
pub fn optimal_radius_active(
    params: &ScenarioParams,
    threshold: f64,
) -> Result<RadiusOptimum, RadOptError> {
    let params = params.validate()?;
    if !(threshold > 0.0) {
        return Err(AnalyticError::Domain {
            what: "threshold must be positive",
            value: threshold,
        }
        .into());
    }
    let evals = Cell::new(0usize);
    let deriv = |rho: f64| -> Result<f64, RadOptError> {
        evals.set(evals.get() + 4);
        d_gamma_ccdf_d_rho(&params.with_charging_radius(rho), threshold)
    };
    let grid = active_grid(&params);
    let mut probes = Vec::with_capacity(grid.len());
    for &r in &grid {
        probes.push((r, sign(deriv(r)?)));
    }
    // Pair consecutive nonzero signs; a flip marks a stationary point.
    let signed: Vec<(f64, i8)> = probes.into_iter().filter(|&(_, s)| s != 0).collect();
    let mut stationary = Vec::new();
    for w in signed.windows(2) {
        let ((a, sa), (b, sb)) = (w[0], w[1]);
        if sa == sb {
            continue;
        }
        // Refine ×10 between the probes, then bisect every flip found there.
        let fine = log_grid(a, b, 11);
        let mut last = (a, sa);
        for &r in &fine[1..] {
            let s = if r == b { sb } else { sign(deriv(r)?) };
            if s == 0 {
                continue;
            }
            if s != last.1 {
                let lo = last.0;
                let d_lo = deriv(lo)?;
                let root = find_root_bisect(
                    |x| {
                        if x == lo {
                            d_lo
                        } else {
                            deriv(x).unwrap_or(f64::NAN)
                        }
                    },
                    (lo, r),
                    1e-10 * r,
                )?;
                stationary.push(Stationary {
                    radius: root,
                    is_max: last.1 > 0,
                });
            }
            last = (r, s);
        }
    }
    if stationary.len() > 2 {
        return Err(RadOptError::Classification(format!(
            "{} stationary points found; at most two expected",
            stationary.len()
        )));
    }
    let omni = analytic::gamma_ccdf_omni(threshold, &params)?;
    let value = |rho: f64| -> Result<f64, RadOptError> {
        evals.set(evals.get() + 1);
        Ok(ccdf_at(&params, rho, threshold)?)
    };
    let interior = match stationary.as_slice() {
        [first, ..] if first.is_max => Some((*first, ActiveCase::Case1)),
        [first, second] if !first.is_max && second.is_max => Some((*second, ActiveCase::Case2)),
        _ => None,
    };
    if let Some((point, case)) = interior {
        let objective = value(point.radius)?;
        if objective >= omni + ACTIVE_MATERIALITY {
            return Ok(RadiusOptimum {
                radius: point.radius,
                objective,
                case_label: CaseLabel::Active(case),
                derivative_residual: deriv(point.radius)?,
                evaluations: evals.get(),
            });
        }
    }
    let radius = *grid.last().unwrap_or(&ACTIVE_GRID_MIN);
    Ok(RadiusOptimum {
        radius,
        objective: omni,
        case_label: CaseLabel::Active(ActiveCase::Case3Boundary),
        derivative_residual: 0.0,
        evaluations: evals.get(),
    })
}
