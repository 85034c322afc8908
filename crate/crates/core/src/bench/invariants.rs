//! Invariant suite run by the `validate` subcommand.

use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::analytic::{self, BranchTag};
use crate::mcsim::{run_trials, Allocation, SimConfig};
use crate::radopt::optimal_radius_mean;
use crate::scenario::ScenarioParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> InvariantCheck {
    InvariantCheck {
        name: name.to_string(),
        passed,
        detail,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Evaluates the analytic identities at `params` and a short omnidirectional
/// simulation with `config.trials` trials.
pub fn validate_invariants(
    params: &ScenarioParams,
    config: &SimConfig,
) -> Result<Vec<InvariantCheck>, BenchError> {
    let params = params.validate().map_err(crate::scenario::ConfigError::from)?;
    let n = params.sectors;
    let mut out = Vec::new();

    let near: f64 = (1..=n)
        .map(|m| analytic::reception_prob_near(m, &params))
        .sum::<Result<f64, _>>()?;
    let far: f64 = (0..=n)
        .map(|m| analytic::reception_prob_far(m, &params))
        .sum::<Result<f64, _>>()?;
    let p = analytic::sector_empty_prob(&params);
    let far_want = p.powi(n as i32) + analytic::sector_active_prob(&params);
    out.push(check(
        "reception probabilities sum",
        (near - 1.0).abs() < 1e-12 && (far - far_want).abs() < 1e-12,
        format!("near {near:.15}, far {far:.15} (expected {far_want:.15})"),
    ));

    let unit = params.with_charging_radius(1.0);
    let s = 1.0 / analytic::mean_power(&unit);
    let pairs = [
        (
            analytic::mean_power_branch(&unit, BranchTag::RhoAtMostOne),
            analytic::mean_power_branch(&unit, BranchTag::RhoAboveOne),
        ),
        (
            analytic::variance_power_branch(&unit, BranchTag::RhoAtMostOne),
            analytic::variance_power_branch(&unit, BranchTag::RhoAboveOne),
        ),
        (
            analytic::laplace_total_branch(s, &unit, BranchTag::RhoAtMostOne)?,
            analytic::laplace_total_branch(s, &unit, BranchTag::RhoAboveOne)?,
        ),
    ];
    let worst = pairs.iter().map(|&(a, b)| rel(a, b)).fold(0.0, f64::max);
    out.push(check(
        "branch continuity at unit radius",
        worst <= 1e-9,
        format!("largest relative gap {worst:.3e}"),
    ));

    let single = params.with_sectors(1);
    let gaps = [
        rel(analytic::mean_power(&single), analytic::mean_power_omni(&single)),
        rel(analytic::variance_power(&single), analytic::variance_omni(&single)),
        rel(
            analytic::laplace_total(s, &single)?,
            analytic::laplace_omni(s, &single)?,
        ),
    ];
    let worst = gaps.iter().copied().fold(0.0, f64::max);
    out.push(check(
        "single sector equals omnidirectional",
        worst <= 1e-12,
        format!("largest relative gap {worst:.3e}"),
    ));

    if n >= 2 {
        let (em, ev) = (analytic::ln_mean_excess(&params), analytic::ln_variance_excess(&params));
        out.push(check(
            "directional mean and variance exceed omnidirectional",
            em.is_finite() && ev.is_finite(),
            format!("ln excess: mean {em:.4}, variance {ev:.4}"),
        ));
    }

    let g = analytic::gamma_approx(&params)?;
    let mean = analytic::mean_power(&params);
    let var = analytic::variance_power(&params);
    out.push(check(
        "gamma fit reproduces moments",
        rel(g.mean(), mean) < 1e-12 && rel(g.variance(), var) < 1e-12,
        format!("shape {:.6}, scale {:.6e} W", g.shape, g.scale),
    ));

    let opt = optimal_radius_mean(&params)?;
    out.push(check(
        "mean-optimal radius is stationary",
        opt.derivative_residual.abs() <= 1e-8,
        format!("radius {:.6} m, residual {:.3e}", opt.radius, opt.derivative_residual),
    ));

    let omni = run_trials(&params, &config.clone().with_allocation(Allocation::ForcedOmni))?;
    let want = analytic::mean_power_omni(&params);
    let z = (omni.mean - want) / omni.std_error();
    out.push(check(
        "simulated omnidirectional mean",
        z.abs() <= 4.0,
        format!(
            "{:.6e} W vs {want:.6e} W over {} trials (z = {z:.2})",
            omni.mean,
            omni.samples.len()
        ),
    ));
    Ok(out)
}
