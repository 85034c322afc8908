//! CSV and JSON output of simulation results.

use std::io::Write;

use serde_json::{json, Value};

use super::{McError, SimConfig, TrialSummary};
use crate::scenario::ScenarioParams;

/// Writes `trial_index,power_w` rows.
pub fn write_samples_csv<W: Write>(mut out: W, samples: &[f64]) -> Result<(), McError> {
    writeln!(out, "trial_index,power_w")?;
    for (i, v) in samples.iter().enumerate() {
        writeln!(out, "{i},{v:e}")?;
    }
    Ok(())
}

/// Summary statistics with the scenario and configuration that produced them.
pub fn summary_json(summary: &TrialSummary, params: &ScenarioParams, config: &SimConfig) -> Value {
    json!({
        "trials": summary.samples.len(),
        "seed": config.master_seed,
        "mean_power_w": summary.mean,
        "variance_w2": summary.variance,
        "mean_ci95_w": summary.mean_ci95,
        "ccdf": summary
            .ccdf
            .iter()
            .map(|(t, p)| json!({"threshold_w": t, "probability": p}))
            .collect::<Vec<_>>(),
        "scenario": params,
        "config": {
            "allocation": config.allocation.name(),
            "window_radius": config.window_radius,
            "tail_epsilon": config.tail_epsilon,
        },
    })
}

pub fn write_summary_json<W: Write>(
    mut out: W,
    summary: &TrialSummary,
    params: &ScenarioParams,
    config: &SimConfig,
) -> Result<(), McError> {
    let text = serde_json::to_string_pretty(&summary_json(summary, params, config))
        .map_err(|e| McError::Config(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}
