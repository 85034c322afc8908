//! Paired comparison of power-allocation schemes.

use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::mcsim::{run_trials, Allocation, SimConfig};
use crate::scenario::ScenarioParams;

/// Normal quantile for two-sided 95% intervals.
const Z95: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeRow {
    pub pb_power: f64,
    pub scheme: Allocation,
    pub mean: f64,
    pub mean_ci95: f64,
    pub active: f64,
    pub active_ci95: f64,
}

/// Verdict on "`higher` ≥ `lower`" from paired trial differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingVerdict {
    pub pb_power: f64,
    /// `"mean"` or `"active"`.
    pub metric: String,
    pub higher: Allocation,
    pub lower: Allocation,
    pub mean_difference: f64,
    pub std_error: f64,
    /// The difference is not significantly negative at 95%.
    pub holds: bool,
    /// The difference is significantly positive at 95%.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeReport {
    pub rows: Vec<SchemeRow>,
    pub verdicts: Vec<OrderingVerdict>,
}

impl SchemeReport {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }
}

fn paired(a: &[f64], b: &[f64]) -> (f64, f64) {
    let n = a.len() as f64;
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

fn verdict(
    pb_power: f64,
    metric: &str,
    (higher, a): (Allocation, &[f64]),
    (lower, b): (Allocation, &[f64]),
) -> OrderingVerdict {
    let (mean_difference, std_error) = paired(a, b);
    OrderingVerdict {
        pb_power,
        metric: metric.to_string(),
        higher,
        lower,
        mean_difference,
        std_error,
        holds: mean_difference >= -Z95 * std_error,
        strict: mean_difference > Z95 * std_error,
    }
}

/// Simulates Uniform, Greedy and Robust at each PB power with common random
/// numbers and checks the expected orderings: mean Greedy ≥ Robust ≥ Uniform,
/// active probability Robust ≥ Uniform ≥ Greedy.
pub fn compare_schemes(
    params: &ScenarioParams,
    sweep: &[f64],
    config: &SimConfig,
) -> Result<SchemeReport, BenchError> {
    use Allocation::{Greedy, Robust, Uniform};
    let th = params.power_threshold;
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for &pw in sweep {
        let p = params.with_pb_power(pw);
        let mut samples = Vec::new();
        for scheme in [Uniform, Greedy, Robust] {
            let s = run_trials(&p, &config.clone().with_allocation(scheme))?;
            let active: Vec<f64> = s.samples.iter().map(|&v| f64::from(u8::from(v >= th))).collect();
            let f = active.iter().sum::<f64>() / active.len() as f64;
            rows.push(SchemeRow {
                pb_power: pw,
                scheme,
                mean: s.mean,
                mean_ci95: s.mean_ci95,
                active: f,
                active_ci95: Z95 * (f * (1.0 - f) / active.len() as f64).sqrt(),
            });
            samples.push((scheme, s.samples, active));
        }
        let get = |k: Allocation| samples.iter().find(|(s, _, _)| *s == k).unwrap();
        let (u, g, r) = (get(Uniform), get(Greedy), get(Robust));
        verdicts.push(verdict(pw, "mean", (Greedy, &g.1), (Robust, &r.1)));
        verdicts.push(verdict(pw, "mean", (Robust, &r.1), (Uniform, &u.1)));
        verdicts.push(verdict(pw, "active", (Robust, &r.2), (Uniform, &u.2)));
        verdicts.push(verdict(pw, "active", (Uniform, &u.2), (Greedy, &g.2)));
    }
    Ok(SchemeReport { rows, verdicts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sector_schemes_identical() {
        let p = ScenarioParams::default().with_sectors(1);
        let r = compare_schemes(&p, &[5.0], &SimConfig::default().with_trials(300)).unwrap();
        assert!(r.verdicts.iter().all(|v| v.mean_difference == 0.0 && v.holds && !v.strict));
        assert_eq!(r.rows.len(), 3);
        assert!(r.rows.windows(2).all(|w| w[0].mean == w[1].mean));
    }

    #[test]
    fn paired_statistics() {
        let (m, se) = paired(&[3.0, 4.0, 5.0], &[1.0, 2.0, 3.0]);
        assert_eq!((m, se), (2.0, 0.0));
        let (m, se) = paired(&[1.0, 3.0], &[0.0, 0.0]);
        assert_eq!(m, 2.0);
        assert!((se - 1.0).abs() < 1e-15);
    }
}
