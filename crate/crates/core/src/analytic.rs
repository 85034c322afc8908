//! Closed-form received-power statistics at the typical SN.
//!
//! PBs within the charging radius ρ of the typical SN ("near" PBs) always beam
//! towards it; farther PBs do so only when the SN lies in one of their active
//! sectors. Thinning the PB process by these reception probabilities gives a
//! family of homogeneous processes, one per beam count M, whose Laplace
//! transforms, mean and variance are available in closed form.
//!
//! Every formula has two branches because the path loss `max(r,1)^{-α}` is
//! flat inside the unit disk: one for `ρ ≤ 1` and one for `ρ > 1`. The
//! `*_branch` variants evaluate a chosen branch, which is how continuity at
//! `ρ = 1` is checked.
//!
//! Functions assume the parameters have passed
//! [`validate`](crate::scenario::validate).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::ScenarioParams;
use crate::specfun::{self, SpecFunError};

/// Largest `s·P_p·σ·G_M` accepted by the Laplace transforms.
pub const MAX_LAPLACE_ARG: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },
    #[error("range error: {what} (got {value})")]
    Range { what: &'static str, value: f64 },
    #[error("degenerate distribution: {0}")]
    Degenerate(&'static str),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// Which closed-form branch applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BranchTag {
    RhoAtMostOne,
    RhoAboveOne,
}

impl BranchTag {
    pub fn for_radius(rho: f64) -> Self {
        if rho <= 1.0 {
            BranchTag::RhoAtMostOne
        } else {
            BranchTag::RhoAboveOne
        }
    }
}

/// Shape/scale pair of the moment-matched Gamma distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaApprox {
    pub shape: f64,
    /// Watts.
    pub scale: f64,
}

impl GammaApprox {
    pub fn from_moments(mean: f64, variance: f64) -> Result<Self, AnalyticError> {
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(AnalyticError::Degenerate("mean must be positive"));
        }
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(AnalyticError::Degenerate("variance must be positive"));
        }
        Ok(Self {
            shape: mean * mean / variance,
            scale: variance / mean,
        })
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }

    /// `Pr(X ≥ threshold)` for `X ~ Gamma(shape, scale)`.
    pub fn ccdf(&self, threshold: f64) -> Result<f64, AnalyticError> {
        if !(threshold >= 0.0) {
            return Err(AnalyticError::Domain {
                what: "threshold must be nonnegative",
                value: threshold,
            });
        }
        if threshold.is_infinite() {
            return Ok(0.0);
        }
        let x = threshold / self.scale;
        if x > specfun::MAX_ARG {
            return Ok(0.0);
        }
        Ok(specfun::regularized_gamma_q(self.shape, x)?)
    }
}

/// `ln C(n, k)`.
fn ln_binomial(n: u32, k: u32) -> f64 {
    let ln_fact = |m: u32| (1..=m).map(|i| (i as f64).ln()).sum::<f64>();
    ln_fact(n) - ln_fact(k) - ln_fact(n - k)
}

fn binomial(n: u32, k: u32) -> f64 {
    ln_binomial(n, k).exp().round()
}

/// `λ_s π ρ² / N`, the mean SN count of one sector.
fn sector_load(params: &ScenarioParams) -> f64 {
    params.sn_density * PI * params.charging_radius.powi(2) / params.sectors as f64
}

/// Probability `p` that a sector of a charging region holds no SN.
pub fn sector_empty_prob(params: &ScenarioParams) -> f64 {
    (-sector_load(params)).exp()
}

/// Probability `q = 1 − p` that a sector is active.
pub fn sector_active_prob(params: &ScenarioParams) -> f64 {
    -(-sector_load(params)).exp_m1()
}

fn pq(params: &ScenarioParams) -> (f64, f64) {
    (sector_empty_prob(params), sector_active_prob(params))
}

/// Antenna gain towards each of `m` active sectors out of `n`.
pub fn gain(m: u32, n: u32) -> Result<f64, AnalyticError> {
    if n == 0 || m > n {
        return Err(AnalyticError::Domain {
            what: "active sector count must lie in [0, N]",
            value: m as f64,
        });
    }
    Ok(if m == 0 { 1.0 } else { n as f64 / m as f64 })
}

fn check_beams(m: u32, n: u32, allow_zero: bool) -> Result<(), AnalyticError> {
    if m > n || (!allow_zero && m == 0) {
        return Err(AnalyticError::Domain {
            what: if allow_zero {
                "beam count must lie in [0, N]"
            } else {
                "beam count of a near PB must lie in [1, N]"
            },
            value: m as f64,
        });
    }
    Ok(())
}

/// `C(n,k) pᵃ qᵇ` with `0⁰ = 1`.
fn binom_term(n: u32, k: u32, p: f64, a: u32, q: f64, b: u32) -> f64 {
    binomial(n, k) * p.powi(a as i32) * q.powi(b as i32)
}

/// Probability that a near PB beams towards the typical SN with gain `G_M`.
pub fn reception_prob_near(m: u32, params: &ScenarioParams) -> Result<f64, AnalyticError> {
    let n = params.sectors;
    check_beams(m, n, false)?;
    let (p, q) = pq(params);
    Ok(binom_term(n - 1, m - 1, p, n - m, q, m - 1))
}

/// Probability that a far PB has exactly `m` active sectors.
pub fn far_activation_prob(m: u32, params: &ScenarioParams) -> Result<f64, AnalyticError> {
    let n = params.sectors;
    check_beams(m, n, true)?;
    let (p, q) = pq(params);
    Ok(binom_term(n, m, p, n - m, q, m))
}

/// Probability that a far PB with `m` active sectors covers the typical SN.
pub fn far_alignment_prob(m: u32, n: u32) -> Result<f64, AnalyticError> {
    check_beams(m, n, true)?;
    Ok(if m == 0 { 1.0 } else { m as f64 / n as f64 })
}

/// Probability that a far PB beams towards the typical SN with gain `G_M`.
pub fn reception_prob_far(m: u32, params: &ScenarioParams) -> Result<f64, AnalyticError> {
    let n = params.sectors;
    check_beams(m, n, true)?;
    let (p, q) = pq(params);
    Ok(if m == 0 {
        p.powi(n as i32)
    } else {
        binom_term(n - 1, m - 1, p, n - m, q, m)
    })
}

/// `x^{2/α} γ(1 − 2/α, x)`.
fn scaled_lower_gamma(x: f64, alpha: f64) -> Result<f64, AnalyticError> {
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(x.powf(2.0 / alpha) * specfun::lower_incomplete_gamma(1.0 - 2.0 / alpha, x)?)
}

fn laplace_arg(s: f64, m: u32, params: &ScenarioParams) -> Result<f64, AnalyticError> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(AnalyticError::Domain {
            what: "Laplace variable must be nonnegative",
            value: s,
        });
    }
    let x = s * params.pb_power * params.attenuation * gain(m, params.sectors)?;
    if x > MAX_LAPLACE_ARG {
        return Err(AnalyticError::Range {
            what: "s·P_p·σ·G_M above 1e6",
            value: x,
        });
    }
    Ok(x)
}

/// `ln L` of the power from near PBs with gain `G_M`, for a chosen branch.
pub fn log_laplace_near_branch(
    s: f64,
    m: u32,
    params: &ScenarioParams,
    branch: BranchTag,
) -> Result<f64, AnalyticError> {
    let eta = reception_prob_near(m, params)?;
    let x = laplace_arg(s, m, params)?;
    let rho = params.charging_radius;
    let alpha = params.path_loss_exp;
    let lp = params.pb_density;
    let inner = match branch {
        BranchTag::RhoAtMostOne => rho * rho * -(-x).exp_m1(),
        BranchTag::RhoAboveOne => {
            let y = x * rho.powf(-alpha);
            rho * rho * -(-y).exp_m1() + scaled_lower_gamma(x, alpha)?
                - x.powf(2.0 / alpha) * specfun::lower_incomplete_gamma(1.0 - 2.0 / alpha, y)?
        }
    };
    Ok(-lp * PI * eta * inner)
}

/// `ln L` of the power from far PBs with gain `G_M`, for a chosen branch.
pub fn log_laplace_far_branch(
    s: f64,
    m: u32,
    params: &ScenarioParams,
    branch: BranchTag,
) -> Result<f64, AnalyticError> {
    let eta = reception_prob_far(m, params)?;
    let x = laplace_arg(s, m, params)?;
    let rho = params.charging_radius;
    let alpha = params.path_loss_exp;
    let lp = params.pb_density;
    let inner = match branch {
        BranchTag::RhoAtMostOne => rho * rho * -(-x).exp_m1() - scaled_lower_gamma(x, alpha)?,
        BranchTag::RhoAboveOne => {
            let y = x * rho.powf(-alpha);
            let tail = if y == 0.0 {
                0.0
            } else {
                x.powf(2.0 / alpha) * specfun::lower_incomplete_gamma(1.0 - 2.0 / alpha, y)?
            };
            rho * rho * -(-y).exp_m1() - tail
        }
    };
    Ok(lp * PI * eta * inner)
}

/// Laplace transform of the power from near PBs with gain `G_M`, `1 ≤ M ≤ N`.
pub fn laplace_near(s: f64, m: u32, params: &ScenarioParams) -> Result<f64, AnalyticError> {
    let branch = BranchTag::for_radius(params.charging_radius);
    log_laplace_near_branch(s, m, params, branch).map(f64::exp)
}

/// Laplace transform of the power from far PBs with gain `G_M`, `0 ≤ M ≤ N`.
pub fn laplace_far(s: f64, m: u32, params: &ScenarioParams) -> Result<f64, AnalyticError> {
    let branch = BranchTag::for_radius(params.charging_radius);
    log_laplace_far_branch(s, m, params, branch).map(f64::exp)
}

/// `ln L_{P_s}(s)` summed over every near and far component of a branch.
pub fn log_laplace_total_branch(
    s: f64,
    params: &ScenarioParams,
    branch: BranchTag,
) -> Result<f64, AnalyticError> {
    let n = params.sectors;
    let mut total = 0.0;
    for m in 1..=n {
        total += log_laplace_near_branch(s, m, params, branch)?;
    }
    for m in 0..=n {
        total += log_laplace_far_branch(s, m, params, branch)?;
    }
    Ok(total)
}

pub fn log_laplace_total(s: f64, params: &ScenarioParams) -> Result<f64, AnalyticError> {
    log_laplace_total_branch(s, params, BranchTag::for_radius(params.charging_radius))
}

/// Laplace transform `E[e^{−s P_s}]` of the aggregate received power.
pub fn laplace_total(s: f64, params: &ScenarioParams) -> Result<f64, AnalyticError> {
    log_laplace_total(s, params).map(f64::exp)
}

pub fn laplace_total_branch(
    s: f64,
    params: &ScenarioParams,
    branch: BranchTag,
) -> Result<f64, AnalyticError> {
    log_laplace_total_branch(s, params, branch).map(f64::exp)
}

/// Laplace transform of the received power under omnidirectional WPT.
pub fn laplace_omni(s: f64, params: &ScenarioParams) -> Result<f64, AnalyticError> {
    let x = laplace_arg(s, 0, params)?;
    let v = -params.pb_density * PI * scaled_lower_gamma(x, params.path_loss_exp)?;
    Ok(v.exp())
}

/// `Σ_{j=1}^{N−1} pʲ = (p − p^N)/(1 − p)`, exact for every p.
fn geometric_tail(p: f64, n: u32) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for _ in 1..n {
        term *= p;
        sum += term;
    }
    sum
}

/// `Σ_{j=1}^{N−1} j pʲ`.
fn weighted_geometric_tail(p: f64, n: u32) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for j in 1..n {
        term *= p;
        sum += j as f64 * term;
    }
    sum
}

fn mean_scale(params: &ScenarioParams) -> f64 {
    params.pb_power * params.pb_density * params.attenuation * PI
}

fn variance_scale(params: &ScenarioParams) -> f64 {
    params.pb_density * params.pb_power.powi(2) * params.attenuation.powi(2) * PI
}

/// Mean received power under omnidirectional WPT, `P_p λ_p σ π α/(α−2)`.
pub fn mean_power_omni(params: &ScenarioParams) -> f64 {
    let a = params.path_loss_exp;
    mean_scale(params) * a / (a - 2.0)
}

/// Variance under omnidirectional WPT, `λ_p P_p² σ² π α/(α−1)`.
pub fn variance_omni(params: &ScenarioParams) -> f64 {
    let a = params.path_loss_exp;
    variance_scale(params) * a / (a - 1.0)
}

/// Mean received power evaluated on a chosen branch.
pub fn mean_power_branch(params: &ScenarioParams, branch: BranchTag) -> f64 {
    let p = sector_empty_prob(params);
    let tail = geometric_tail(p, params.sectors);
    let rho = params.charging_radius;
    let a = params.path_loss_exp;
    let bracket = match branch {
        BranchTag::RhoAtMostOne => rho * rho * tail + a / (a - 2.0),
        BranchTag::RhoAboveOne => {
            let r = rho.powf(2.0 - a);
            ((a - 2.0 * r) * (1.0 + tail) + 2.0 * r) / (a - 2.0)
        }
    };
    mean_scale(params) * bracket
}

/// Mean received power `E[P_s]` at the typical SN, in watts.
pub fn mean_power(params: &ScenarioParams) -> f64 {
    mean_power_branch(params, BranchTag::for_radius(params.charging_radius))
}

/// `Σ_{M=1}^{N} (N/M)² C(N−1,M−1) p^{N−M} q^{M−1}`, the mean squared gain of
/// a near PB. Written with `q^{M−1}` so that no `1/q` appears.
fn near_gain_second_moment(p: f64, q: f64, n: u32) -> f64 {
    (1..=n)
        .map(|m| {
            let g = n as f64 / m as f64;
            g * g * binom_term(n - 1, m - 1, p, n - m, q, m - 1)
        })
        .sum()
}

/// Variance of the received power evaluated on a chosen branch.
pub fn variance_power_branch(params: &ScenarioParams, branch: BranchTag) -> f64 {
    let (p, q) = pq(params);
    let n = params.sectors;
    let t = near_gain_second_moment(p, q, n);
    let pn = p.powi(n as i32);
    let rho = params.charging_radius;
    let a = params.path_loss_exp;
    let bracket = match branch {
        BranchTag::RhoAtMostOne => {
            (a / (a - 1.0) - rho * rho) * pn + (p * rho * rho + a * q / (a - 1.0)) * t
        }
        BranchTag::RhoAboveOne => {
            let b = rho.powf(2.0 - 2.0 * a);
            (b * pn + (a - b + b * q) * t) / (a - 1.0)
        }
    };
    variance_scale(params) * bracket
}

/// Variance `V[P_s]` of the received power, in W².
pub fn variance_power(params: &ScenarioParams) -> f64 {
    variance_power_branch(params, BranchTag::for_radius(params.charging_radius))
}

/// `ln(E[P_s] − E[P_s^omni])`, evaluated without cancellation so that the
/// sign of the excess survives even when `p` underflows. `−∞` iff `N = 1`.
pub fn ln_mean_excess(params: &ScenarioParams) -> f64 {
    let n = params.sectors;
    if n == 1 {
        return f64::NEG_INFINITY;
    }
    let ln_p = -sector_load(params);
    let p = ln_p.exp();
    // Σ_{j=1}^{N−1} pʲ = p · Σ_{j=0}^{N−2} pʲ
    let ln_tail = ln_p + (1.0 + geometric_tail(p, n - 1)).ln();
    let rho = params.charging_radius;
    let a = params.path_loss_exp;
    let ln_factor = if rho <= 1.0 {
        2.0 * rho.ln()
    } else {
        ((a - 2.0 * rho.powf(2.0 - a)) / (a - 2.0)).ln()
    };
    mean_scale(params).ln() + ln_factor + ln_tail
}

/// `ln(V[P_s] − V[P_s^omni])` with `p` factored out analytically.
/// `−∞` iff `N = 1`.
pub fn ln_variance_excess(params: &ScenarioParams) -> f64 {
    let n = params.sectors;
    if n == 1 {
        return f64::NEG_INFINITY;
    }
    let ln_p = -sector_load(params);
    let p = ln_p.exp();
    let q = sector_active_prob(params);
    // U/p with U = Σ_{M<N} ((N/M)² − 1) C(N−1,M−1) p^{N−M} q^{M−1}
    let u_over_p: f64 = (1..n)
        .map(|m| {
            let g = n as f64 / m as f64;
            (g * g - 1.0) * binom_term(n - 1, m - 1, p, n - m - 1, q, m - 1)
        })
        .sum();
    // 1 − p^{N−1}
    let one_minus = -((n - 1) as f64 * ln_p).exp_m1();
    let rho = params.charging_radius;
    let a = params.path_loss_exp;
    let reduced = if rho <= 1.0 {
        one_minus * (rho * rho - a / (a - 1.0)) + (p * rho * rho + a * q / (a - 1.0)) * u_over_p
    } else {
        let b = rho.powf(2.0 - 2.0 * a);
        (-b * one_minus + (a - b * p) * u_over_p) / (a - 1.0)
    };
    variance_scale(params).ln() + ln_p + reduced.ln()
}

/// Ratios of the mean power from near and far PBs to the omnidirectional
/// counterparts: `((1 − p^N)/(1 − p), 1)`.
pub fn near_far_mean_ratios(params: &ScenarioParams) -> (f64, f64) {
    let p = sector_empty_prob(params);
    (1.0 + geometric_tail(p, params.sectors), 1.0)
}

/// Moment-matched Gamma approximation of the received power.
pub fn gamma_approx(params: &ScenarioParams) -> Result<GammaApprox, AnalyticError> {
    GammaApprox::from_moments(mean_power(params), variance_power(params))
}

pub fn gamma_approx_omni(params: &ScenarioParams) -> Result<GammaApprox, AnalyticError> {
    GammaApprox::from_moments(mean_power_omni(params), variance_omni(params))
}

/// Gamma-approximated CCDF `Pr(P_s ≥ threshold)`, i.e. the SN active
/// probability at that operational threshold.
pub fn gamma_ccdf(threshold: f64, params: &ScenarioParams) -> Result<f64, AnalyticError> {
    gamma_approx(params)?.ccdf(threshold)
}

pub fn gamma_ccdf_omni(threshold: f64, params: &ScenarioParams) -> Result<f64, AnalyticError> {
    gamma_approx_omni(params)?.ccdf(threshold)
}

/// Natural scale `2 P_p λ_p π σ` of the mean-power derivative.
pub fn mean_derivative_scale(params: &ScenarioParams) -> f64 {
    2.0 * mean_scale(params)
}

/// Dimensionless bracket of `∂E[P_s]/∂ρ` on a chosen branch, so that the
/// derivative is `mean_derivative_scale · bracket`. Both branches coincide
/// at `ρ = 1`.
pub fn mean_derivative_bracket_branch(params: &ScenarioParams, branch: BranchTag) -> f64 {
    let n = params.sectors;
    let p = sector_empty_prob(params);
    let tail = geometric_tail(p, n);
    let weighted = weighted_geometric_tail(p, n);
    let rho = params.charging_radius;
    let a = params.path_loss_exp;
    let ls_pi = params.sn_density * PI;
    match branch {
        BranchTag::RhoAtMostOne => rho * tail - ls_pi * rho.powi(3) * weighted / n as f64,
        BranchTag::RhoAboveOne => {
            rho.powf(1.0 - a) * tail
                - ls_pi * rho * (a - 2.0 * rho.powf(2.0 - a)) * weighted / (n as f64 * (a - 2.0))
        }
    }
}

pub fn mean_derivative_bracket(params: &ScenarioParams) -> f64 {
    mean_derivative_bracket_branch(params, BranchTag::for_radius(params.charging_radius))
}

pub fn d_mean_d_rho_branch(params: &ScenarioParams, branch: BranchTag) -> f64 {
    mean_derivative_scale(params) * mean_derivative_bracket_branch(params, branch)
}

/// `∂E[P_s]/∂ρ` in W/m.
pub fn d_mean_d_rho(params: &ScenarioParams) -> f64 {
    mean_derivative_scale(params) * mean_derivative_bracket(params)
}

#[cfg(test)]
#[path = "../tests/common/quad.rs"]
mod quad;
