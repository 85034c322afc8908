//! Analytical and simulation toolkit for adaptively directional wireless power
//! transfer (AD-WPT) in large Poisson networks of power beacons (PBs) and
//! sensor nodes (SNs).
//!
//! - [`scenario`]: physical parameters and their validation.
//! - [`specfun`]: Gamma and incomplete Gamma functions.
//! - [`analytic`]: closed-form reception probabilities, Laplace transforms,
//!   mean, variance and the Gamma-approximated CCDF of the received power.
//! - [`mcsim`]: first-principles Monte Carlo engine.
//! - [`radopt`]: optimal charging radius for mean power and active probability.
//! - [`bench`]: figure reproduction, scheme comparison and config loading.

pub mod analytic;
pub mod bench;
pub mod mcsim;
pub mod radopt;
pub mod scenario;
pub mod specfun;

pub use analytic::{BranchTag, GammaApprox};
pub use mcsim::{Allocation, NetworkSample, SimConfig, TrialSummary, WindowRadius};
pub use radopt::{ActiveCase, CaseLabel, MeanRegime, RadiusOptimum};
pub use scenario::ScenarioParams;
