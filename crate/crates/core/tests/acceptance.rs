//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use adwpt::analytic::{self, BranchTag};
use adwpt::bench::{self, ExperimentSpec, FigureId};
use adwpt::mcsim::{self, run_trials, Allocation, SimConfig, TrialSummary};
use adwpt::radopt::{self, ActiveCase, CaseLabel};
use adwpt::ScenarioParams;
use common::quad;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Hand-evaluated omnidirectional mean at P_p = 10 W.
const OMNI_MEAN_FIG3: f64 = 5.9675e-4;
const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn fig2() -> ScenarioParams {
    ScenarioParams::default()
}

fn fig3(ls: f64, rho: f64) -> ScenarioParams {
    ScenarioParams::default()
        .with_pb_power(10.0)
        .with_sn_density(ls)
        .with_charging_radius(rho)
}

fn random_params(rng: &mut ChaCha8Rng, sectors: (u32, u32), rho: Option<(f64, f64)>) -> ScenarioParams {
    let mut p = ScenarioParams::default()
        .with_pb_power(rng.random_range(0.5..20.0))
        .with_pb_density(rng.random_range(0.01..=2.0))
        .with_sn_density(rng.random_range(0.01..=2.0))
        .with_sectors(rng.random_range(sectors.0..=sectors.1));
    p.path_loss_exp = 2.1 + (5.0 - 2.1) * (1.0 - rng.random::<f64>());
    if let Some((lo, hi)) = rho {
        p = p.with_charging_radius(rng.random_range(lo..=hi));
    }
    p
}

// ---------------------------------------------------------------------------

fn laplace_vs_quadrature() -> Outcome {
    let p = fig2();
    let (a, lp, rho, n) = (p.path_loss_exp, p.pb_density, p.charging_radius, p.sectors);
    let mut worst: f64 = 0.0;
    for s in [1e1, 1e2, 1e3, 1e4] {
        let mut total_log = 0.0;
        for m in 1..=n {
            let x = s * p.pb_power * p.attenuation * analytic::gain(m, n).unwrap();
            let eta = analytic::reception_prob_near(m, &p).unwrap();
            let lg = -2.0 * PI * lp * eta * quad::pgfl_finite(x, a, 0.0, rho, 1e-14);
            total_log += lg;
            worst = worst.max(rel(analytic::laplace_near(s, m, &p).unwrap(), lg.exp()));
        }
        for m in 0..=n {
            let x = s * p.pb_power * p.attenuation * analytic::gain(m, n).unwrap();
            let eta = analytic::reception_prob_far(m, &p).unwrap();
            let lg = -2.0 * PI * lp * eta * quad::pgfl_outer(x, a, rho, 1e-14);
            total_log += lg;
            worst = worst.max(rel(analytic::laplace_far(s, m, &p).unwrap(), lg.exp()));
        }
        worst = worst.max(rel(analytic::laplace_total(s, &p).unwrap(), total_log.exp()));
        let x = s * p.pb_power * p.attenuation;
        let omni = (-2.0 * PI * lp * quad::pgfl_outer(x, a, 0.0, 1e-14)).exp();
        worst = worst.max(rel(analytic::laplace_omni(s, &p).unwrap(), omni));
    }
    outcome(worst <= 1e-8, format!("max relative error {worst:.2e} (tolerance 1e-8)"))
}

struct SweepPoint {
    ls: f64,
    rho: f64,
    summary: TrialSummary,
}

fn mean_variance_sweep() -> Vec<SweepPoint> {
    let config = SimConfig::default().with_trials(20_000).with_seed(SEED);
    let mut out = Vec::new();
    for ls in [0.2, 0.8, 1.6] {
        for rho in [0.5, 1.0, 2.0, 4.0] {
            let summary = run_trials(&fig3(ls, rho), &config).expect("simulation runs");
            out.push(SweepPoint { ls, rho, summary });
        }
    }
    out
}

fn mean_validation(sweep: &[SweepPoint]) -> Outcome {
    let mut worst = (0.0, 0.0, 0.0);
    for pt in sweep {
        let e = rel(pt.summary.mean, analytic::mean_power(&fig3(pt.ls, pt.rho)));
        if e > worst.0 {
            worst = (e, pt.ls, pt.rho);
        }
    }
    let config = SimConfig::default()
        .with_trials(20_000)
        .with_seed(SEED)
        .with_allocation(Allocation::ForcedOmni);
    let omni = run_trials(&fig3(0.2, 1.0), &config).expect("simulation runs");
    let z = (omni.mean - OMNI_MEAN_FIG3) / omni.std_error();
    outcome(
        worst.0 <= 0.02 && z.abs() <= 3.0,
        format!(
            "max relative mean error {:.4} at λ_s={} ρ={} (tolerance 0.02); omni z = {z:.2} (tolerance 3)",
            worst.0, worst.1, worst.2
        ),
    )
}

fn variance_validation(sweep: &[SweepPoint]) -> Outcome {
    let mut worst = (0.0, 0.0, 0.0);
    for pt in sweep {
        let e = rel(pt.summary.variance, analytic::variance_power(&fig3(pt.ls, pt.rho)));
        if e > worst.0 {
            worst = (e, pt.ls, pt.rho);
        }
    }
    outcome(
        worst.0 <= 0.05,
        format!(
            "max relative variance error {:.4} at λ_s={} ρ={} (tolerance 0.05)",
            worst.0, worst.1, worst.2
        ),
    )
}

fn gamma_ccdf_fit() -> Outcome {
    let p = fig2();
    let thresholds = bench::fig2_thresholds();
    let config = SimConfig::default()
        .with_trials(50_000)
        .with_seed(SEED)
        .with_thresholds(thresholds);
    let s = run_trials(&p, &config).expect("simulation runs");
    let mut worst = (0.0, 0.0);
    for &(t, emp) in &s.ccdf {
        let d = (analytic::gamma_ccdf(t, &p).unwrap() - emp).abs();
        if d > worst.0 {
            worst = (d, t);
        }
    }
    outcome(
        worst.0 <= 0.05,
        format!(
            "max |gamma - empirical| = {:.4} at {:.3} mW (tolerance 0.05)",
            worst.0,
            worst.1 * 1e3
        ),
    )
}

fn branch_continuity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = random_params(&mut rng, (1, 8), None).with_charging_radius(1.0);
        let (lo, hi) = (BranchTag::RhoAtMostOne, BranchTag::RhoAboveOne);
        worst = worst.max(rel(analytic::mean_power_branch(&p, lo), analytic::mean_power_branch(&p, hi)));
        worst = worst.max(rel(
            analytic::variance_power_branch(&p, lo),
            analytic::variance_power_branch(&p, hi),
        ));
        let mean = analytic::mean_power(&p);
        for s in [0.1 / mean, 1.0 / mean, 10.0 / mean] {
            worst = worst.max(rel(
                analytic::laplace_total_branch(s, &p, lo).unwrap(),
                analytic::laplace_total_branch(s, &p, hi).unwrap(),
            ));
        }
    }
    outcome(worst <= 1e-9, format!("max relative gap {worst:.2e} over 100 scenarios (tolerance 1e-9)"))
}

fn degeneracy() -> Outcome {
    let mut worst: f64 = 0.0;
    let radii = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0];
    for &rho in &radii {
        let p = fig2().with_sectors(1).with_charging_radius(rho);
        worst = worst.max(rel(analytic::mean_power(&p), analytic::mean_power_omni(&p)));
        worst = worst.max(rel(analytic::variance_power(&p), analytic::variance_omni(&p)));
        let mean = analytic::mean_power_omni(&p);
        for s in [0.1 / mean, 1.0 / mean, 10.0 / mean] {
            worst = worst.max(rel(
                analytic::laplace_total(s, &p).unwrap(),
                analytic::laplace_omni(s, &p).unwrap(),
            ));
        }
        for t in [1e-5, 1e-4, 5e-4] {
            worst = worst.max(rel(
                analytic::gamma_ccdf(t, &p).unwrap(),
                analytic::gamma_ccdf_omni(t, &p).unwrap(),
            ));
        }
    }
    let mut limit: f64 = 0.0;
    for ls in [0.2, 0.8, 1.6] {
        for rho in [0.01, 1e3] {
            let p = fig3(ls, rho);
            limit = limit.max(rel(analytic::mean_power(&p), analytic::mean_power_omni(&p)));
        }
    }
    outcome(
        worst <= 1e-12 && limit <= 5e-3,
        format!("N=1 max relative gap {worst:.2e} (tolerance 1e-12); ρ limits {limit:.2e} (tolerance 5e-3)"),
    )
}

fn dominance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let mut failures = 0usize;
    let mut identity: f64 = 0.0;
    for _ in 0..200 {
        let p = random_params(&mut rng, (2, 8), Some((0.05, 20.0)));
        let n = p.sectors;
        let (em, ev) = (analytic::ln_mean_excess(&p), analytic::ln_variance_excess(&p));
        if !(em.is_finite() && ev.is_finite()) {
            failures += 1;
        }
        // Where the excess is representable the plain comparison must agree.
        let (m, mo) = (analytic::mean_power(&p), analytic::mean_power_omni(&p));
        let (v, vo) = (analytic::variance_power(&p), analytic::variance_omni(&p));
        if (em - mo.ln()).exp() > 1e-12 && !(m > mo) {
            failures += 1;
        }
        if (ev - vo.ln()).exp() > 1e-12 && !(v > vo) {
            failures += 1;
        }
        let pe = analytic::sector_empty_prob(&p);
        let q = analytic::sector_active_prob(&p);
        let near: f64 = (1..=n).map(|k| analytic::reception_prob_near(k, &p).unwrap()).sum();
        let far: f64 = (0..=n).map(|k| analytic::reception_prob_far(k, &p).unwrap()).sum();
        let far_gain: f64 = (0..=n)
            .map(|k| analytic::reception_prob_far(k, &p).unwrap() * analytic::gain(k, n).unwrap())
            .sum();
        let near_gain: f64 = (1..=n)
            .map(|k| analytic::reception_prob_near(k, &p).unwrap() * analytic::gain(k, n).unwrap())
            .sum();
        let geo: f64 = (0..n).map(|j| pe.powi(j as i32)).sum();
        let phi_omega: f64 = (0..=n)
            .map(|k| {
                let a = analytic::far_alignment_prob(k, n).unwrap() * analytic::far_activation_prob(k, &p).unwrap();
                (a - analytic::reception_prob_far(k, &p).unwrap()).abs()
            })
            .sum();
        for err in [
            (near - 1.0).abs(),
            (far - (pe.powi(n as i32) + q)).abs(),
            (far_gain - 1.0).abs(),
            rel(near_gain, geo),
            phi_omega,
        ] {
            identity = identity.max(err);
        }
    }
    outcome(
        failures == 0 && identity <= 1e-12,
        format!("{failures} dominance failures over 200 scenarios; identity error {identity:.2e} (tolerance 1e-12)"),
    )
}

fn algorithm1() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let grid: Vec<f64> = (1..=1000).map(|i| 0.01 * i as f64).collect();
    for (ls, check) in [
        (0.2, (|r: f64| r > 1.0) as fn(f64) -> bool),
        (0.8, |r: f64| (r - 1.0).abs() <= 0.05),
        (1.6, |r: f64| r < 1.0),
    ] {
        let p = fig3(ls, 1.0);
        let o = radopt::optimal_radius_mean(&p).expect("optimizer runs");
        let beats = grid
            .iter()
            .all(|&r| o.objective >= analytic::mean_power(&p.with_charging_radius(r)) * (1.0 - 1e-9));
        let mut invariant = true;
        for pw in [2.0, 4.0, 6.0, 8.0] {
            let q = radopt::optimal_radius_mean(&p.with_pb_power(pw)).expect("optimizer runs");
            invariant &= (q.radius - o.radius).abs() <= 1e-9 * o.radius;
            invariant &= rel(q.objective / pw, o.objective / 10.0) <= 1e-12;
        }
        ok &= check(o.radius) && beats && invariant;
        notes.push(format!("λ_s={ls}: ρ*={:.4} {:?}", o.radius, o.case_label));
    }
    outcome(ok, notes.join("; "))
}

fn algorithm2() -> Outcome {
    let th = 1e-4;
    let base = fig2();
    let one = radopt::optimal_radius_active(&base.with_pb_power(1.0), th).expect("optimizer runs");
    let three = radopt::optimal_radius_active(&base.with_pb_power(3.0), th).expect("optimizer runs");
    let ten = radopt::optimal_radius_active(&base.with_pb_power(10.0), th).expect("optimizer runs");
    let omni_one = analytic::gamma_ccdf_omni(th, &base.with_pb_power(1.0)).unwrap();
    let analytic_ok = (1.0..=2.0).contains(&one.radius)
        && one.objective > omni_one
        && (1.75..=2.75).contains(&three.radius)
        && ten.case_label == CaseLabel::Active(ActiveCase::Case3Boundary);

    // Simulated active probability on the optimizer's grid, restricted to
    // radii where the curves have structure. Samples scale exactly with PB
    // power, so one unit-power run per radius serves both power levels.
    let grid: Vec<f64> = radopt::active_grid(&base)
        .into_iter()
        .filter(|r| (0.25..=6.0).contains(r))
        .collect();
    let config = SimConfig::default().with_trials(10_000).with_seed(SEED);
    let mut best = [(f64::MIN, 0.0); 2];
    for &r in &grid {
        let s = run_trials(&base.with_pb_power(1.0).with_charging_radius(r), &config).expect("simulation runs");
        for (k, pw) in [1.0, 3.0].into_iter().enumerate() {
            let f = s.active_fraction(th / pw);
            if f > best[k].0 {
                best[k] = (f, r);
            }
        }
    }
    let mc_ok = (best[0].1 - one.radius).abs() <= 0.5 && (best[1].1 - three.radius).abs() <= 0.5;
    outcome(
        analytic_ok && mc_ok,
        format!(
            "P=1: ρ̃*={:.3} {:?} F̃*={:.4} > omni {:.4}, MC argmax {:.3}; P=3: ρ̃*={:.3} {:?}, MC argmax {:.3}; P=10: {:?} ({} MC radii)",
            one.radius,
            one.case_label,
            one.objective,
            omni_one,
            best[0].1,
            three.radius,
            three.case_label,
            best[1].1,
            ten.case_label,
            grid.len()
        ),
    )
}

fn nondecreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0] - 1e-12 * w[0].abs())
}

fn nonincreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs())
}

fn trends() -> Outcome {
    let th = 1e-4;
    let sectors: Vec<u32> = (2..=8).collect();
    let densities: Vec<f64> = (1..=16).map(|i| i as f64 / 10.0).collect();
    let powers = [2.0, 4.0, 6.0, 8.0];
    let mut failures = Vec::new();
    for pw in powers {
        let base = fig2().with_pb_power(pw);
        let by_n: Vec<_> = sectors
            .iter()
            .map(|&n| radopt::optimal_radius_mean(&base.with_sectors(n)).unwrap())
            .collect();
        let by_ls: Vec<_> = densities
            .iter()
            .map(|&ls| radopt::optimal_radius_mean(&base.with_sn_density(ls)).unwrap())
            .collect();
        let radius = |v: &[radopt::RadiusOptimum]| v.iter().map(|o| o.radius).collect::<Vec<_>>();
        let value = |v: &[radopt::RadiusOptimum]| v.iter().map(|o| o.objective).collect::<Vec<_>>();
        if !nondecreasing(&radius(&by_n)) || !nondecreasing(&value(&by_n)) {
            failures.push(format!("mean optimum vs N at P={pw}"));
        }
        if !nonincreasing(&radius(&by_ls)) || !nonincreasing(&value(&by_ls)) {
            failures.push(format!("mean optimum vs λ_s at P={pw}"));
        }
        let active_n: Vec<f64> = sectors
            .iter()
            .map(|&n| radopt::optimal_radius_active(&base.with_sectors(n), th).unwrap().objective)
            .collect();
        let active_ls: Vec<f64> = densities
            .iter()
            .map(|&ls| radopt::optimal_radius_active(&base.with_sn_density(ls), th).unwrap().objective)
            .collect();
        if !nondecreasing(&active_n) {
            failures.push(format!("active optimum vs N at P={pw}"));
        }
        if !nonincreasing(&active_ls) {
            failures.push(format!("active optimum vs λ_s at P={pw}"));
        }
    }
    let by_power: Vec<f64> = [1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0]
        .iter()
        .map(|&pw| radopt::optimal_radius_active(&fig2().with_pb_power(pw), th).unwrap().objective)
        .collect();
    if !nondecreasing(&by_power) {
        failures.push("active optimum vs P_p".into());
    }
    let detail = if failures.is_empty() {
        "all sweeps monotone over N 2..8, λ_s 0.1..1.6, P_p 1..10".to_string()
    } else {
        format!("violations: {}", failures.join(", "))
    };
    outcome(failures.is_empty(), detail)
}

fn scheme_ordering() -> Outcome {
    let base = fig2();
    let rho = radopt::optimal_radius_mean(&base).unwrap().radius;
    let config = SimConfig::default().with_trials(20_000).with_seed(SEED);
    let report = bench::compare_schemes(&base.with_charging_radius(rho), &[2.0, 6.0, 10.0], &config)
        .expect("simulation runs");
    let failed: Vec<String> = report
        .verdicts
        .iter()
        .filter(|v| !v.holds)
        .map(|v| {
            format!(
                "{} {:?}≥{:?} at P={} (diff {:.3e}, se {:.3e})",
                v.metric, v.higher, v.lower, v.pb_power, v.mean_difference, v.std_error
            )
        })
        .collect();
    let strict = report.verdicts.iter().filter(|v| v.strict).count();
    let detail = if failed.is_empty() {
        format!(
            "{} orderings hold at ρ*={rho:.3} ({strict} significantly positive)",
            report.verdicts.len()
        )
    } else {
        format!("failed: {}", failed.join("; "))
    };
    outcome(failed.is_empty(), detail)
}

fn read_dir_bytes(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut ok = true;
    let mut checked = 0usize;
    for (id, trials) in [(FigureId::Fig2, 2_000), (FigureId::Fig4, 300), (FigureId::Fig8, 1_000)] {
        let mut outputs = Vec::new();
        for workers in [1, 4] {
            let dir = tmp.path().join(format!("{id}_{workers}"));
            let spec = ExperimentSpec {
                seed: 99,
                trials: Some(trials),
                workers: Some(workers),
                ..ExperimentSpec::new(id, &dir)
            };
            bench::run_figure(&spec).expect("figure runs");
            outputs.push(read_dir_bytes(&dir));
        }
        checked += outputs[0].len();
        ok &= outputs[0] == outputs[1];
    }
    let mut csv = Vec::new();
    for workers in [1, 3] {
        let config = SimConfig::default().with_trials(2_000).with_seed(99).with_workers(workers);
        let s = run_trials(&fig2(), &config).unwrap();
        let mut buf = Vec::new();
        mcsim::write_samples_csv(&mut buf, &s.samples).unwrap();
        csv.push(buf);
    }
    ok &= csv[0] == csv[1];
    outcome(ok, format!("{checked} figure files and the samples CSV byte-identical for 1 vs many workers"))
}

fn main() {
    // Respect test filters passed by `cargo test <filter>`: run only when no
    // filter is given or the filter names this suite.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    if std::env::args().any(|a| a == "--list") {
        return;
    }

    let mut failures = 0;
    let mut report = |id: usize, name: &str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let mark = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {mark} {name}: {} [{:.1}s]",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.passed {
            failures += 1;
        }
    };
    report(1, "closed-form Laplace vs quadrature", &laplace_vs_quadrature);
    let sweep = mean_variance_sweep();
    report(2, "simulated mean", &|| mean_validation(&sweep));
    report(3, "simulated variance", &|| variance_validation(&sweep));
    report(4, "Gamma CCDF fit", &gamma_ccdf_fit);
    report(5, "branch continuity", &branch_continuity);
    report(6, "degeneracy", &degeneracy);
    report(7, "dominance and identities", &dominance);
    report(8, "mean-optimal radius cases", &algorithm1);
    report(9, "active-optimal radius cases", &algorithm2);
    report(10, "optimum trends", &trends);
    report(11, "allocation scheme ordering", &scheme_ordering);
    report(12, "determinism", &determinism);
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 12 acceptance criteria passed");
}
