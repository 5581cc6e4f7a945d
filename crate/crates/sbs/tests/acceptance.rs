//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured numbers. Run with
//!
//! ```text
//! cargo test --release --test acceptance -- --nocapture
//! ```
//!
//! to see the lines (the release profile keeps every criterion inside its
//! runtime budget).

use sbs::analysis::{
    self, estimate_learnability, gambler_ruin_success, iid_mass_check, initial_wealth_check,
    jump_chain_stats,
};
use sbs::coupling::coupling_error;
use sbs::dynamics::{
    simulate, Backend, InitialCondition, ModelParams, RunConfig, SimOutput,
};
use sbs::graph::GraphTopology;
use sbs::meanfield::{convergence_bound, drift, integrate, OdeState};
use sbs::seeding::run_replications;

fn figure_params() -> ModelParams {
    ModelParams::new(vec![0.8, 0.4], 0.2, 1.0).unwrap()
}

fn report(id: &str, name: &str, pass: bool, detail: String) {
    println!(
        "[acceptance] {id} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{id} {name}: {detail}");
}

#[test]
fn c01_ode_conservation_and_fixed_point() {
    let params = figure_params();
    let traj = integrate(&OdeState::all_undecided(2), &params, 50.0, 1e-3).unwrap();
    let max_mass_dev = traj
        .grid()
        .map(|(_, y)| (y.iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    let target = OdeState::new(vec![0.0, 1.0, 0.0]).unwrap();
    let drift_norm = drift(&target, &params)
        .unwrap()
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max);
    let pass = max_mass_dev <= 1e-9 && drift_norm <= 1e-14;
    report(
        "C01",
        "ode-conservation-and-fixed-point",
        pass,
        format!("max |sum y - 1| = {max_mass_dev:.3e}, |drift(0,1,0)| = {drift_norm:.3e}"),
    );
}

#[test]
fn c02_exponential_convergence_bound() {
    let params = figure_params();
    let y0 = OdeState::all_undecided(2);
    let bound = convergence_bound(&params, &y0, 0.5).unwrap();
    // R reduces to p1 - p2 here, which is exact in f64; the delay formula
    // and ln(2)/0.12 differ only in association order, so allow a few ulp.
    let rate_exact = bound.rate() == 0.4;
    let delay_target = std::f64::consts::LN_2 / 0.12;
    let delay_exact = (bound.delay() - delay_target).abs() <= 1e-14;

    let traj = integrate(&y0, &params, 50.0, 1e-3).unwrap();
    let mut worst_margin = f64::INFINITY;
    let mut y1_at_30 = 0.0;
    for (t, y) in traj.grid() {
        if t >= bound.delay() {
            worst_margin = worst_margin.min(y[1] - bound.lower_bound_y1(t));
        }
        if (t - 30.0).abs() < 1e-9 {
            y1_at_30 = y[1];
        }
    }
    let pass = rate_exact && delay_exact && worst_margin >= -1e-6 && y1_at_30 >= 0.99;
    report(
        "C02",
        "exponential-convergence-bound",
        pass,
        format!(
            "R = {} (exact: {rate_exact}), t_c = {} vs ln2/0.12 = {delay_target} \
             (exact: {delay_exact}), min(y1 - bound) on [t_c, 50] = {worst_margin:.3e}, \
             y1(30) = {y1_at_30:.6}",
            bound.rate(),
            bound.delay()
        ),
    );
}

#[test]
fn c03_learnability_regular_branch() {
    let graph = GraphTopology::build_complete(20).unwrap();
    let params = ModelParams::new(vec![0.8, 0.4], 0.0, 1.0).unwrap();
    let init = InitialCondition::Counts(vec![0, 10, 10]);
    let est = estimate_learnability(&graph, &params, &init, 500, 200.0, 11).unwrap();
    let decided = est.successes + est.failures;
    let se = (est.point_estimate * (1.0 - est.point_estimate) / decided as f64).sqrt();
    let threshold = 0.9990 - 3.0 * se;
    let bound = est.theoretical_lower_bound.unwrap();
    let pass = est.point_estimate >= threshold
        && (bound - (1.0 - 0.5f64.powi(10))).abs() <= 1e-12
        && est.timeouts == 0;
    report(
        "C03",
        "learnability-regular-branch",
        pass,
        format!(
            "estimate {} ({}/{decided}), threshold {threshold:.6}, bound {bound:.10}, timeouts {}",
            est.point_estimate, est.successes, est.timeouts
        ),
    );
}

fn absorption_runs(
    graph: &GraphTopology,
    params: &ModelParams,
    init: &InitialCondition,
    replications: u64,
    t_max: f64,
    base_seed: u64,
) -> Vec<SimOutput> {
    run_replications(replications, base_seed, |_, seed| {
        simulate(
            graph,
            params,
            init,
            &RunConfig {
                t_max,
                seed,
                backend: Backend::Behavioral,
                record_grid: t_max,
                record_jumps: true,
                stop_on_absorption: true,
            },
        )
        .unwrap()
    })
}

#[test]
fn c04_jump_chain_drift() {
    let graph = GraphTopology::build_complete(20).unwrap();
    let params = ModelParams::new(vec![0.8, 0.4], 0.0, 1.0).unwrap();
    let init = InitialCondition::Counts(vec![0, 10, 10]);
    let outputs = absorption_runs(&graph, &params, &init, 500, 200.0, 11);
    let stats = jump_chain_stats(&outputs, &graph, &params).unwrap();
    let bound = stats.up_probability_bound.unwrap();
    let threshold = bound - stats.wilson_ci_95.half_width();
    let pass = stats.num_jumps >= 10_000 && stats.up_fraction >= threshold;
    report(
        "C04",
        "jump-chain-drift",
        pass,
        format!(
            "up fraction {:.5} over {} jumps, one-sided threshold {threshold:.5} \
             (bound 2/3, Wilson half-width {:.5})",
            stats.up_fraction,
            stats.num_jumps,
            stats.wilson_ci_95.half_width()
        ),
    );
}

/// Independent oracle: absorption probabilities of the biased walk by a
/// tridiagonal (Thomas) solve of u(z) = p u(z+1) + (1-p) u(z-1).
fn absorption_by_linear_solve(p: f64, n: usize) -> Vec<f64> {
    let mut diag = vec![1.0; n + 1];
    let mut lower = vec![0.0; n + 1];
    let mut upper = vec![0.0; n + 1];
    let mut rhs = vec![0.0; n + 1];
    rhs[n] = 1.0;
    for z in 1..n {
        lower[z] = -(1.0 - p);
        upper[z] = -p;
    }
    for z in 1..=n {
        let m = lower[z] / diag[z - 1];
        diag[z] -= m * upper[z - 1];
        rhs[z] -= m * rhs[z - 1];
    }
    let mut u = vec![0.0; n + 1];
    u[n] = rhs[n] / diag[n];
    for z in (0..n).rev() {
        u[z] = (rhs[z] - upper[z] * u[z + 1]) / diag[z];
    }
    u
}

#[test]
fn c05_gamblers_ruin_oracle_equivalence() {
    let mut worst = 0.0f64;
    let mut bound_violation = 0.0f64;
    let mut cases = 0u64;
    for i in 0..12 {
        let p = 0.51 + 0.04 * i as f64;
        for n in 1..=50usize {
            let solved = absorption_by_linear_solve(p, n);
            for (z0, &linear) in solved.iter().enumerate() {
                let ruin = gambler_ruin_success(p, z0 as u64, n as u64).unwrap();
                worst = worst.max((ruin.exact - linear).abs());
                bound_violation = bound_violation.max(ruin.lower_bound - ruin.exact);
                cases += 1;
            }
        }
    }
    let pass = worst <= 1e-12 && bound_violation <= 1e-15;
    report(
        "C05",
        "gamblers-ruin-oracle-equivalence",
        pass,
        format!(
            "{cases} cases, max |closed form - linear solve| = {worst:.3e}, \
             max (bound - exact) = {bound_violation:.3e}"
        ),
    );
}

#[test]
fn c06_meanfield_tracking() {
    let graph = GraphTopology::build_complete(200).unwrap();
    let params = figure_params();
    let ode = integrate(&OdeState::all_undecided(2), &params, 30.0, 1e-3).unwrap();
    let reference: Vec<f64> = (0..=300)
        .map(|i| ode.eta_component_at(1, i as f64 * 0.1))
        .collect();
    let sups: Vec<f64> = run_replications(100, 1, |_, seed| {
        let out = simulate(
            &graph,
            &params,
            &InitialCondition::Iid(vec![1.0, 0.0, 0.0]),
            &RunConfig {
                t_max: 30.0,
                seed,
                backend: Backend::Behavioral,
                record_grid: 0.1,
                record_jumps: false,
                stop_on_absorption: false,
            },
        )
        .unwrap();
        out.trajectory
            .iter()
            .zip(&reference)
            .map(|((_, z), y1)| (z[1] as f64 / 200.0 - y1).abs())
            .fold(0.0, f64::max)
    });
    let within = sups.iter().filter(|&&s| s <= 0.1).count();
    let mut sorted = sups.clone();
    sorted.sort_by(f64::total_cmp);
    let mean = sups.iter().sum::<f64>() / sups.len() as f64;
    // Known red: the 0.1-for-90% tolerance sits below the chain's intrinsic
    // fluctuation scale at N = 200. An independent occupancy-level Gillespie
    // oracle puts the 90th percentile of the sup near 0.14 while the
    // empirical mean curve matches the integrated limit to 5e-3, so the gap
    // is fluctuation, not implementation error. The threshold is kept
    // unweakened; the printed distribution documents the shortfall.
    let pass = within >= 90;
    report(
        "C06",
        "meanfield-tracking",
        pass,
        format!(
            "{within}/100 seeds within 0.1; sup-deviation mean {mean:.4}, \
             median {:.4}, 90th percentile {:.4}, max {:.4}",
            sorted[49], sorted[89], sorted[99]
        ),
    );
}

#[test]
fn c07_coupling_trend() {
    let params = figure_params();
    let q = [1.0, 0.0, 0.0];
    let mut rows = Vec::new();
    for n in [10usize, 40, 160] {
        let graph = GraphTopology::build_complete(n).unwrap();
        let report = coupling_error(&graph, &params, &q, 2.0, 300, 7).unwrap();
        let p_hat = report.max_error / 2.0;
        let se = 2.0 * (p_hat * (1.0 - p_hat) / 300.0).sqrt();
        assert!(report.vacuous, "desk-scale bound must be flagged vacuous");
        rows.push((n, report.max_error, se));
    }
    let mut inversions = 0;
    let mut beyond_tolerance = false;
    for pair in rows.windows(2) {
        let (_, prev, se_prev) = pair[0];
        let (_, next, se_next) = pair[1];
        if next > prev {
            inversions += 1;
            if next - prev > 2.0 * (se_prev * se_prev + se_next * se_next).sqrt() {
                beyond_tolerance = true;
            }
        }
    }
    let pass = inversions <= 1 && !beyond_tolerance;
    report(
        "C07",
        "coupling-trend",
        pass,
        format!(
            "max errors {:?} (N = 10/40/160), inversions {inversions}, bound vacuous as reported",
            rows.iter().map(|r| r.1).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn c08_backend_distributional_equivalence() {
    let graph = GraphTopology::build_complete(10).unwrap();
    let params = figure_params();
    let init = InitialCondition::Iid(vec![1.0, 0.0, 0.0]);
    let runs = 2000u64;
    let collect = |backend: Backend| -> Vec<(f64, f64)> {
        run_replications(runs, 31, |_, seed| {
            let out = simulate(
                &graph,
                &params,
                &init,
                &RunConfig {
                    t_max: 5.0,
                    seed,
                    backend,
                    record_grid: 5.0,
                    record_jumps: false,
                    stop_on_absorption: false,
                },
            )
            .unwrap();
            let z = out.final_state.occupancy();
            (z[1] as f64, z[0] as f64)
        })
    };
    let behavioral = collect(Backend::Behavioral);
    let pathwise = collect(Backend::Pathwise);
    let mean_var = |samples: &[f64]| {
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
            / (samples.len() - 1) as f64;
        (mean, var)
    };
    let mut detail = String::new();
    let mut pass = true;
    for (label, pick) in [("Z1", 0usize), ("Z0", 1usize)] {
        let b: Vec<f64> = behavioral
            .iter()
            .map(|&(z1, z0)| if pick == 0 { z1 } else { z0 })
            .collect();
        let p: Vec<f64> = pathwise
            .iter()
            .map(|&(z1, z0)| if pick == 0 { z1 } else { z0 })
            .collect();
        let (mb, vb) = mean_var(&b);
        let (mp, vp) = mean_var(&p);
        let se = ((vb + vp) / runs as f64).sqrt();
        let ok = (mb - mp).abs() <= 3.0 * se;
        pass &= ok;
        detail.push_str(&format!(
            "{label}: behavioral {mb:.4} vs pathwise {mp:.4} (3 SE = {:.4}); ",
            3.0 * se
        ));
    }
    report("C08", "backend-distributional-equivalence", pass, detail);
}

#[test]
fn c09_counterexamples() {
    // Circular graph with contiguous blocks: the best-arm count is a
    // birth-death chain whose conditional up-probability is exactly
    // p1/(p1+p2) = 2/3 while the blocks persist (they persist forever).
    let params = figure_params();
    let (graph, init) = analysis::scenario_example1(100).unwrap();
    let outputs = absorption_runs(&graph, &params, &init, 100, 300.0, 17);
    let stats = jump_chain_stats(&outputs, &graph, &params).unwrap();
    let target = 2.0 / 3.0;
    let se = (target * (1.0 - target) / stats.num_jumps as f64).sqrt();
    let ex1_ok = (stats.up_fraction - target).abs() <= 3.0 * se;

    // Forest of 2-agent cliques with wrong-arm mass at the start: almost
    // every replication leaves at least one component on the runner-up arm.
    let scenario = analysis::scenario_example2(1700).unwrap();
    let q = vec![0.2, 0.4, 0.4];
    let wrongs: Vec<bool> = run_replications(200, 5, |_, seed| {
        let out = simulate(
            &scenario.graph,
            &params,
            &InitialCondition::Iid(q.clone()),
            &RunConfig {
                t_max: 400.0,
                seed,
                backend: Backend::Behavioral,
                record_grid: 400.0,
                record_jumps: false,
                stop_on_absorption: true,
            },
        )
        .unwrap();
        out.absorption
            .per_component_consensus
            .as_ref()
            .map(|arms| arms.iter().any(|&a| a >= 2))
            .unwrap_or(false)
    });
    let wrong_fraction = wrongs.iter().filter(|&&w| w).count() as f64 / 200.0;
    let ex2_ok = wrong_fraction >= 0.9;

    report(
        "C09",
        "counterexamples",
        ex1_ok && ex2_ok,
        format!(
            "cycle up-fraction {:.5} vs 2/3 over {} jumps (3 SE = {:.5}); \
             wrong-consensus fraction {wrong_fraction:.3} over 200 runs of {} cliques",
            stats.up_fraction,
            stats.num_jumps,
            3.0 * se,
            scenario.num_components
        ),
    );
}

#[test]
fn c10_concentration_checks() {
    let graph = GraphTopology::build_complete(500).unwrap();
    let params = figure_params();
    let wealth = initial_wealth_check(&graph, &params, 1.0, 0.5, 1000, 3).unwrap();
    // The criterion pins the stricter 14.7-agent threshold (the scale
    // mu c0 p1 N / (e K) without the (1-C) factor); check it directly from
    // the recorded counts, alongside the operation's own threshold.
    let frac_pinned = wealth
        .z1_samples
        .iter()
        .filter(|&&z| z as f64 >= 14.7)
        .count() as f64
        / wealth.replications as f64;
    let wealth_ok = frac_pinned >= 0.195 && wealth.empirical_probability >= 0.195;

    let mass = iid_mass_check(100, &[0.5, 0.5, 0.0], 0.2, 5000, 9).unwrap();
    let mass_ok = mass.empirical_probability >= 0.999 && mass.threshold == 80.0;

    report(
        "C10",
        "concentration-checks",
        wealth_ok && mass_ok,
        format!(
            "P(Z1(1) >= 14.7) = {frac_pinned:.4} (>= 0.195), operation threshold {:.3} with \
             empirical {:.4} vs bound {:.4}; mass check P(Z0+Z1 >= 80) = {:.5} (>= 0.999, \
             bound {:.5})",
            wealth.threshold,
            wealth.empirical_probability,
            wealth.theoretical_lower_bound,
            mass.empirical_probability,
            mass.theoretical_lower_bound
        ),
    );
}

mod cli_support {
    use std::path::Path;
    use std::process::Command;

    pub fn run_cli(args: &[&str], dir: &Path) -> std::process::Output {
        Command::new(env!("CARGO_BIN_EXE_sbs"))
            .args(args)
            .current_dir(dir)
            .output()
            .expect("binary runs")
    }

    pub fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
        let mut entries: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        entries.sort();
        entries
    }
}

#[test]
fn c11_cli_determinism() {
    use cli_support::{dir_bytes, run_cli};
    let root = tempfile::tempdir().unwrap();
    let dir = root.path();

    let configs: &[(&str, &[&str], &str)] = &[
        (
            "simulate.toml",
            &["simulate"],
            r#"
seed = 42
[graph]
kind = "complete"
n = 12
[params]
rewards = [0.8, 0.4]
exploration = 0.2
clock_rate = 1.0
[init]
kind = "counts"
counts = [12, 0, 0]
[run]
t_max = 5.0
record_grid = 0.5
record_jumps = true
"#,
        ),
        (
            "meanfield.toml",
            &["meanfield"],
            r#"
y0 = [1.0, 0.0, 0.0]
t_end = 10.0
h = 0.001
[params]
rewards = [0.8, 0.4]
exploration = 0.2
clock_rate = 1.0
"#,
        ),
        (
            "compare.toml",
            &["compare"],
            r#"
seed = 7
[graph]
kind = "complete"
n = 20
[params]
rewards = [0.8, 0.4]
exploration = 0.2
clock_rate = 1.0
[init]
kind = "iid"
q = [1.0, 0.0, 0.0]
[run]
t_max = 5.0
record_grid = 0.5
"#,
        ),
        (
            "learnability.toml",
            &["learnability"],
            r#"
seed = 3
replications = 30
t_max = 120.0
[graph]
kind = "complete"
n = 8
[params]
rewards = [0.8, 0.4]
exploration = 0.0
clock_rate = 1.0
[init]
kind = "counts"
counts = [0, 4, 4]
"#,
        ),
        (
            "coupling.toml",
            &["coupling"],
            r#"
seed = 5
q = [1.0, 0.0, 0.0]
horizon = 1.5
replications = 40
[graph]
kind = "complete"
n = 10
[params]
rewards = [0.8, 0.4]
exploration = 0.2
clock_rate = 1.0
"#,
        ),
        (
            "scenario1.toml",
            &["scenario", "example1"],
            r#"
seed = 9
n = 20
replications = 20
t_max = 150.0
[params]
rewards = [0.8, 0.4]
exploration = 0.2
clock_rate = 1.0
"#,
        ),
        (
            "scenario2.toml",
            &["scenario", "example2"],
            r#"
seed = 13
n = 1700
replications = 2
t_max = 60.0
q = [0.2, 0.4, 0.4]
[params]
rewards = [0.8, 0.4]
exploration = 0.2
clock_rate = 1.0
"#,
        ),
    ];

    let mut all_ok = true;
    let mut detail = String::new();
    for (file, args, content) in configs {
        let config_path = dir.join(file);
        std::fs::write(&config_path, content.trim_start()).unwrap();
        let stem = file.trim_end_matches(".toml");
        let out_a = dir.join(format!("{stem}_a"));
        let out_b = dir.join(format!("{stem}_b"));
        for out in [&out_a, &out_b] {
            let mut full: Vec<&str> = args.to_vec();
            let config_str = config_path.to_str().unwrap();
            let out_str = out.to_str().unwrap();
            full.extend(["--config", config_str, "--out", out_str, "--jobs", "2"]);
            let status = run_cli(&full, dir);
            assert!(
                status.status.success(),
                "{stem}: {}",
                String::from_utf8_lossy(&status.stderr)
            );
        }
        let same = dir_bytes(&out_a) == dir_bytes(&out_b);
        all_ok &= same;
        detail.push_str(&format!("{stem}: {}; ", if same { "identical" } else { "DIFFERS" }));
    }
    report("C11", "cli-determinism", all_ok, detail);
}
