//! Joint simulation of the finite-population process and its i.i.d. limit
//! process on shared randomness, and measurement of how often the two ever
//! disagree.
//!
//! Both processes start from the same i.i.d. initial draw and consume the
//! same per-agent marked Poisson streams. The finite process maps each mark
//! through acceptance intervals built from neighbor fractions; the limit
//! process maps the identical mark through intervals built from the
//! deterministic marginal `eta(t)` (the integrated limit system started at
//! the same distribution), so its coordinates never read neighbor states and
//! are i.i.d. across agents.
//!
//! Per agent and replication the measured quantity is
//! `sup_t sum_k (X^N_{i,k}(t) - X_{i,k}(t))^2`, which is 2 exactly when the
//! two memories ever differ on the horizon and 0 otherwise.

use crate::dynamics::{
    init_state, mark_candidate, pathwise_transition, transition_width, InitialCondition,
    MarkedStreams, ModelParams,
};
use crate::error::{Error, Result};
use crate::graph::GraphTopology;
use crate::meanfield::{integrate, OdeState, OdeTrajectory};
use crate::seeding;

/// Step used to integrate `eta` for coupled runs; tighter than the general
/// default because `eta` errors shift the acceptance-interval boundaries.
pub const ETA_STEP: f64 = 1e-4;

/// Aggregated coupling measurement over replications.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingReport {
    /// Mean over replications of the per-agent sup-distance (each sample is
    /// 0 or 2).
    pub per_agent_error: Vec<f64>,
    pub max_error: f64,
    /// Closed-form bound `16(4+lam) lam K T (K+1) / sqrt(D_min) *
    /// exp(48 (4+lam) lam (K+1) T)`; astronomically large (often infinite in
    /// f64) at desk scale.
    pub theoretical_bound: f64,
    /// Set when the bound exceeds 2, the largest attainable error.
    pub vacuous: bool,
    pub replications: u64,
    pub horizon: f64,
}

/// Natural log of the coupling-error bound, usable even where the bound
/// itself overflows f64.
pub fn coupling_bound_ln(params: &ModelParams, min_degree: usize, horizon: f64) -> f64 {
    let lam = params.clock_rate();
    let k = params.num_arms() as f64;
    (16.0 * (4.0 + lam) * lam * k * horizon * (k + 1.0)).ln() - 0.5 * (min_degree as f64).ln()
        + 48.0 * (4.0 + lam) * lam * (k + 1.0) * horizon
}

/// The coupling-error bound itself; `inf` when it overflows.
pub fn coupling_bound(params: &ModelParams, min_degree: usize, horizon: f64) -> f64 {
    coupling_bound_ln(params, min_degree, horizon).exp()
}

pub(crate) fn coupled_run(
    graph: &GraphTopology,
    params: &ModelParams,
    eta: &OdeTrajectory,
    horizon: f64,
    seed: u64,
) -> Result<(Vec<f64>, Vec<u8>, Vec<u8>)> {
    let n = graph.num_agents();
    let k = params.num_arms();
    let initial = init_state(n, k, &InitialCondition::Iid(eta_origin(eta)), seed)?;
    let mut finite: Vec<u8> = initial.memories().to_vec();
    let mut limit: Vec<u8> = finite.clone();
    let mut diverged = vec![false; n];

    let mut streams = MarkedStreams::new(seed, n, params.clock_rate(), k);
    while let Some(event) = streams.next_before(horizon) {
        let agent = event.agent as usize;
        if let Some((_, to)) = pathwise_transition(&finite, graph, params, agent, event.mark) {
            finite[agent] = to;
        }
        let (candidate, offset) = mark_candidate(event.mark, k);
        let share = eta.eta_component_at(candidate, event.t);
        let width = transition_width(limit[agent], candidate, share, params);
        if offset < width {
            limit[agent] = candidate as u8;
        }
        if finite[agent] != limit[agent] {
            diverged[agent] = true;
        }
    }
    let errors = diverged
        .iter()
        .map(|&d| if d { 2.0 } else { 0.0 })
        .collect();
    Ok((errors, finite, limit))
}

fn eta_origin(eta: &OdeTrajectory) -> Vec<f64> {
    eta.grid().next().map(|(_, y)| y.to_vec()).unwrap()
}

/// One coupled replication from the i.i.d. initial distribution `q`:
/// returns, per agent, `2 * 1{the two paths ever differed on [0, horizon]}`.
pub fn simulate_coupled(
    graph: &GraphTopology,
    params: &ModelParams,
    q: &[f64],
    horizon: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if horizon <= 0.0 || !horizon.is_finite() {
        return Err(Error::NonPositiveHorizon(horizon));
    }
    let eta = integrate(&OdeState::new(q.to_vec())?, params, horizon, ETA_STEP)?;
    coupled_run(graph, params, &eta, horizon, seed).map(|(errors, _, _)| errors)
}

/// Averages [`simulate_coupled`] over replications with split seeds and
/// attaches the closed-form bound.
pub fn coupling_error(
    graph: &GraphTopology,
    params: &ModelParams,
    q: &[f64],
    horizon: f64,
    replications: u64,
    base_seed: u64,
) -> Result<CouplingReport> {
    if replications == 0 {
        return Err(Error::NoReplications);
    }
    if horizon <= 0.0 || !horizon.is_finite() {
        return Err(Error::NonPositiveHorizon(horizon));
    }
    let eta = integrate(&OdeState::new(q.to_vec())?, params, horizon, ETA_STEP)?;
    let n = graph.num_agents();
    let per_rep: Vec<Result<Vec<f64>>> =
        seeding::run_replications(replications, base_seed, |_, seed| {
            coupled_run(graph, params, &eta, horizon, seed).map(|(errors, _, _)| errors)
        });
    let mut per_agent_error = vec![0.0; n];
    for rep in per_rep {
        let errors = rep?;
        for (acc, e) in per_agent_error.iter_mut().zip(&errors) {
            *acc += e;
        }
    }
    for e in per_agent_error.iter_mut() {
        *e /= replications as f64;
    }
    let max_error = per_agent_error.iter().cloned().fold(0.0, f64::max);
    let theoretical_bound = coupling_bound(params, graph.min_degree(), horizon);
    Ok(CouplingReport {
        per_agent_error,
        max_error,
        vacuous: theoretical_bound > 2.0,
        theoretical_bound,
        replications,
        horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{simulate, Backend, RunConfig};

    fn figure_params() -> ModelParams {
        ModelParams::new(vec![0.8, 0.4], 0.2, 1.0).unwrap()
    }

    #[test]
    fn absorbed_profile_never_diverges() {
        let g = GraphTopology::build_complete(8).unwrap();
        let report =
            coupling_error(&g, &figure_params(), &[0.0, 1.0, 0.0], 3.0, 50, 11).unwrap();
        assert_eq!(report.max_error, 0.0);
        assert!(report.per_agent_error.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn zero_rewards_freeze_both_processes() {
        let g = GraphTopology::build_cycle(6).unwrap();
        let params = ModelParams::new(vec![0.0], 0.5, 1.0).unwrap();
        let report = coupling_error(&g, &params, &[0.6, 0.4], 2.0, 40, 3).unwrap();
        assert_eq!(report.max_error, 0.0);
    }

    #[test]
    fn single_replication_errors_are_zero_or_two() {
        let g = GraphTopology::build_complete(6).unwrap();
        let errors = simulate_coupled(&g, &figure_params(), &[1.0, 0.0, 0.0], 2.0, 5).unwrap();
        assert!(errors.iter().all(|&e| e == 0.0 || e == 2.0), "{errors:?}");
    }

    #[test]
    fn small_graph_diverges_but_stays_below_bound() {
        let g = GraphTopology::build_complete(2).unwrap();
        let report =
            coupling_error(&g, &figure_params(), &[1.0, 0.0, 0.0], 2.0, 500, 21).unwrap();
        assert!(report.max_error > 0.0, "expected some divergence at N = 2");
        assert!(report.max_error as f64 <= report.theoretical_bound);
        assert!(report.vacuous, "desk-scale bound should be vacuous");
    }

    #[test]
    fn bound_value_and_monotonicity() {
        // lam = 1, K = 2, T = 1, D_min = 9: prefactor 16*5*2*3/3 = 160 and
        // exponent 48*5*3 = 720.
        let params = figure_params();
        let ln_bound = coupling_bound_ln(&params, 9, 1.0);
        assert!((ln_bound - (160.0f64.ln() + 720.0)).abs() <= 1e-9);
        assert!(coupling_bound(&params, 9, 1.0).is_infinite());
        // Monotone decreasing in the minimum degree.
        assert!(
            coupling_bound_ln(&params, 9, 1.0) > coupling_bound_ln(&params, 16, 1.0)
        );
    }

    #[test]
    fn finite_half_matches_pathwise_backend_bitwise() {
        let g = GraphTopology::build_random_regular(12, 3, 2, true).unwrap();
        let params = figure_params();
        let q = [0.5, 0.25, 0.25];
        let horizon = 4.0;
        let seed = 99;
        let eta = integrate(&OdeState::new(q.to_vec()).unwrap(), &params, horizon, ETA_STEP)
            .unwrap();
        let (_, finite, _) = coupled_run(&g, &params, &eta, horizon, seed).unwrap();
        let out = simulate(
            &g,
            &params,
            &InitialCondition::Iid(q.to_vec()),
            &RunConfig {
                t_max: horizon,
                seed,
                backend: Backend::Pathwise,
                record_grid: 1.0,
                record_jumps: true,
                stop_on_absorption: false,
            },
        )
        .unwrap();
        assert_eq!(out.final_state.memories(), finite.as_slice());
    }

    #[test]
    fn replications_are_seed_deterministic() {
        let g = GraphTopology::build_complete(5).unwrap();
        let a = coupling_error(&g, &figure_params(), &[1.0, 0.0, 0.0], 1.5, 30, 7).unwrap();
        let b = coupling_error(&g, &figure_params(), &[1.0, 0.0, 0.0], 1.5, 30, 7).unwrap();
        assert_eq!(a, b);
    }
}
