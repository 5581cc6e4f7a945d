//! Statistical verification harness: absorption-probability estimation with
//! Wilson intervals and the matching closed-form lower bounds, jump-chain
//! drift checks, the gambler's-ruin oracle, early-wealth and i.i.d.-mass
//! concentration checks, and the two structured counterexample scenarios
//! (a circular graph with adversarial contiguous blocks, and a forest of
//! tiny cliques).

use crate::dynamics::{
    init_state, simulate, AbsorptionStatus, Backend, InitialCondition, ModelParams, RunConfig,
    SimOutput,
};
use crate::error::{Error, Result};
use crate::graph::GraphTopology;
use crate::seeding;

/// Biased walk on `{0, ..., n}` absorbed at both ends: up-move probability
/// `p_star`, start `z0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomWalkModel {
    pub p_star: f64,
    pub n: u64,
    pub z0: u64,
}

impl RandomWalkModel {
    /// Probability of absorbing at `n` (rather than 0), with the matching
    /// barrier-free lower bound.
    pub fn success_probability(&self) -> Result<RuinProbability> {
        gambler_ruin_success(self.p_star, self.z0, self.n)
    }
}

/// Exact absorption probability at the upper barrier together with the
/// barrier-free lower bound used by the learnability guarantees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuinProbability {
    /// `(1 - r^z0) / (1 - r^n)` with `r = (1-p)/p`, or `z0/n` at `p = 1/2`.
    pub exact: f64,
    /// `1 - r^z0`: the probability of ever falling to 0 is at most `r^z0`
    /// regardless of the upper barrier, so `exact >= lower_bound` always.
    pub lower_bound: f64,
}

/// Success probability of the biased gambler's-ruin walk.
pub fn gambler_ruin_success(p: f64, z0: u64, n: u64) -> Result<RuinProbability> {
    if !p.is_finite() || p <= 0.0 || p >= 1.0 {
        return Err(Error::RuinProbabilityOutOfRange(p));
    }
    if n < 1 || z0 > n {
        return Err(Error::RuinDomain { z0, n });
    }
    if p == 0.5 {
        // r = 1: the exact value degenerates to z0/n and the bound to 0.
        return Ok(RuinProbability {
            exact: z0 as f64 / n as f64,
            lower_bound: 0.0,
        });
    }
    let ln_r = ((1.0 - p) / p).ln();
    // 1 - r^m computed as -expm1(m ln r) for accuracy near r = 1.
    let one_minus_pow = |m: u64| -f64::exp_m1(m as f64 * ln_r);
    Ok(RuinProbability {
        exact: one_minus_pow(z0) / one_minus_pow(n),
        lower_bound: one_minus_pow(z0),
    })
}

/// Two-sided 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilsonInterval {
    pub lo: f64,
    pub hi: f64,
}

impl WilsonInterval {
    pub fn half_width(&self) -> f64 {
        (self.hi - self.lo) / 2.0
    }
}

/// Wilson 95% score interval for `successes` out of `trials`. Chosen over
/// the Wald interval because the success probabilities of interest sit next
/// to 1, exactly where Wald degenerates.
pub fn wilson_interval_95(successes: u64, trials: u64) -> WilsonInterval {
    if trials == 0 {
        return WilsonInterval { lo: 0.0, hi: 1.0 };
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    WilsonInterval {
        lo: (center - half).max(0.0),
        hi: (center + half).min(1.0),
    }
}

/// Heuristic horizon for absorption runs: `50 ln(N) / lambda` (absorption
/// occurred within this budget in >99% of pilot runs up to N = 500).
pub fn default_t_max(n: usize, clock_rate: f64) -> f64 {
    50.0 * (n as f64).ln() / clock_rate
}

/// Outcome counts of repeated absorption runs. Timed-out replications are
/// excluded from the success-rate denominator and reported separately,
/// since a finite run cannot decide the limit event.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnabilityEstimate {
    pub successes: u64,
    pub failures: u64,
    pub timeouts: u64,
    pub point_estimate: f64,
    pub wilson_ci_95: WilsonInterval,
    /// Gambler's-ruin lower bound on the success probability, attached when
    /// the hypotheses hold (connected graph, deterministic initial count of
    /// best-arm holders; regular branch, or doubly-stochastic branch with
    /// `mu <= 1 - p2/p1`).
    pub theoretical_lower_bound: Option<f64>,
    pub replications: u64,
}

fn deterministic_initial_best_count(init: &InitialCondition) -> Option<u64> {
    match init {
        InitialCondition::Explicit(mem) => {
            Some(mem.iter().filter(|&&m| m == 1).count() as u64)
        }
        InitialCondition::Counts(z) => z.get(1).copied(),
        InitialCondition::Iid(_) => None,
    }
}

/// Lower bound attached to learnability runs, when one applies.
fn learnability_bound(
    graph: &GraphTopology,
    params: &ModelParams,
    init: &InitialCondition,
) -> Option<f64> {
    let z0 = deterministic_initial_best_count(init)?;
    if !graph.is_connected() {
        return None;
    }
    let p1 = params.reward(1);
    let p2 = params.second_reward();
    let mu = params.exploration();
    let k = params.num_arms() as f64;
    if p1 <= 0.0 {
        return None;
    }
    let effective_p1 = if graph.is_regular().is_some() {
        p1
    } else if graph.is_doubly_stochastic(crate::graph::DOUBLY_STOCHASTIC_TOL) && mu <= 1.0 - p2 / p1 {
        (1.0 - mu + mu / k) * p1
    } else {
        return None;
    };
    if p2 == 0.0 {
        // The walk can only move up; any initial holder forces success.
        return Some(if z0 == 0 { 0.0 } else { 1.0 });
    }
    let p_star = effective_p1 / (effective_p1 + p2);
    Some(1.0 - ((1.0 - p_star) / p_star).powf(z0 as f64))
}

/// Estimates the probability that every agent ends up preferring the best
/// arm, over `replications` independent runs stopped at absorption or
/// `t_max`.
pub fn estimate_learnability(
    graph: &GraphTopology,
    params: &ModelParams,
    init: &InitialCondition,
    replications: u64,
    t_max: f64,
    base_seed: u64,
) -> Result<LearnabilityEstimate> {
    if replications == 0 {
        return Err(Error::NoReplications);
    }
    if graph.is_regular().is_none() && !graph.is_doubly_stochastic(crate::graph::DOUBLY_STOCHASTIC_TOL) {
        log::warn!("graph is neither regular nor doubly-stochastic; no guarantee applies");
    } else if graph.is_regular().is_none()
        && params.exploration() > 1.0 - params.second_reward() / params.reward(1)
    {
        log::warn!(
            "exploration rate {} exceeds 1 - p2/p1; the doubly-stochastic guarantee does not cover it",
            params.exploration()
        );
    }
    let statuses: Vec<Result<AbsorptionStatus>> =
        seeding::run_replications(replications, base_seed, |_, seed| {
            let cfg = RunConfig {
                t_max,
                seed,
                backend: Backend::Behavioral,
                record_grid: t_max,
                record_jumps: false,
                stop_on_absorption: true,
            };
            simulate(graph, params, init, &cfg).map(|out| out.absorption.status)
        });
    let mut successes = 0;
    let mut failures = 0;
    let mut timeouts = 0;
    for status in statuses {
        match status? {
            AbsorptionStatus::AbsorbedSuccess => successes += 1,
            AbsorptionStatus::AbsorbedOther | AbsorptionStatus::Frozen => failures += 1,
            AbsorptionStatus::TimedOut => timeouts += 1,
        }
    }
    let decided = successes + failures;
    let point_estimate = if decided > 0 {
        successes as f64 / decided as f64
    } else {
        f64::NAN
    };
    Ok(LearnabilityEstimate {
        successes,
        failures,
        timeouts,
        point_estimate,
        wilson_ci_95: wilson_interval_95(successes, decided),
        theoretical_lower_bound: learnability_bound(graph, params, init),
        replications,
    })
}

/// Pooled statistics of the embedded ±1 walk of the best-arm count.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpChainStats {
    pub num_jumps: u64,
    pub up_fraction: f64,
    pub wilson_ci_95: WilsonInterval,
    /// Lower bound on the conditional up-move probability: `p1/(p1+p2)` on
    /// regular graphs, `((1-mu+mu/K)p1) / ((1-mu+mu/K)p1 + p2)` on
    /// doubly-stochastic ones.
    pub up_probability_bound: Option<f64>,
}

/// Pools the recorded jump chains of several runs.
pub fn jump_chain_stats(
    outputs: &[SimOutput],
    graph: &GraphTopology,
    params: &ModelParams,
) -> Result<JumpChainStats> {
    let mut ups = 0u64;
    let mut total = 0u64;
    for out in outputs {
        for &(_, dir) in &out.jump_chain {
            total += 1;
            if dir > 0 {
                ups += 1;
            }
        }
    }
    if total == 0 {
        return Err(Error::NoJumps);
    }
    let p1 = params.reward(1);
    let p2 = params.second_reward();
    let mu = params.exploration();
    let k = params.num_arms() as f64;
    let up_probability_bound = if graph.is_regular().is_some() {
        Some(p1 / (p1 + p2))
    } else if graph.is_doubly_stochastic(crate::graph::DOUBLY_STOCHASTIC_TOL) {
        let eff = (1.0 - mu + mu / k) * p1;
        Some(eff / (eff + p2))
    } else {
        None
    };
    Ok(JumpChainStats {
        num_jumps: total,
        up_fraction: ups as f64 / total as f64,
        wilson_ci_95: wilson_interval_95(ups, total),
        up_probability_bound,
    })
}

/// Early-wealth concentration measurement: fraction of replications in which
/// the best-arm count at `t = 1/lambda` reaches the threshold
/// `(1-C) mu c0 p1 N / (e K)`, against the Hoeffding-style lower bound
/// `1 - exp(-2 (C mu c0 p1 / (e K))^2 N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WealthCheck {
    pub threshold: f64,
    pub empirical_probability: f64,
    pub theoretical_lower_bound: f64,
    pub replications: u64,
    /// Best-arm counts at `t = 1/lambda`, one per replication.
    pub z1_samples: Vec<u64>,
}

/// Runs the early-wealth check. The initial condition seeds `ceil(c0 N)`
/// undecided agents (the rest, if any, start on the worst arm).
pub fn initial_wealth_check(
    graph: &GraphTopology,
    params: &ModelParams,
    c0: f64,
    big_c: f64,
    replications: u64,
    base_seed: u64,
) -> Result<WealthCheck> {
    if params.exploration() == 0.0 {
        return Err(Error::WealthNeedsExploration);
    }
    if !big_c.is_finite() || big_c <= 0.0 || big_c >= 1.0 {
        return Err(Error::COutOfRange(big_c));
    }
    if !c0.is_finite() || c0 <= 0.0 || c0 > 1.0 {
        return Err(Error::C0OutOfRange(c0));
    }
    if replications == 0 {
        return Err(Error::NoReplications);
    }
    let n = graph.num_agents();
    let k = params.num_arms();
    let undecided = (c0 * n as f64).ceil() as u64;
    let mut counts = vec![0u64; k + 1];
    counts[0] = undecided.min(n as u64);
    counts[k] += n as u64 - counts[0];
    let init = InitialCondition::Counts(counts);
    let horizon = 1.0 / params.clock_rate();

    let samples: Vec<Result<u64>> = seeding::run_replications(replications, base_seed, |_, seed| {
        let cfg = RunConfig {
            t_max: horizon,
            seed,
            backend: Backend::Behavioral,
            record_grid: horizon,
            record_jumps: false,
            stop_on_absorption: false,
        };
        simulate(graph, params, &init, &cfg).map(|out| out.final_state.occupancy()[1])
    });
    let z1_samples = samples.into_iter().collect::<Result<Vec<u64>>>()?;

    let scale = params.exploration() * c0 * params.reward(1)
        / (std::f64::consts::E * k as f64);
    let threshold = (1.0 - big_c) * scale * n as f64;
    let hits = z1_samples
        .iter()
        .filter(|&&z1| z1 as f64 >= threshold)
        .count();
    let theoretical_lower_bound = 1.0 - (-2.0 * (big_c * scale).powi(2) * n as f64).exp();
    Ok(WealthCheck {
        threshold,
        empirical_probability: hits as f64 / replications as f64,
        theoretical_lower_bound,
        replications,
        z1_samples,
    })
}

/// Initial-mass concentration for i.i.d. starts: fraction of draws with
/// `Z_0(0) + Z_1(0) >= (1-C)(q_0+q_1) N` against the Hoeffding bound
/// `1 - exp(-2 C^2 (q_0+q_1)^2 N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MassCheck {
    pub threshold: f64,
    pub empirical_probability: f64,
    pub theoretical_lower_bound: f64,
    pub draws: u64,
}

/// Draws i.i.d. initial conditions (no simulation) and measures the combined
/// undecided-plus-best mass.
pub fn iid_mass_check(
    n: usize,
    q: &[f64],
    big_c: f64,
    draws: u64,
    base_seed: u64,
) -> Result<MassCheck> {
    if !big_c.is_finite() || big_c <= 0.0 || big_c >= 1.0 {
        return Err(Error::COutOfRange(big_c));
    }
    if draws == 0 {
        return Err(Error::NoReplications);
    }
    let num_arms = q.len().saturating_sub(1).max(1);
    let init = InitialCondition::Iid(q.to_vec());
    let q01 = q[0] + q.get(1).copied().unwrap_or(0.0);
    let threshold = (1.0 - big_c) * q01 * n as f64;
    let hits: Vec<Result<bool>> = seeding::run_replications(draws, base_seed, |_, seed| {
        let state = init_state(n, num_arms, &init, seed)?;
        let z = state.occupancy();
        Ok((z[0] + z.get(1).copied().unwrap_or(0)) as f64 >= threshold)
    });
    let mut count = 0u64;
    for h in hits {
        if h? {
            count += 1;
        }
    }
    Ok(MassCheck {
        threshold,
        empirical_probability: count as f64 / draws as f64,
        theoretical_lower_bound: 1.0 - (-2.0 * big_c.powi(2) * q01.powi(2) * n as f64).exp(),
        draws,
    })
}

/// Circular graph with the adversarial contiguous split: agents
/// `0..n/2` prefer arm 1 and the rest prefer arm 2 (`n` even, `>= 4`;
/// meant for two arms). Exactly 4 agents ever see a differing neighbor.
pub fn scenario_example1(n: usize) -> Result<(GraphTopology, InitialCondition)> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::OddScenarioSize(n));
    }
    let graph = GraphTopology::build_cycle(n)?;
    let mut memories = vec![1u8; n];
    for m in memories.iter_mut().skip(n / 2) {
        *m = 2;
    }
    Ok((graph, InitialCondition::Explicit(memories)))
}

/// Number of agents with at least one neighbor holding a different memory.
pub fn boundary_agent_count(graph: &GraphTopology, memories: &[u8]) -> usize {
    (0..graph.num_agents())
        .filter(|&i| {
            graph
                .neighbors(i)
                .iter()
                .any(|&j| memories[j as usize] != memories[i])
        })
        .count()
}

/// Forest of `floor(n / s)` complete graphs of size `s = floor(ln ln n)`,
/// with leftover agents dropped and reported.
#[derive(Debug, Clone)]
pub struct Example2Scenario {
    pub graph: GraphTopology,
    pub component_size: usize,
    pub num_components: usize,
    pub dropped_agents: usize,
    /// An i.i.d. initial distribution that gives every tiny component a
    /// constant-order chance of settling on the runner-up arm.
    pub suggested_q: Vec<f64>,
}

/// Builds the tiny-cliques scenario for `n` agents (requires
/// `floor(ln ln n) >= 2`, i.e. `n >= 1619`).
pub fn scenario_example2(n: usize) -> Result<Example2Scenario> {
    let size = (n.max(2) as f64).ln().ln().floor();
    if size < 2.0 {
        return Err(Error::ScenarioTooSmall { n });
    }
    let component_size = size as usize;
    let num_components = n / component_size;
    let graph = GraphTopology::build_disjoint_cliques(num_components, component_size)?;
    Ok(Example2Scenario {
        graph,
        component_size,
        num_components,
        dropped_agents: n - num_components * component_size,
        suggested_q: vec![0.2, 0.4, 0.4],
    })
}
