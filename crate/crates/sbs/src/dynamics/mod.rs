//! Exact stochastic simulation of the opinion dynamics: `N` agents on a
//! communication graph, each holding a bounded memory in `{0, 1, ..., K}`
//! (0 = no preference, `k` = currently prefers arm `k`), each updating at the
//! ticks of an independent Poisson clock by pulling an arm suggested either
//! by a uniformly random neighbor or (for undecided agents, with probability
//! `mu`) by uniform exploration, and adopting the arm when its Bernoulli
//! reward pays out.
//!
//! Two interchangeable backends realize the same continuous-time Markov
//! chain:
//!
//! * [`Backend::Behavioral`] literally plays the per-tick update rule;
//! * [`Backend::Pathwise`] drives each agent with a marked Poisson stream of
//!   rate `lambda * K` and maps marks through half-open acceptance intervals
//!   evaluated at the pre-event state.
//!
//! Both are deterministic given `(seed, backend)`; see [`crate::seeding`]
//! for the stream layout.

mod behavioral;
mod pathwise;

pub(crate) use pathwise::{mark_candidate, pathwise_transition, transition_width, MarkedStreams};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::GraphTopology;
use crate::seeding;

/// Largest supported number of arms (memories are stored as `u8`).
pub const MAX_ARMS: usize = u8::MAX as usize;

/// Bandit and clock parameters: rewards `p_1 >= ... >= p_K` (strict at the
/// top so the best arm is unique), exploration rate `mu`, Poisson clock rate
/// `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    rewards: Vec<f64>,
    exploration: f64,
    clock_rate: f64,
}

impl ModelParams {
    pub fn new(rewards: Vec<f64>, exploration: f64, clock_rate: f64) -> Result<Self> {
        let k = rewards.len();
        if k == 0 {
            return Err(Error::NoArms);
        }
        if k > MAX_ARMS {
            return Err(Error::TooManyArms { k, max: MAX_ARMS });
        }
        for (i, &p) in rewards.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(Error::RewardOutOfRange { arm: i + 1, value: p });
            }
        }
        for i in 1..k {
            if rewards[i] > rewards[i - 1] {
                return Err(Error::RewardsNotSorted { arm: i + 1 });
            }
        }
        if k >= 2 && rewards[0] == rewards[1] {
            return Err(Error::BestArmNotUnique(rewards[0]));
        }
        if !(0.0..=1.0).contains(&exploration) || !exploration.is_finite() {
            return Err(Error::ExplorationOutOfRange(exploration));
        }
        if clock_rate <= 0.0 || !clock_rate.is_finite() {
            return Err(Error::NonPositiveClockRate(clock_rate));
        }
        Ok(ModelParams {
            rewards,
            exploration,
            clock_rate,
        })
    }

    pub fn num_arms(&self) -> usize {
        self.rewards.len()
    }

    /// Reward probability of `arm` (1-based).
    pub fn reward(&self, arm: usize) -> f64 {
        self.rewards[arm - 1]
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn reward_sum(&self) -> f64 {
        self.rewards.iter().sum()
    }

    /// Reward of the runner-up arm; 0 when there is a single arm.
    pub fn second_reward(&self) -> f64 {
        self.rewards.get(1).copied().unwrap_or(0.0)
    }

    pub fn exploration(&self) -> f64 {
        self.exploration
    }

    pub fn clock_rate(&self) -> f64 {
        self.clock_rate
    }
}

/// Full system state: per-agent memories plus the occupancy counts
/// `Z_k = #{i : M_i = k}`, maintained incrementally.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub time: f64,
    memories: Vec<u8>,
    occupancy: Vec<u64>,
}

impl SystemState {
    fn new(memories: Vec<u8>, num_arms: usize) -> Self {
        let mut occupancy = vec![0u64; num_arms + 1];
        for &m in &memories {
            occupancy[m as usize] += 1;
        }
        SystemState {
            time: 0.0,
            memories,
            occupancy,
        }
    }

    pub fn num_agents(&self) -> usize {
        self.memories.len()
    }

    pub fn memories(&self) -> &[u8] {
        &self.memories
    }

    /// Occupancy vector `(Z_0, ..., Z_K)`.
    pub fn occupancy(&self) -> &[u64] {
        &self.occupancy
    }

    fn apply(&mut self, agent: usize, to: u8) {
        let from = self.memories[agent];
        self.occupancy[from as usize] -= 1;
        self.occupancy[to as usize] += 1;
        self.memories[agent] = to;
    }

    fn recount(&self) -> Vec<u64> {
        let mut z = vec![0u64; self.occupancy.len()];
        for &m in &self.memories {
            z[m as usize] += 1;
        }
        z
    }
}

/// How the memories are set at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// One memory value per agent.
    Explicit(Vec<u8>),
    /// Occupancy counts `(Z_0, ..., Z_K)`; agents are assigned in index
    /// order and then shuffled by the run seed.
    Counts(Vec<u64>),
    /// Each memory drawn independently from the distribution `q` over
    /// `{0, ..., K}`.
    Iid(Vec<f64>),
}

/// Checks that `q` is a probability vector of the expected length.
pub fn validate_simplex(q: &[f64], expected_len: usize) -> Result<()> {
    if q.len() != expected_len {
        return Err(Error::LengthMismatch {
            expected: expected_len,
            got: q.len(),
        });
    }
    let sum: f64 = q.iter().sum();
    if q.iter().any(|&x| !(0.0..=1.0).contains(&x)) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::NotASimplex { sum });
    }
    Ok(())
}

/// Builds the state at time 0. Deterministic for a fixed seed; only the
/// `Counts` (shuffle) and `Iid` (categorical draws) variants consume
/// randomness, from the run's initial-condition stream.
pub fn init_state(
    n: usize,
    num_arms: usize,
    init: &InitialCondition,
    seed: u64,
) -> Result<SystemState> {
    let memories = match init {
        InitialCondition::Explicit(mem) => {
            if mem.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: mem.len(),
                });
            }
            for (agent, &value) in mem.iter().enumerate() {
                if value as usize > num_arms {
                    return Err(Error::MemoryOutOfRange {
                        agent,
                        value,
                        k: num_arms,
                    });
                }
            }
            mem.clone()
        }
        InitialCondition::Counts(z) => {
            if z.len() != num_arms + 1 {
                return Err(Error::LengthMismatch {
                    expected: num_arms + 1,
                    got: z.len(),
                });
            }
            let total: u64 = z.iter().sum();
            if total != n as u64 {
                return Err(Error::CountMismatch {
                    expected: n as u64,
                    got: total,
                });
            }
            let mut mem = Vec::with_capacity(n);
            for (k, &count) in z.iter().enumerate() {
                mem.extend(std::iter::repeat_n(k as u8, count as usize));
            }
            use rand::seq::SliceRandom;
            mem.shuffle(&mut seeding::init_rng(seed));
            mem
        }
        InitialCondition::Iid(q) => {
            validate_simplex(q, num_arms + 1)?;
            let mut rng = seeding::init_rng(seed);
            (0..n)
                .map(|_| {
                    let u: f64 = rng.random();
                    let mut acc = 0.0;
                    for (k, &qk) in q.iter().enumerate() {
                        acc += qk;
                        if u < acc {
                            return k as u8;
                        }
                    }
                    (q.len() - 1) as u8
                })
                .collect()
        }
    };
    Ok(SystemState::new(memories, num_arms))
}

/// Simulation backend selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Per-agent exponential ticks driving the literal update rule.
    Behavioral,
    /// Marked Poisson streams mapped through acceptance intervals.
    Pathwise,
}

/// Horizon, seed, backend and recording switches for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub t_max: f64,
    pub seed: u64,
    pub backend: Backend,
    /// Occupancy is recorded at `0, record_grid, 2*record_grid, ..., t_max`,
    /// carrying the last value forward between events.
    pub record_grid: f64,
    pub record_jumps: bool,
    pub stop_on_absorption: bool,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t_max <= 0.0 || !self.t_max.is_finite() {
            return Err(Error::NonPositiveTMax(self.t_max));
        }
        if self.record_grid <= 0.0 || !self.record_grid.is_finite() {
            return Err(Error::NonPositiveGrid(self.record_grid));
        }
        Ok(())
    }
}

/// How (and whether) the run reached a zero-rate state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsorptionStatus {
    /// Every agent prefers the best arm (`Z_1 = N`).
    AbsorbedSuccess,
    /// Every connected component is unanimous, but not all on arm 1.
    AbsorbedOther,
    /// The total transition rate hit zero without per-component unanimity
    /// (possible only when `mu = 0` or some reward probability is 0).
    Frozen,
    /// Still active at `t_max`.
    TimedOut,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionReport {
    pub status: AbsorptionStatus,
    pub absorption_time: Option<f64>,
    /// Consensus arm per connected component, present when every component
    /// is unanimous at the end of the run.
    pub per_component_consensus: Option<Vec<u8>>,
}

/// Everything one run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    /// `(t, occupancy)` at the recording grid times, last value carried
    /// forward.
    pub trajectory: Vec<(f64, Vec<u64>)>,
    /// `(t, +1/-1)` for every change of `Z_1` (when jump recording is on).
    pub jump_chain: Vec<(f64, i8)>,
    pub absorption: AbsorptionReport,
    pub final_state: SystemState,
    /// Number of clock events processed (including no-op ticks).
    pub event_count: u64,
}

/// One tick of the update rule at `agent`: choose an arm (peer
/// recommendation, or uniform exploration with probability `mu` when
/// undecided), pull it, adopt on reward. Returns the `(from, to)` memory
/// transition when the state actually changes; re-adopting the held arm is
/// a no-op.
pub fn agent_update<R: Rng + ?Sized>(
    agent: usize,
    state: &SystemState,
    graph: &GraphTopology,
    params: &ModelParams,
    rng: &mut R,
) -> Option<(u8, u8)> {
    let memory = state.memories[agent];
    let choice = if memory == 0 && rng.random::<f64>() < params.exploration {
        1 + rng.random_range(0..params.num_arms()) as u8
    } else {
        let nbrs = graph.neighbors(agent);
        let pick = nbrs[rng.random_range(0..nbrs.len())];
        state.memories[pick as usize]
    };
    if choice == 0 {
        return None; // no suggestion: pull no arm
    }
    let rewarded = rng.random::<f64>() < params.reward(choice as usize);
    (rewarded && choice != memory).then_some((memory, choice))
}

/// Instantaneous rate at which `agent` adopts each arm, as a vector indexed
/// by `arm - 1`. For an undecided agent the rate to arm `k` is
/// `lambda * p_k * (mu/K + (1 - mu) * f_k)` where `f_k` is the fraction of
/// neighbors preferring `k`; for a decided agent it is `lambda * p_k * f_k`
/// for `k != M` and 0 for the held arm.
pub fn transition_rates(
    state: &SystemState,
    graph: &GraphTopology,
    params: &ModelParams,
    agent: usize,
) -> Vec<f64> {
    let k_total = params.num_arms();
    let memory = state.memories[agent] as usize;
    let mut counts = vec![0u32; k_total + 1];
    for &j in graph.neighbors(agent) {
        counts[state.memories[j as usize] as usize] += 1;
    }
    let deg = graph.degree(agent) as f64;
    let lam = params.clock_rate;
    let mu = params.exploration;
    (1..=k_total)
        .map(|arm| {
            if arm == memory {
                return 0.0;
            }
            let share = counts[arm] as f64 / deg;
            let p = params.reward(arm);
            if memory == 0 {
                lam * p * (mu / k_total as f64 + (1.0 - mu) * share)
            } else {
                lam * p * share
            }
        })
        .collect()
}

/// Whether the total transition rate out of `state` is zero.
pub fn is_absorbing(state: &SystemState, graph: &GraphTopology, params: &ModelParams) -> bool {
    let k_total = params.num_arms();
    let mu = params.exploration;
    let mut counts = vec![0u32; k_total + 1];
    for agent in 0..state.num_agents() {
        let memory = state.memories[agent] as usize;
        counts.fill(0);
        for &j in graph.neighbors(agent) {
            counts[state.memories[j as usize] as usize] += 1;
        }
        for (arm, &count) in counts.iter().enumerate().skip(1) {
            if arm == memory {
                continue;
            }
            let p = params.reward(arm);
            let reachable = count > 0 || (memory == 0 && mu > 0.0);
            if p > 0.0 && reachable {
                return false;
            }
        }
    }
    true
}

/// Runs the chain to `cfg.t_max` (or to absorption when requested) and
/// returns the recorded output. Fully deterministic for fixed
/// `(seed, backend)`.
pub fn simulate(
    graph: &GraphTopology,
    params: &ModelParams,
    init: &InitialCondition,
    cfg: &RunConfig,
) -> Result<SimOutput> {
    cfg.validate()?;
    let state = init_state(graph.num_agents(), params.num_arms(), init, cfg.seed)?;
    Ok(match cfg.backend {
        Backend::Behavioral => behavioral::run(graph, params, state, cfg),
        Backend::Pathwise => pathwise::run(graph, params, state, cfg),
    })
}

/// Exponential gap with the given rate, by inversion.
pub(crate) fn exp_gap<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    let u: f64 = rng.random();
    -f64::ln_1p(-u) / rate
}

/// Heap key ordering events by time, ties broken by lower agent index.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EventKey {
    pub t: f64,
    pub agent: u32,
}

impl PartialEq for EventKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl Eq for EventKey {}
impl PartialOrd for EventKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for EventKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.t
            .total_cmp(&other.t)
            .then_with(|| self.agent.cmp(&other.agent))
    }
}

/// Grid and jump recording with last-value-carried-forward semantics.
pub(crate) struct Recorder {
    step: f64,
    points: usize,
    next: usize,
    record_jumps: bool,
    trajectory: Vec<(f64, Vec<u64>)>,
    jump_chain: Vec<(f64, i8)>,
}

impl Recorder {
    fn new(cfg: &RunConfig) -> Self {
        let points = (cfg.t_max / cfg.record_grid + 1e-9).floor() as usize + 1;
        Recorder {
            step: cfg.record_grid,
            points,
            next: 0,
            record_jumps: cfg.record_jumps,
            trajectory: Vec::with_capacity(points),
            jump_chain: Vec::new(),
        }
    }

    fn flush_before(&mut self, t: f64, occupancy: &[u64]) {
        while self.next < self.points && (self.next as f64) * self.step < t {
            self.trajectory
                .push(((self.next as f64) * self.step, occupancy.to_vec()));
            self.next += 1;
        }
    }

    fn finish(&mut self, occupancy: &[u64]) {
        while self.next < self.points {
            self.trajectory
                .push(((self.next as f64) * self.step, occupancy.to_vec()));
            self.next += 1;
        }
    }

    fn on_jump(&mut self, t: f64, from: u8, to: u8) {
        if !self.record_jumps {
            return;
        }
        if from == 1 {
            self.jump_chain.push((t, -1));
        } else if to == 1 {
            self.jump_chain.push((t, 1));
        }
    }
}

/// Incremental absorption detection. The cheap check (every connected
/// component unanimous on some arm) runs after every state change; the full
/// rate-sum scan runs only in regimes where non-unanimous frozen states are
/// possible (`mu = 0` or a zero reward probability). Both are exercised only
/// on state changes, because the state is piecewise constant in between.
pub(crate) struct AbsorptionTracker {
    component_of: Vec<u32>,
    comp_counts: Vec<Vec<u64>>,
    comp_sizes: Vec<u64>,
    unsettled: usize,
    watch_frozen: bool,
    detected: Option<(AbsorptionStatus, f64)>,
}

fn component_settled(counts: &[u64], size: u64) -> bool {
    counts[1..].contains(&size)
}

impl AbsorptionTracker {
    fn new(
        graph: &GraphTopology,
        params: &ModelParams,
        state: &SystemState,
    ) -> Self {
        let component_of = graph.component_ids();
        let num_components = component_of.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let k = params.num_arms();
        let mut comp_counts = vec![vec![0u64; k + 1]; num_components];
        let mut comp_sizes = vec![0u64; num_components];
        for (agent, &c) in component_of.iter().enumerate() {
            comp_counts[c as usize][state.memories[agent] as usize] += 1;
            comp_sizes[c as usize] += 1;
        }
        let unsettled = comp_counts
            .iter()
            .zip(&comp_sizes)
            .filter(|(counts, &size)| !component_settled(counts, size))
            .count();
        let watch_frozen =
            params.exploration == 0.0 || params.rewards.contains(&0.0);
        let mut tracker = AbsorptionTracker {
            component_of,
            comp_counts,
            comp_sizes,
            unsettled,
            watch_frozen,
            detected: None,
        };
        tracker.maybe_detect(0.0, state, graph, params);
        tracker
    }

    #[allow(clippy::too_many_arguments)]
    fn on_transition(
        &mut self,
        agent: usize,
        from: u8,
        to: u8,
        t: f64,
        state: &SystemState,
        graph: &GraphTopology,
        params: &ModelParams,
    ) {
        if self.detected.is_some() {
            return;
        }
        let c = self.component_of[agent] as usize;
        let size = self.comp_sizes[c];
        let was = component_settled(&self.comp_counts[c], size);
        self.comp_counts[c][from as usize] -= 1;
        self.comp_counts[c][to as usize] += 1;
        let now = component_settled(&self.comp_counts[c], size);
        match (was, now) {
            (false, true) => self.unsettled -= 1,
            (true, false) => self.unsettled += 1,
            _ => {}
        }
        self.maybe_detect(t, state, graph, params);
    }

    fn maybe_detect(
        &mut self,
        t: f64,
        state: &SystemState,
        graph: &GraphTopology,
        params: &ModelParams,
    ) {
        if self.detected.is_some() {
            return;
        }
        if self.unsettled == 0 {
            let status = if state.occupancy[1] == state.num_agents() as u64 {
                AbsorptionStatus::AbsorbedSuccess
            } else {
                AbsorptionStatus::AbsorbedOther
            };
            self.detected = Some((status, t));
        } else if self.watch_frozen && is_absorbing(state, graph, params) {
            self.detected = Some((AbsorptionStatus::Frozen, t));
        }
    }

    fn absorbed(&self) -> bool {
        self.detected.is_some()
    }

    fn report(&self) -> AbsorptionReport {
        match self.detected {
            Some((status, t)) => {
                let consensus = (self.unsettled == 0).then(|| {
                    self.comp_counts
                        .iter()
                        .zip(&self.comp_sizes)
                        .map(|(counts, &size)| {
                            counts[1..]
                                .iter()
                                .position(|&c| c == size)
                                .map(|k| (k + 1) as u8)
                                .unwrap_or(0)
                        })
                        .collect()
                });
                AbsorptionReport {
                    status,
                    absorption_time: Some(t),
                    per_component_consensus: consensus,
                }
            }
            None => AbsorptionReport {
                status: AbsorptionStatus::TimedOut,
                absorption_time: None,
                per_component_consensus: None,
            },
        }
    }
}

/// State, recording and absorption bookkeeping shared by both backends.
pub(crate) struct RunFrame<'a> {
    graph: &'a GraphTopology,
    params: &'a ModelParams,
    state: SystemState,
    recorder: Recorder,
    tracker: AbsorptionTracker,
    stop_on_absorption: bool,
    event_count: u64,
    state_changes: u64,
}

impl<'a> RunFrame<'a> {
    pub fn new(
        graph: &'a GraphTopology,
        params: &'a ModelParams,
        state: SystemState,
        cfg: &RunConfig,
    ) -> Self {
        let recorder = Recorder::new(cfg);
        let tracker = AbsorptionTracker::new(graph, params, &state);
        RunFrame {
            graph,
            params,
            state,
            recorder,
            tracker,
            stop_on_absorption: cfg.stop_on_absorption,
            event_count: 0,
            state_changes: 0,
        }
    }

    pub fn state(&self) -> &SystemState {
        &self.state
    }

    pub fn stop_now(&self) -> bool {
        self.stop_on_absorption && self.tracker.absorbed()
    }

    pub fn note_event(&mut self, t: f64) {
        self.recorder.flush_before(t, &self.state.occupancy);
        self.event_count += 1;
    }

    pub fn apply_transition(&mut self, agent: usize, from: u8, to: u8, t: f64) {
        self.state.apply(agent, to);
        self.state.time = t;
        self.recorder.on_jump(t, from, to);
        self.tracker
            .on_transition(agent, from, to, t, &self.state, self.graph, self.params);
        self.state_changes += 1;
        if cfg!(debug_assertions) && self.state_changes.is_multiple_of(10_000) {
            debug_assert_eq!(self.state.recount(), self.state.occupancy);
        }
    }

    pub fn into_output(mut self, t_max: f64) -> SimOutput {
        self.recorder.finish(&self.state.occupancy);
        let absorption = self.tracker.report();
        let end = match (self.stop_on_absorption, absorption.absorption_time) {
            (true, Some(t)) => t,
            _ => t_max,
        };
        self.state.time = end;
        SimOutput {
            trajectory: self.recorder.trajectory,
            jump_chain: self.recorder.jump_chain,
            absorption,
            final_state: self.state,
            event_count: self.event_count,
        }
    }
}
