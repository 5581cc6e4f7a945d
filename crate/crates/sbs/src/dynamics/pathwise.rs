//! Backend built on the chain's sample-path construction: agent `i` is
//! driven by a marked Poisson stream of rate `lambda * K`, each point
//! carrying a mark `y` uniform on `[0, K)`. A mark with `y` in
//! `[k-1, k-1 + w_k)` moves the agent to arm `k`, where the width `w_k`,
//! evaluated at the pre-event state, is
//!
//! * `mu p_k / K + (1 - mu) p_k f_k` for an undecided agent, and
//! * `p_k f_k` for an agent holding some other arm (`w = 0` for the held
//!   arm),
//!
//! with `f_k` the fraction of neighbors preferring arm `k`. The coupled
//! limit process reuses the same machinery with `f_k` replaced by the
//! deterministic marginal probability.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::GraphTopology;
use crate::seeding;

use super::{exp_gap, ModelParams, RunConfig, RunFrame, SimOutput, SystemState};

/// One point of a marked stream.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PathEvent {
    pub t: f64,
    pub agent: u32,
    pub mark: f64,
}

impl PartialEq for PathEvent {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl Eq for PathEvent {}
impl PartialOrd for PathEvent {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for PathEvent {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.t
            .total_cmp(&other.t)
            .then_with(|| self.agent.cmp(&other.agent))
    }
}

/// Per-agent marked Poisson streams of rate `lambda * K`, merged in time
/// order. Each agent draws `(gap, mark)` pairs from its own seeded stream,
/// so the merged sequence is a pure function of the run seed.
pub(crate) struct MarkedStreams {
    rngs: Vec<ChaCha8Rng>,
    heap: BinaryHeap<Reverse<PathEvent>>,
    rate: f64,
    num_arms: f64,
}

impl MarkedStreams {
    pub fn new(seed: u64, n: usize, lambda: f64, num_arms: usize) -> Self {
        let rate = lambda * num_arms as f64;
        let num_arms = num_arms as f64;
        let mut rngs: Vec<_> = (0..n).map(|i| seeding::agent_rng(seed, i)).collect();
        let mut heap = BinaryHeap::with_capacity(n);
        for (agent, rng) in rngs.iter_mut().enumerate() {
            let (gap, mark) = draw(rng, rate, num_arms);
            heap.push(Reverse(PathEvent {
                t: gap,
                agent: agent as u32,
                mark,
            }));
        }
        MarkedStreams {
            rngs,
            heap,
            rate,
            num_arms,
        }
    }

    /// Next event with `t <= t_max`, re-arming the agent's stream.
    pub fn next_before(&mut self, t_max: f64) -> Option<PathEvent> {
        let Reverse(event) = self.heap.pop()?;
        if event.t > t_max {
            return None;
        }
        let agent = event.agent as usize;
        let (gap, mark) = draw(&mut self.rngs[agent], self.rate, self.num_arms);
        self.heap.push(Reverse(PathEvent {
            t: event.t + gap,
            agent: event.agent,
            mark,
        }));
        Some(event)
    }
}

fn draw<R: Rng + ?Sized>(rng: &mut R, rate: f64, num_arms: f64) -> (f64, f64) {
    let gap = exp_gap(rng, rate);
    let mark = rng.random::<f64>() * num_arms;
    (gap, mark)
}

/// Splits a mark into the candidate arm and the offset into its unit cell.
pub(crate) fn mark_candidate(mark: f64, num_arms: usize) -> (usize, f64) {
    let mut candidate = mark.floor() as usize + 1;
    if candidate > num_arms {
        candidate = num_arms;
    }
    (candidate, mark - (candidate - 1) as f64)
}

/// Acceptance-interval width for moving to `candidate`, given the current
/// memory and the candidate's `share` (neighbor fraction for the finite
/// process, marginal probability for the limit process).
pub(crate) fn transition_width(
    memory: u8,
    candidate: usize,
    share: f64,
    params: &ModelParams,
) -> f64 {
    if memory as usize == candidate {
        return 0.0;
    }
    let p = params.reward(candidate);
    if memory == 0 {
        let mu = params.exploration();
        mu * p / params.num_arms() as f64 + (1.0 - mu) * p * share
    } else {
        p * share
    }
}

/// Fraction of `agent`'s neighbors currently preferring `arm`.
pub(crate) fn neighbor_share(
    memories: &[u8],
    graph: &GraphTopology,
    agent: usize,
    arm: usize,
) -> f64 {
    let nbrs = graph.neighbors(agent);
    let count = nbrs
        .iter()
        .filter(|&&j| memories[j as usize] as usize == arm)
        .count();
    count as f64 / nbrs.len() as f64
}

/// Transition implied by one marked point, evaluated at the pre-event state.
pub(crate) fn pathwise_transition(
    memories: &[u8],
    graph: &GraphTopology,
    params: &ModelParams,
    agent: usize,
    mark: f64,
) -> Option<(u8, u8)> {
    let (candidate, offset) = mark_candidate(mark, params.num_arms());
    let memory = memories[agent];
    if memory as usize == candidate {
        return None;
    }
    let share = neighbor_share(memories, graph, agent, candidate);
    let width = transition_width(memory, candidate, share, params);
    (offset < width).then_some((memory, candidate as u8))
}

pub(crate) fn run(
    graph: &GraphTopology,
    params: &ModelParams,
    state: SystemState,
    cfg: &RunConfig,
) -> SimOutput {
    let mut streams = MarkedStreams::new(
        cfg.seed,
        graph.num_agents(),
        params.clock_rate(),
        params.num_arms(),
    );
    let mut frame = RunFrame::new(graph, params, state, cfg);
    if !frame.stop_now() {
        while let Some(event) = streams.next_before(cfg.t_max) {
            frame.note_event(event.t);
            let agent = event.agent as usize;
            if let Some((from, to)) = pathwise_transition(
                frame.state().memories(),
                graph,
                params,
                agent,
                event.mark,
            ) {
                frame.apply_transition(agent, from, to, event.t);
                if frame.stop_now() {
                    break;
                }
            }
        }
    }
    frame.into_output(cfg.t_max)
}
