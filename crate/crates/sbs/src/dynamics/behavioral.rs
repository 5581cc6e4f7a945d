//! Backend that plays the update rule literally: every agent carries an
//! exponential clock, ticks are processed in time order from a priority
//! queue, and each tick runs one agent update.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::GraphTopology;
use crate::seeding;

use super::{agent_update, exp_gap, EventKey, ModelParams, RunConfig, RunFrame, SimOutput, SystemState};

pub(crate) fn run(
    graph: &GraphTopology,
    params: &ModelParams,
    state: SystemState,
    cfg: &RunConfig,
) -> SimOutput {
    let n = graph.num_agents();
    let lambda = params.clock_rate();
    let mut rngs: Vec<_> = (0..n).map(|i| seeding::agent_rng(cfg.seed, i)).collect();
    let mut heap = BinaryHeap::with_capacity(n);
    for (agent, rng) in rngs.iter_mut().enumerate() {
        heap.push(Reverse(EventKey {
            t: exp_gap(rng, lambda),
            agent: agent as u32,
        }));
    }

    let mut frame = RunFrame::new(graph, params, state, cfg);
    if !frame.stop_now() {
        while let Some(Reverse(EventKey { t, agent })) = heap.pop() {
            if t > cfg.t_max {
                break;
            }
            frame.note_event(t);
            let a = agent as usize;
            if let Some((from, to)) = agent_update(a, frame.state(), graph, params, &mut rngs[a]) {
                frame.apply_transition(a, from, to, t);
                if frame.stop_now() {
                    break;
                }
            }
            let gap = exp_gap(&mut rngs[a], lambda);
            heap.push(Reverse(EventKey { t: t + gap, agent }));
        }
    }
    frame.into_output(cfg.t_max)
}
