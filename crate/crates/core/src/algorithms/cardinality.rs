//! EF1 for the agents under the constraint "at most one good per market
//! block", by envy-graph picking block after block.
//!
//! Before each block, envy cycles are removed by rotating bundles. Agents then
//! pick their favourite remaining good of the block in a topological order of
//! the envy graph: an envious agent always picks before the agent it envies.

use std::collections::BTreeSet;

use super::trace::{StepKind, TraceStep};
use crate::error::Result;
use crate::model::{Allocation, BlockPartition, Good, Instance, Valuation};
use crate::value::Value;

/// `graph[i][j]` is true when `i` envies `j`.
pub fn envy_graph<V: Valuation>(profile: &[V], alloc: &Allocation) -> Vec<Vec<bool>> {
    let n = alloc.n();
    let mut graph = vec![vec![false; n]; n];
    for (i, u) in profile.iter().enumerate() {
        let own = u.value(alloc.bundle(i));
        for (j, cell) in graph[i].iter_mut().enumerate() {
            *cell = i != j && own < u.value(alloc.bundle(j));
        }
    }
    graph
}

/// Some envy cycle `c0 -> c1 -> ... -> c0`, searched from the lowest agent.
pub fn find_cycle(graph: &[Vec<bool>]) -> Option<Vec<usize>> {
    let n = graph.len();
    // 0 = unseen, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    let mut stack: Vec<usize> = Vec::new();

    fn dfs(
        v: usize,
        graph: &[Vec<bool>],
        state: &mut [u8],
        stack: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        state[v] = 1;
        stack.push(v);
        for w in 0..graph.len() {
            if !graph[v][w] {
                continue;
            }
            if state[w] == 1 {
                let start = stack.iter().position(|&x| x == w).expect("on stack");
                return Some(stack[start..].to_vec());
            }
            if state[w] == 0 {
                if let Some(c) = dfs(w, graph, state, stack) {
                    return Some(c);
                }
            }
        }
        stack.pop();
        state[v] = 2;
        None
    }

    for v in 0..n {
        if state[v] == 0 {
            if let Some(c) = dfs(v, graph, &mut state, &mut stack) {
                return Some(c);
            }
        }
    }
    None
}

/// Each agent on the cycle takes the bundle it envies.
pub fn rotate(alloc: &mut Allocation, cycle: &[usize]) {
    let taken: Vec<Vec<Good>> = cycle
        .iter()
        .enumerate()
        .map(|(k, _)| alloc.bundle(cycle[(k + 1) % cycle.len()]).to_vec())
        .collect();
    for (&agent, bundle) in cycle.iter().zip(taken) {
        alloc.set_bundle(agent, bundle);
    }
}

/// Kahn's algorithm on an acyclic envy graph, lowest index first among
/// agents that nobody remaining envies.
pub fn topological_order(graph: &[Vec<bool>]) -> Vec<usize> {
    let n = graph.len();
    let mut indegree: Vec<usize> = (0..n)
        .map(|j| (0..n).filter(|&i| graph[i][j]).count())
        .collect();
    let mut ready: BTreeSet<usize> = (0..n).filter(|&j| indegree[j] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for w in 0..n {
            if graph[v][w] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    ready.insert(w);
                }
            }
        }
    }
    debug_assert_eq!(order.len(), n, "envy graph must be acyclic");
    order
}

fn eliminate_cycles<V: Valuation>(
    profile: &[V],
    alloc: &mut Allocation,
    trace: &mut Vec<TraceStep>,
) -> Vec<Vec<bool>> {
    loop {
        let graph = envy_graph(profile, alloc);
        match find_cycle(&graph) {
            None => return graph,
            Some(cycle) => {
                rotate(alloc, &cycle);
                let names: Vec<String> = cycle.iter().map(|i| (i + 1).to_string()).collect();
                trace.push(
                    TraceStep::new(StepKind::Rotate, alloc)
                        .with_note(format!("cycle {}", names.join(" -> "))),
                );
            }
        }
    }
}

/// Envy-graph picking over `blocks` for any monotone profile. EF1 is
/// guaranteed for additive utilities.
pub fn pick_by_blocks<V: Valuation>(
    profile: &[V],
    blocks: &BlockPartition,
) -> (Allocation, Vec<TraceStep>) {
    let n = profile.len();
    let mut alloc = Allocation::empty(n);
    let mut trace = vec![TraceStep::new(StepKind::Init, &alloc)];
    for (k, block) in blocks.blocks().iter().enumerate() {
        let graph = eliminate_cycles(profile, &mut alloc, &mut trace);
        let mut remaining: Vec<Good> = block.clone();
        remaining.sort_unstable();
        for agent in topological_order(&graph) {
            if remaining.is_empty() {
                break;
            }
            let mut best: Option<(usize, Value)> = None;
            for (idx, &g) in remaining.iter().enumerate() {
                let mut with = alloc.bundle(agent).to_vec();
                with.push(g);
                let v = profile[agent].value(&with);
                if best.as_ref().is_none_or(|(_, b)| v > *b) {
                    best = Some((idx, v));
                }
            }
            let (idx, _) = best.expect("remaining is nonempty");
            let g = remaining.remove(idx);
            alloc.move_good(g, agent);
        }
        trace.push(TraceStep::new(StepKind::Pick, &alloc).with_note(format!("block {}", k + 1)));
    }
    trace.push(TraceStep::new(StepKind::Done, &alloc));
    (alloc, trace)
}

/// EF1 for the subjective utilities and one good per market block (hence
/// SD-EF1 for the market). Requires a single additive market valuation.
pub fn solve_ef1_sdef1(instance: &Instance) -> Result<Allocation> {
    Ok(solve_ef1_sdef1_traced(instance)?.0)
}

pub fn solve_ef1_sdef1_traced(instance: &Instance) -> Result<(Allocation, Vec<TraceStep>)> {
    let ranking = instance.market_ranking()?;
    let blocks = BlockPartition::new(&ranking, instance.n());
    Ok(pick_by_blocks(instance.utilities(), &blocks))
}
