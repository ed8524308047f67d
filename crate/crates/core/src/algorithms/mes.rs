//! Minimal envied swaps: 1/2-EF1 for monotone subadditive utilities together
//! with one good per market block.
//!
//! Phase 1 repeatedly finds a smallest block-feasible subset `T` of the
//! unallocated goods that some agent prefers to its own bundle; the lowest
//! such agent takes `T` and returns its old bundle. Phase 2 hands out what is
//! left, one good per block per agent.

use num_bigint::BigUint;

use super::trace::{StepKind, TraceStep};
use crate::error::{Error, Result};
use crate::model::{good_name, Allocation, BlockPartition, Good, Instance, Valuation};
use crate::oracle::enumerate::check_bound;

/// Block-feasible subsets of `pool` (sorted) in order of size, then
/// lexicographically.
fn feasible_subsets<'a>(
    pool: &'a [Good],
    blocks: &'a BlockPartition,
) -> impl Iterator<Item = Vec<Good>> + 'a {
    (1..=pool.len().min(blocks.len())).flat_map(move |size| {
        Combinations::new(pool.len(), size)
            .map(move |idx| idx.iter().map(|&i| pool[i]).collect::<Vec<_>>())
            .filter(move |t| blocks.is_feasible(t))
    })
}

/// Index combinations of `0..n` of a fixed size in lexicographic order.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    first: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: (0..k).collect(),
            first: true,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let k = self.idx.len();
        if k > self.n {
            return None;
        }
        if self.first {
            self.first = false;
            return Some(self.idx.clone());
        }
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return Some(self.idx.clone());
            }
        }
        None
    }
}

fn check_monotone_on<V: Valuation>(profile: &[V], t: &[Good]) -> Result<()> {
    for (i, u) in profile.iter().enumerate() {
        let full = u.value(t);
        for &g in t {
            let rest: Vec<Good> = t.iter().copied().filter(|&h| h != g).collect();
            if u.value(&rest) > full {
                return Err(Error::NonMonotone {
                    agent: i,
                    detail: format!("removing {} from a bundle raised its value", good_name(g)),
                });
            }
        }
    }
    Ok(())
}

pub fn solve_mes(instance: &Instance, bound: u64) -> Result<Allocation> {
    Ok(solve_mes_traced(instance, bound)?.0)
}

pub fn solve_mes_traced(instance: &Instance, bound: u64) -> Result<(Allocation, Vec<TraceStep>)> {
    let n = instance.n();
    let m = instance.m();
    let profile = instance.utilities();
    let blocks = BlockPartition::new(&instance.market_ranking()?, n);
    check_bound(
        "minimal envied subset search",
        &(BigUint::from(1u8) << m),
        bound,
    )?;

    let mut alloc = Allocation::empty(n);
    let mut charity: Vec<Good> = (0..m).collect();
    let mut trace = vec![TraceStep::new(StepKind::Init, &alloc)];

    loop {
        let own: Vec<_> = (0..n).map(|i| profile[i].value(alloc.bundle(i))).collect();
        let found = feasible_subsets(&charity, &blocks).find_map(|t| {
            let envier = (0..n).find(|&i| own[i] < profile[i].value(&t))?;
            Some((t, envier))
        });
        let Some((t, agent)) = found else { break };
        check_monotone_on(profile, &t)?;
        let old = alloc.bundle(agent).to_vec();
        charity.retain(|g| !t.contains(g));
        charity.extend(old);
        charity.sort_unstable();
        let names: Vec<String> = t.iter().map(|&g| good_name(g)).collect();
        alloc.set_bundle(agent, t);
        trace.push(TraceStep::new(StepKind::Replace, &alloc).with_note(format!(
            "agent {} takes {{{}}}",
            agent + 1,
            names.join(",")
        )));
    }

    for &g in &charity {
        let k = blocks.block_of(g);
        let taker = (0..n)
            .find(|&i| alloc.bundle(i).iter().all(|&h| blocks.block_of(h) != k))
            .expect("a block never has more leftover goods than agents without one");
        alloc.move_good(g, taker);
    }
    trace.push(TraceStep::new(StepKind::Complete, &alloc));
    Ok((alloc, trace))
}
