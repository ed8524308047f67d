//! Two agents with monotone utilities: EF1 for both while each agent gets
//! exactly one good of every consecutive pair of the market ranking.
//!
//! Pairs are `(pi(1), pi(2)), (pi(3), pi(4)), ...`; an odd good count gets a
//! worthless dummy partner at the end. The search starts from the snake
//! orientation (agent 1 takes the better good of pairs 1, 3, 5, ...) and
//! walks all others as XOR offsets in increasing order; the first EF1
//! orientation is returned.

use crate::criteria::check_ef1;
use crate::error::{Error, Result};
use crate::model::{Allocation, Good, Instance};

pub const DEFAULT_MAX_PAIRS: usize = 12;

/// Market-rank pairs; the dummy good (if any) has index `m`.
pub fn market_pairs(instance: &Instance) -> Result<Vec<(Good, Good)>> {
    let mut order = instance.market_ranking()?.order().to_vec();
    if order.len() % 2 == 1 {
        order.push(instance.m());
    }
    Ok(order.chunks(2).map(|p| (p[0], p[1])).collect())
}

/// Bit `k` of `mask` set means agent 1 takes the first good of pair `k`.
pub fn orient(pairs: &[(Good, Good)], mask: u64, m: usize) -> Allocation {
    let mut bundles = vec![Vec::new(), Vec::new()];
    for (k, &(a, b)) in pairs.iter().enumerate() {
        let (first, second) = if mask >> k & 1 == 1 { (a, b) } else { (b, a) };
        bundles[0].push(first);
        bundles[1].push(second);
    }
    Allocation::new(bundles).truncated(m)
}

pub fn solve_two_agent_pairs(instance: &Instance, max_pairs: usize) -> Result<Allocation> {
    if instance.n() != 2 {
        return Err(Error::Precondition(format!(
            "the pair orientation search needs exactly 2 agents, got {}",
            instance.n()
        )));
    }
    let pairs = market_pairs(instance)?;
    if pairs.len() > max_pairs || pairs.len() >= 64 {
        return Err(Error::BoundExceeded {
            what: "pair orientation search".into(),
            size: format!("{} pairs", pairs.len()),
            bound: max_pairs as u64,
        });
    }
    let total = 1u64 << pairs.len();
    let snake = 0x5555_5555_5555_5555u64 & (total - 1);
    for offset in 0..total {
        let alloc = orient(&pairs, snake ^ offset, instance.m());
        if check_ef1(instance.utilities(), &alloc)?.passed {
            return Ok(alloc);
        }
    }
    Err(Error::NoOrientation { searched: total })
}
