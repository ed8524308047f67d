//! EQ1 for the market values and fPO for the subjective utilities via a
//! Fisher market.
//!
//! Prices and bang-per-buck ratios are computed from the subjective
//! utilities; equitability is measured with the (possibly per-agent) market
//! values. The allocation stays an equilibrium throughout: goods only move to
//! agents for whom they are maximum bang-per-buck, and price rises keep every
//! held good MBB for its holder.

use std::collections::{BTreeSet, VecDeque};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::trace::{StepKind, TraceStep};
use crate::criteria::check_eq1;
use crate::error::{Error, Result};
use crate::model::{good_name, AdditiveValuation, Allocation, Good, Instance, Valuation};
use crate::value::{format_value, serde_value_vec, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarketOutcome {
    pub allocation: Allocation,
    #[serde(with = "serde_value_vec")]
    pub prices: Vec<Value>,
    /// Number of distinct per-good market values, the `V` of the running
    /// time bound.
    pub value_levels: usize,
    pub iterations: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceStep>,
}

/// Step limit used when none is configured: `4 (nm + 1)^3 (V + 1)`.
pub fn default_iteration_guard(n: usize, m: usize, value_levels: usize) -> u64 {
    let base = (n * m + 1) as u64;
    4 * base.pow(3) * (value_levels as u64 + 1)
}

struct Market<'a> {
    u: &'a [AdditiveValuation],
    v: &'a [AdditiveValuation],
    owner: Vec<usize>,
    prices: Vec<Value>,
}

impl Market<'_> {
    fn n(&self) -> usize {
        self.u.len()
    }

    fn m(&self) -> usize {
        self.prices.len()
    }

    fn allocation(&self) -> Allocation {
        Allocation::from_owners(self.n(), &self.owner)
    }

    fn bundle(&self, i: usize) -> Vec<Good> {
        (0..self.m()).filter(|&g| self.owner[g] == i).collect()
    }

    fn market_value(&self, i: usize) -> Value {
        self.v[i].value(&self.bundle(i))
    }

    fn bang_per_buck(&self, i: usize, g: Good) -> Value {
        self.u[i].good(g) / &self.prices[g]
    }

    fn mbb(&self) -> Vec<Value> {
        (0..self.n())
            .map(|i| {
                (0..self.m())
                    .map(|g| self.bang_per_buck(i, g))
                    .max()
                    .unwrap_or_else(Value::zero)
            })
            .collect()
    }

    /// Searches MBB alternating paths from the least-valued agents, level by
    /// level. Returns the first edge `(receiver, good, holder)` whose holder
    /// still beats the minimum after losing the good, together with the
    /// path length, or the hierarchy reached when there is none.
    fn find_violation(
        &self,
        lowest: &[usize],
        vmin: &Value,
    ) -> std::result::Result<(usize, Good, usize, usize), Vec<bool>> {
        let n = self.n();
        let mbb = self.mbb();
        let mut depth = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for &i in lowest {
            depth[i] = 0;
            queue.push_back(i);
        }
        while let Some(a) = queue.pop_front() {
            for g in 0..self.m() {
                let b = self.owner[g];
                // Agents already reached sit on a shorter path.
                if depth[b] != usize::MAX || self.bang_per_buck(a, g) != mbb[a] {
                    continue;
                }
                let rest: Vec<Good> = self.bundle(b).into_iter().filter(|&h| h != g).collect();
                if &self.v[b].value(&rest) > vmin {
                    return Ok((a, g, b, depth[a] + 1));
                }
                depth[b] = depth[a] + 1;
                queue.push_back(b);
            }
        }
        Err(depth.into_iter().map(|d| d != usize::MAX).collect())
    }

    /// Raises the prices of goods held inside the hierarchy by the smallest
    /// factor that makes some outside good MBB for an inside agent.
    fn raise_prices(&mut self, inside: &[bool]) -> Result<Value> {
        let mbb = self.mbb();
        let mut beta: Option<Value> = None;
        for i in (0..self.n()).filter(|&i| inside[i]) {
            for g in (0..self.m()).filter(|&g| !inside[self.owner[g]]) {
                let r = &mbb[i] / self.bang_per_buck(i, g);
                if beta.as_ref().is_none_or(|b| r < *b) {
                    beta = Some(r);
                }
            }
        }
        let beta = beta.ok_or_else(|| {
            Error::Precondition("no goods outside the hierarchy to price against".into())
        })?;
        for g in 0..self.m() {
            if inside[self.owner[g]] {
                self.prices[g] = &self.prices[g] * &beta;
            }
        }
        Ok(beta)
    }
}

pub fn solve_eq1_fpo(instance: &Instance, guard: Option<u64>) -> Result<MarketOutcome> {
    solve_eq1_fpo_impl(instance, guard, false)
}

/// As [`solve_eq1_fpo`], recording a snapshot after every transfer and price
/// rise.
pub fn solve_eq1_fpo_traced(instance: &Instance, guard: Option<u64>) -> Result<MarketOutcome> {
    solve_eq1_fpo_impl(instance, guard, true)
}

fn solve_eq1_fpo_impl(
    instance: &Instance,
    guard: Option<u64>,
    record: bool,
) -> Result<MarketOutcome> {
    let u = instance.require_additive_utilities("EQ1 + fPO market solver")?;
    if let Some((agent, good)) = instance.zero_utility() {
        return Err(Error::ZeroUtility { agent, good });
    }
    let v = instance.market_profile();
    let n = instance.n();
    let m = instance.m();
    let value_levels = v
        .iter()
        .flat_map(|vi| vi.values().iter().cloned())
        .collect::<BTreeSet<_>>()
        .len();
    let limit = guard.unwrap_or_else(|| default_iteration_guard(n, m, value_levels));

    // Welfare-maximizing start; ties go to the lowest agent.
    let owner: Vec<usize> = (0..m)
        .map(|g| {
            (0..n).fold(0, |best, i| {
                if u[i].good(g) > u[best].good(g) {
                    i
                } else {
                    best
                }
            })
        })
        .collect();
    let prices: Vec<Value> = (0..m).map(|g| u[owner[g]].good(g).clone()).collect();
    let mut market = Market {
        u: &u,
        v: &v,
        owner,
        prices,
    };
    let mut trace = Vec::new();
    let mut snapshot = |kind: StepKind, market: &Market, note: Option<String>| {
        if record {
            let mut step = TraceStep::new(kind, &market.allocation()).with_prices(&market.prices);
            step.note = note;
            trace.push(step);
        }
    };
    snapshot(StepKind::Init, &market, None);

    let mut iterations = 0u64;
    loop {
        let values: Vec<Value> = (0..n).map(|i| market.market_value(i)).collect();
        let vmin = values.iter().min().cloned().unwrap_or_else(Value::zero);
        let lowest: Vec<usize> = (0..n).filter(|&i| values[i] == vmin).collect();
        match market.find_violation(&lowest, &vmin) {
            Ok((to, g, from, len)) => {
                iterations += 1;
                if iterations > limit {
                    return Err(Error::IterationGuard { limit });
                }
                market.owner[g] = to;
                snapshot(
                    StepKind::Transfer,
                    &market,
                    Some(format!(
                        "{} from agent {} to agent {} (path length {len})",
                        good_name(g),
                        from + 1,
                        to + 1
                    )),
                );
            }
            Err(inside) => {
                let alloc = market.allocation();
                if check_eq1(&v, &alloc)?.passed {
                    break;
                }
                iterations += 1;
                if iterations > limit {
                    return Err(Error::IterationGuard { limit });
                }
                let beta = market.raise_prices(&inside)?;
                snapshot(
                    StepKind::PriceRise,
                    &market,
                    Some(format!("factor {}", format_value(&beta))),
                );
            }
        }
    }
    snapshot(StepKind::Done, &market, None);
    Ok(MarketOutcome {
        allocation: market.allocation(),
        prices: market.prices,
        value_levels,
        iterations,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{check_ef1, check_fisher_equilibrium, check_fpo};
    use crate::value::int;

    #[test]
    fn welfare_start_is_already_eq1() {
        let inst = Instance::from_ints(&[&[2, 1], &[1, 2]], &[1, 1]).unwrap();
        let out = solve_eq1_fpo(&inst, None).unwrap();
        assert_eq!(out.allocation.bundles(), &[vec![0], vec![1]]);
        assert_eq!(out.prices, vec![int(2), int(2)]);
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn four_goods_unit_market() {
        let inst = Instance::from_ints(&[&[4, 4, 1, 1], &[3, 3, 1, 1]], &[1, 1, 1, 1]).unwrap();
        let out = solve_eq1_fpo_traced(&inst, None).unwrap();
        let u = inst.require_additive_utilities("test").unwrap();
        let v = inst.market_profile();
        assert!(check_eq1(&v, &out.allocation).unwrap().passed);
        assert!(
            check_fisher_equilibrium(&u, &out.allocation, &out.prices)
                .unwrap()
                .passed
        );
        assert!(check_fpo(&u, &out.allocation).unwrap().passed);
        let all_three = check_ef1(&u, &out.allocation).unwrap().passed
            && check_ef1(&v, &out.allocation).unwrap().passed;
        assert!(!all_three);
        for step in &out.trace {
            assert!(
                check_fisher_equilibrium(&u, &step.allocation, &step.prices)
                    .unwrap()
                    .passed
            );
        }
    }

    #[test]
    fn tied_mbb_goods_do_not_bounce_between_agents() {
        let inst = Instance::from_ints(
            &[
                &[9, 4, 5, 9, 8, 5],
                &[4, 6, 5, 7, 8, 8],
                &[9, 10, 3, 8, 2, 6],
            ],
            &[3, 6, 2, 4, 8, 2],
        )
        .unwrap();
        let out = solve_eq1_fpo(&inst, Some(200)).unwrap();
        let u = inst.require_additive_utilities("test").unwrap();
        assert!(
            check_eq1(&inst.market_profile(), &out.allocation)
                .unwrap()
                .passed
        );
        assert!(
            check_fisher_equilibrium(&u, &out.allocation, &out.prices)
                .unwrap()
                .passed
        );
    }

    #[test]
    fn single_agent_takes_everything() {
        let inst = Instance::from_ints(&[&[3, 1, 2]], &[0, 0, 5]).unwrap();
        let out = solve_eq1_fpo(&inst, None).unwrap();
        assert_eq!(out.allocation.bundles(), &[vec![0, 1, 2]]);
        assert_eq!(out.prices, vec![int(3), int(1), int(2)]);
    }

    #[test]
    fn zero_utility_is_rejected() {
        let inst = Instance::from_ints(&[&[1, 0], &[1, 1]], &[1, 1]).unwrap();
        assert!(matches!(
            solve_eq1_fpo(&inst, None),
            Err(Error::ZeroUtility { agent: 0, good: 1 })
        ));
    }
}
