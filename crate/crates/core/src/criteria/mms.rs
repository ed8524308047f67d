//! Exact maximin shares by memoized set-partition search.

use std::collections::HashMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::envy::{check_alpha, check_shape};
use super::report::{Criterion, FairnessReport, Witness};
use crate::error::{Error, Result};
use crate::model::{AdditiveValuation, Allocation, Good, Valuation};
use crate::value::{int, serde_value, Value};

pub const DEFAULT_MMS_MAX_GOODS: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximinShare {
    #[serde(with = "serde_value")]
    pub value: Value,
    /// An `n`-partition whose least valuable bundle is worth exactly `value`.
    pub partition: Allocation,
}

struct Search<'a> {
    values: Vec<&'a Value>,
    suffix: Vec<Value>,
    n: usize,
    memo: HashMap<(usize, Vec<Value>), Value>,
}

impl Search<'_> {
    fn distinct_slots(loads: &[Value]) -> impl Iterator<Item = usize> + '_ {
        (0..loads.len()).filter(move |&k| k == 0 || loads[k] != loads[k - 1])
    }

    fn child(&self, loads: &[Value], idx: usize, k: usize) -> Vec<Value> {
        let mut next = loads.to_vec();
        next[k] += self.values[idx];
        next.sort_unstable();
        next
    }

    /// Best achievable minimum load from `idx` onwards; `loads` sorted ascending.
    fn solve(&mut self, idx: usize, loads: Vec<Value>) -> Value {
        if idx == self.values.len() {
            return loads[0].clone();
        }
        let key = (idx, loads);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let loads = key.1.clone();
        let remaining = &self.suffix[idx];
        let total: Value = loads.iter().sum::<Value>() + remaining;
        let bound = {
            let even = total / int(self.n as i64);
            let lowest = &loads[0] + remaining;
            if lowest < even {
                lowest
            } else {
                even
            }
        };
        let mut best: Option<Value> = None;
        let slots: Vec<usize> = Self::distinct_slots(&loads).collect();
        for k in slots {
            let next = self.child(&loads, idx, k);
            let v = self.solve(idx + 1, next);
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
            if best.as_ref() == Some(&bound) {
                break;
            }
        }
        let best = best.expect("at least one slot");
        self.memo.insert(key, best.clone());
        best
    }
}

/// The maximin share of `val` for `n` agents: the largest achievable value of
/// the least valuable bundle over all `n`-partitions of the goods.
pub fn compute_mms(val: &AdditiveValuation, n: usize, max_goods: usize) -> Result<MaximinShare> {
    if n == 0 {
        return Err(Error::NoAgents);
    }
    let m = val.num_goods();
    if m > max_goods {
        return Err(Error::BoundExceeded {
            what: "maximin share enumeration".into(),
            size: format!("m = {m}"),
            bound: max_goods as u64,
        });
    }
    let mut order: Vec<Good> = (0..m).collect();
    order.sort_by(|&a, &b| val.good(b).cmp(val.good(a)).then(a.cmp(&b)));
    let values: Vec<&Value> = order.iter().map(|&g| val.good(g)).collect();
    let mut suffix = vec![Value::zero(); m + 1];
    for i in (0..m).rev() {
        suffix[i] = &suffix[i + 1] + values[i];
    }
    let mut search = Search {
        values,
        suffix,
        n,
        memo: HashMap::new(),
    };
    let start = vec![Value::zero(); n];
    let value = search.solve(0, start.clone());

    // Walk the memo back down to recover one optimal partition.
    let mut slots: Vec<(Value, Vec<Good>)> = start.into_iter().map(|l| (l, Vec::new())).collect();
    for (idx, &g) in order.iter().enumerate() {
        let loads: Vec<Value> = slots.iter().map(|(l, _)| l.clone()).collect();
        let target = search.solve(idx, loads.clone());
        let k = Search::distinct_slots(&loads)
            .find(|&k| {
                let next = search.child(&loads, idx, k);
                search.solve(idx + 1, next) == target
            })
            .expect("optimal child exists");
        slots[k].0 += val.good(g);
        slots[k].1.push(g);
        slots.sort_by(|a, b| a.0.cmp(&b.0));
    }
    let partition = Allocation::new(slots.into_iter().map(|(_, b)| b).collect());
    debug_assert_eq!(
        partition
            .bundles()
            .iter()
            .map(|b| val.value(b))
            .min()
            .unwrap(),
        value
    );
    Ok(MaximinShare { value, partition })
}

pub fn mms_profile(
    profile: &[AdditiveValuation],
    n: usize,
    max_goods: usize,
) -> Result<Vec<MaximinShare>> {
    profile
        .iter()
        .map(|u| compute_mms(u, n, max_goods))
        .collect()
}

/// alpha-MMS: `u_i(A_i) >= alpha * mu_i` for every agent.
pub fn check_mms_alpha(
    profile: &[AdditiveValuation],
    alloc: &Allocation,
    alpha: &Value,
    max_goods: usize,
) -> Result<FairnessReport> {
    check_alpha(alpha)?;
    check_shape(profile, alloc)?;
    let shares = mms_profile(profile, alloc.n(), max_goods)?;
    let mut witnesses = Vec::new();
    for (i, (u, share)) in profile.iter().zip(&shares).enumerate() {
        let own = u.value(alloc.bundle(i));
        let rhs = alpha * &share.value;
        if own < rhs {
            witnesses.push(Witness::single(i, own, rhs));
        }
    }
    Ok(FairnessReport::new(Criterion::Mms, witnesses).with_alpha(alpha.clone()))
}
