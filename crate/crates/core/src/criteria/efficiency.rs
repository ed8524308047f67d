//! Pareto optimality, fractional Pareto optimality, Fisher-market
//! equilibrium and balancedness.

use num_traits::{One, Signed, Zero};

use super::envy::check_shape;
use super::report::{Criterion, FairnessReport, Witness};
use crate::error::{Error, Result};
use crate::model::{validate_allocation, AdditiveValuation, Allocation, Valuation};
use crate::oracle::enumerate::{check_bound, count_allocations, AllocationIter, Constraint};
use crate::value::{format_value, Value};

/// Integral PO by exhaustive scan of all `n^m` allocations. The first
/// dominating allocation in lexicographic order is returned as the
/// counterexample.
pub fn check_po_bruteforce<V: Valuation>(
    profile: &[V],
    alloc: &Allocation,
    bound: u64,
) -> Result<FairnessReport> {
    check_shape(profile, alloc)?;
    let n = alloc.n();
    let m = profile.first().map_or(0, Valuation::num_goods);
    check_bound(
        "Pareto dominance scan",
        &count_allocations(n, m, &Constraint::None),
        bound,
    )?;
    let current: Vec<Value> = profile
        .iter()
        .enumerate()
        .map(|(i, u)| u.value(alloc.bundle(i)))
        .collect();
    let mut it = AllocationIter::new(n, m, Constraint::None);
    let mut bundles: Vec<Vec<usize>> = vec![Vec::new(); n];
    while let Some(owners) = it.next_owners() {
        for b in &mut bundles {
            b.clear();
        }
        for (g, &a) in owners.iter().enumerate() {
            bundles[a].push(g);
        }
        let mut strict = None;
        let mut dominated = true;
        for (i, u) in profile.iter().enumerate() {
            let v = u.value(&bundles[i]);
            if v < current[i] {
                dominated = false;
                break;
            }
            if strict.is_none() && v > current[i] {
                strict = Some((i, v));
            }
        }
        if let (true, Some((i, v))) = (dominated, strict) {
            let mut report = FairnessReport::new(
                Criterion::Po,
                vec![Witness::single(i, v, current[i].clone())],
            );
            report.counterexample = Some(Allocation::new(bundles));
            return Ok(report);
        }
    }
    Ok(FairnessReport::new(Criterion::Po, Vec::new()))
}

/// Fractional PO for additive utilities via the exchange-cycle test.
///
/// Edge `i -> j` carries the best ratio `u_i(g) / u_j(g)` over goods `g` held
/// by `j`. The allocation is fPO iff no directed cycle has ratio product
/// greater than one. A good valued zero by its holder but positive by someone
/// else is an immediate improvement. On failure the witnesses list the cycle
/// edges (`lhs = u_i(g)`, `rhs = u_j(g)`).
pub fn check_fpo(profile: &[AdditiveValuation], alloc: &Allocation) -> Result<FairnessReport> {
    check_shape(profile, alloc)?;
    let n = alloc.n();
    // weight[i][j] = (ratio, good)
    let mut weight: Vec<Vec<Option<(Value, usize)>>> = vec![vec![None; n]; n];
    for j in 0..n {
        for &g in alloc.bundle(j) {
            let holder = profile[j].good(g);
            for i in 0..n {
                if i == j || profile[i].good(g).is_zero() {
                    continue;
                }
                if holder.is_zero() {
                    let w = Witness::pair(i, j, Some(g), profile[i].good(g).clone(), Value::zero());
                    return Ok(FairnessReport::new(Criterion::Fpo, vec![w])
                        .with_detail("a good worthless to its holder is valued by another agent"));
                }
                let r = profile[i].good(g) / holder;
                if weight[i][j].as_ref().is_none_or(|(best, _)| r > *best) {
                    weight[i][j] = Some((r, g));
                }
            }
        }
    }
    match improving_cycle(&weight) {
        None => Ok(FairnessReport::new(Criterion::Fpo, Vec::new())),
        Some(cycle) => {
            let mut product = Value::one();
            let witnesses = cycle
                .iter()
                .map(|&(i, j)| {
                    let (r, g) = weight[i][j].clone().expect("edge on cycle");
                    product *= r;
                    Witness::pair(
                        i,
                        j,
                        Some(g),
                        profile[i].good(g).clone(),
                        profile[j].good(g).clone(),
                    )
                })
                .collect();
            Ok(
                FairnessReport::new(Criterion::Fpo, witnesses).with_detail(format!(
                    "exchange cycle with ratio product {} > 1",
                    format_value(&product)
                )),
            )
        }
    }
}

/// Bellman-Ford on multiplicative weights; returns the edges of a cycle whose
/// product exceeds one.
fn improving_cycle(weight: &[Vec<Option<(Value, usize)>>]) -> Option<Vec<(usize, usize)>> {
    let n = weight.len();
    let mut best = vec![Value::one(); n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut last_updated = None;
    for _ in 0..n {
        last_updated = None;
        for i in 0..n {
            for j in 0..n {
                if let Some((w, _)) = &weight[i][j] {
                    let cand = &best[i] * w;
                    if cand > best[j] {
                        best[j] = cand;
                        pred[j] = Some(i);
                        last_updated = Some(j);
                    }
                }
            }
        }
        last_updated?;
    }
    let mut v = last_updated?;
    for _ in 0..n {
        v = pred[v].expect("updated vertex has a predecessor");
    }
    let start = v;
    let mut cycle = Vec::new();
    loop {
        let p = pred[v].expect("cycle vertex has a predecessor");
        cycle.push((p, v));
        v = p;
        if v == start {
            break;
        }
    }
    cycle.reverse();
    Some(cycle)
}

/// Fisher-market equilibrium: every good is allocated and every agent holds
/// only maximum bang-per-buck goods.
pub fn check_fisher_equilibrium(
    utilities: &[AdditiveValuation],
    alloc: &Allocation,
    prices: &[Value],
) -> Result<FairnessReport> {
    check_shape(utilities, alloc)?;
    let m = utilities.first().map_or(prices.len(), Valuation::num_goods);
    if prices.len() != m {
        return Err(Error::Length {
            what: "price vector".into(),
            expected: m,
            found: prices.len(),
        });
    }
    if let Some(g) = prices.iter().position(|p| !p.is_positive()) {
        return Err(Error::NonPositivePrice { good: g });
    }
    let mut witnesses = Vec::new();
    if let Err(violations) = validate_allocation(alloc.n(), m, alloc) {
        for v in violations {
            if let crate::model::Violation::Unallocated { good } = v {
                witnesses.push(Witness {
                    agent: None,
                    other: None,
                    good: Some(good),
                    threshold: None,
                    block: None,
                    lhs: Value::zero(),
                    rhs: Value::one(),
                });
            }
        }
    }
    for (i, u) in utilities.iter().enumerate() {
        let mbb = (0..m)
            .map(|h| u.good(h) / &prices[h])
            .max()
            .unwrap_or_else(Value::zero);
        for &g in alloc.bundle(i) {
            let bb = u.good(g) / &prices[g];
            if bb < mbb {
                let mut w = Witness::single(i, bb, mbb.clone());
                w.good = Some(g);
                witnesses.push(w);
            }
        }
    }
    Ok(FairnessReport::new(Criterion::FisherEquilibrium, witnesses))
}

/// Bundle sizes all lie in `{floor(m/n), ceil(m/n)}`.
pub fn check_balanced(alloc: &Allocation, n: usize, m: usize) -> bool {
    if alloc.n() != n || n == 0 {
        return false;
    }
    let lo = m / n;
    let hi = m.div_ceil(n);
    alloc
        .bundles()
        .iter()
        .all(|b| b.len() == lo || b.len() == hi)
}

pub fn balanced_report(alloc: &Allocation, n: usize, m: usize) -> FairnessReport {
    let lo = m / n.max(1);
    let hi = m.div_ceil(n.max(1));
    let witnesses = alloc
        .bundles()
        .iter()
        .enumerate()
        .filter(|(_, b)| b.len() != lo && b.len() != hi)
        .map(|(i, b)| {
            let size = crate::value::int(b.len() as i64);
            let bound = crate::value::int(if b.len() < lo { lo } else { hi } as i64);
            if b.len() < lo {
                Witness::single(i, size, bound)
            } else {
                Witness::single(i, bound, size)
            }
        })
        .collect();
    FairnessReport::new(Criterion::Balanced, witnesses).on(super::Side::Market)
}
