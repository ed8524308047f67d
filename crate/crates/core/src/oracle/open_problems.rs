//! Brute-force searches for counterexamples to two open existence questions.
//! A found instance is re-checked with the exact criteria before it is
//! reported; finding none says nothing beyond the scanned grid.
//!
//! Every criterion involved is invariant under scaling all values, so grid
//! values are scaled to integers and the scan runs on `i64`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use super::enumerate::{check_bound, AllocationIter, Constraint};
use super::search::exists_allocation;
use crate::criteria::CriterionSpec;
use crate::error::{Error, Result};
use crate::io::instance_to_value;
use crate::model::{AdditiveValuation, Instance};
use crate::value::{format_value, int, Value};
use crate::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpenProblem {
    /// SD-EF1 for the agents together with EF1 for the market.
    SdEf1WithMarketEf1,
    /// EF1 + PO for the agents together with EF1 for the market.
    Ef1PoWithMarketEf1,
}

impl OpenProblem {
    pub fn id(self) -> &'static str {
        match self {
            OpenProblem::SdEf1WithMarketEf1 => "op_3_4",
            OpenProblem::Ef1PoWithMarketEf1 => "op_4_2",
        }
    }

    pub fn criteria(self) -> Vec<CriterionSpec> {
        let list: &[&str] = match self {
            OpenProblem::SdEf1WithMarketEf1 => &["sdef1:agents", "ef1:market"],
            OpenProblem::Ef1PoWithMarketEf1 => &["ef1:agents", "po:agents", "ef1:market"],
        };
        list.iter()
            .map(|s| s.parse().expect("built-in criteria parse"))
            .collect()
    }
}

impl FromStr for OpenProblem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "op_3_4" => Ok(OpenProblem::SdEf1WithMarketEf1),
            "op_4_2" => Ok(OpenProblem::Ef1PoWithMarketEf1),
            other => Err(Error::UnknownId {
                kind: "open problem",
                id: other.into(),
            }),
        }
    }
}

impl fmt::Display for OpenProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OpenProblemReport {
    pub problem: String,
    pub n: usize,
    pub max_goods: usize,
    pub grid: Vec<String>,
    /// Value profiles examined over all good counts.
    pub profiles: u64,
    #[serde(
        serialize_with = "instance_json",
        skip_serializing_if = "Option::is_none"
    )]
    pub counterexample: Option<Instance>,
    pub detail: String,
}

fn instance_json<S: Serializer>(
    inst: &Option<Instance>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match inst {
        Some(i) => instance_to_value(i)
            .map_err(serde::ser::Error::custom)?
            .serialize(s),
        None => s.serialize_none(),
    }
}

/// Good `g` goes to `owners[a][g]` in allocation `a`.
struct Allocations {
    n: usize,
    owners: Vec<Vec<usize>>,
}

impl Allocations {
    fn new(n: usize, m: usize) -> Self {
        let mut iter = AllocationIter::new(n, m, Constraint::None);
        let mut owners = Vec::new();
        while let Some(o) = iter.next_owners() {
            owners.push(o.to_vec());
        }
        Self { n, owners }
    }

    fn bundle_values(&self, a: usize, w: &[i64]) -> Vec<i64> {
        let mut v = vec![0; self.n];
        for (g, &o) in self.owners[a].iter().enumerate() {
            v[o] += w[g];
        }
        v
    }

    /// Agent `i` valuing goods by `w` has no EF1 complaint.
    fn ef1_content(&self, a: usize, i: usize, w: &[i64]) -> bool {
        let vals = self.bundle_values(a, w);
        let mut top = vec![0; self.n];
        for (g, &o) in self.owners[a].iter().enumerate() {
            top[o] = top[o].max(w[g]);
        }
        (0..self.n).all(|j| j == i || vals[i] >= vals[j] - top[j])
    }

    /// Agent `i` valuing goods by `w` has no SD-EF1 complaint.
    fn sd_content(&self, a: usize, i: usize, w: &[i64]) -> bool {
        let owners = &self.owners[a];
        (0..self.n).filter(|&j| j != i).all(|j| {
            let mut theirs: Vec<i64> = (0..w.len())
                .filter(|&g| owners[g] == j)
                .map(|g| w[g])
                .collect();
            if theirs.is_empty() {
                return true;
            }
            theirs.sort_unstable_by(|x, y| y.cmp(x));
            theirs.remove(0);
            let mine: Vec<i64> = (0..w.len())
                .filter(|&g| owners[g] == i)
                .map(|g| w[g])
                .collect();
            theirs.iter().all(|&t| {
                mine.iter().filter(|&&x| x >= t).count()
                    >= theirs.iter().filter(|&&x| x >= t).count()
            })
        })
    }

    fn mask(&self, pred: impl Fn(usize) -> bool) -> u128 {
        (0..self.owners.len()).fold(0, |m, a| if pred(a) { m | 1 << a } else { m })
    }

    /// Allocations not Pareto dominated under the profile `ws`.
    fn po_mask(&self, ws: &[Vec<i64>]) -> u128 {
        let table: Vec<Vec<i64>> = (0..self.owners.len())
            .map(|a| {
                (0..self.n)
                    .map(|i| self.bundle_values(a, &ws[i])[i])
                    .collect()
            })
            .collect();
        self.mask(|a| {
            !table.iter().any(|b| {
                b.iter().zip(&table[a]).all(|(x, y)| x >= y)
                    && b.iter().zip(&table[a]).any(|(x, y)| x > y)
            })
        })
    }
}

/// Smallest masks first, dropping any mask that contains a kept one.
fn minimal<T: Clone>(mut items: Vec<(u128, T)>) -> Vec<(u128, T)> {
    items.sort_by_key(|(m, _)| m.count_ones());
    let mut kept: Vec<(u128, T)> = Vec::new();
    for (m, t) in items {
        if !kept.iter().any(|(k, _)| k & m == *k) {
            kept.push((m, t));
        }
    }
    kept
}

/// Every vector in `grid^m`, as indices into the grid.
fn vectors(grid: &[i64], m: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|v| {
                grid.iter().map(move |&x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Scales `grid` to integers; the grid must be nonnegative and nonempty.
fn integer_grid(grid: &[Value]) -> Result<(Vec<i64>, Value)> {
    if grid.is_empty() {
        return Err(Error::Precondition("the value grid is empty".into()));
    }
    let lcm = grid
        .iter()
        .fold(num_bigint::BigInt::from(1), |acc, v| acc.lcm(v.denom()));
    let scale = Value::from_integer(lcm);
    let ints = grid
        .iter()
        .map(|v| {
            if *v < Value::default() {
                return Err(Error::Precondition(format!(
                    "negative grid value {}",
                    format_value(v)
                )));
            }
            (v * &scale)
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::Precondition("grid values too large".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut ints = ints;
    ints.sort_unstable();
    ints.dedup();
    Ok((ints, scale))
}

fn to_instance(ws: &[Vec<i64>], v: &[i64], scale: &Value) -> Result<Instance> {
    let row = |w: &[i64]| AdditiveValuation::new(w.iter().map(|&x| int(x) / scale).collect());
    Instance::additive(ws.iter().map(|w| row(w)).collect::<Result<_>>()?, row(v)?)
}

pub fn search_open_problem(
    problem: OpenProblem,
    n: usize,
    max_goods: usize,
    grid: &[Value],
    limits: &Limits,
) -> Result<OpenProblemReport> {
    if n == 0 {
        return Err(Error::NoAgents);
    }
    let (ints, scale) = integer_grid(grid)?;
    let mut report = OpenProblemReport {
        problem: problem.id().into(),
        n,
        max_goods,
        grid: grid.iter().map(format_value).collect(),
        profiles: 0,
        counterexample: None,
        detail: String::new(),
    };
    for m in 1..=max_goods {
        let allocs = BigUint::from(n).pow(m as u32);
        if allocs > BigUint::from(128u8) {
            return Err(Error::BoundExceeded {
                what: "open problem search allocations per instance".into(),
                size: allocs.to_string(),
                bound: 128,
            });
        }
        let exponent = match problem {
            OpenProblem::SdEf1WithMarketEf1 => m,
            OpenProblem::Ef1PoWithMarketEf1 => n * m,
        };
        let profiles = BigUint::from(ints.len()).pow(exponent as u32);
        check_bound(
            "open problem value profiles",
            &(&profiles * &allocs),
            limits.enumeration_bound,
        )?;
        report.profiles += profiles.to_u64().unwrap_or(u64::MAX);

        let table = Allocations::new(n, m);
        let vecs = vectors(&ints, m);
        let market = minimal(
            vecs.iter()
                .map(|v| {
                    (
                        table.mask(|a| (0..n).all(|i| table.ef1_content(a, i, v))),
                        v.clone(),
                    )
                })
                .collect(),
        );
        let found = match problem {
            OpenProblem::SdEf1WithMarketEf1 => {
                let per_agent: Vec<Vec<(u128, Vec<i64>)>> = (0..n)
                    .map(|i| {
                        minimal(
                            vecs.iter()
                                .map(|w| (table.mask(|a| table.sd_content(a, i, w)), w.clone()))
                                .collect(),
                        )
                    })
                    .collect();
                let mut choice = Vec::with_capacity(n);
                empty_product(&per_agent, &market, u128::MAX, &mut choice)
            }
            OpenProblem::Ef1PoWithMarketEf1 => {
                let mut joint = Vec::new();
                let mut idx = vec![0usize; n];
                loop {
                    let ws: Vec<Vec<i64>> = idx.iter().map(|&k| vecs[k].clone()).collect();
                    let ef1 = table.mask(|a| (0..n).all(|i| table.ef1_content(a, i, &ws[i])));
                    joint.push((ef1 & table.po_mask(&ws), ws));
                    if !advance(&mut idx, vecs.len()) {
                        break;
                    }
                }
                let joint = minimal(joint);
                joint.iter().find_map(|(mask, ws)| {
                    market
                        .iter()
                        .find(|(mv, _)| mask & mv == 0)
                        .map(|(_, v)| (ws.clone(), v.clone()))
                })
            }
        };
        if let Some((ws, v)) = found {
            let inst = to_instance(&ws, &v, &scale)?;
            let confirmed = exists_allocation(&inst, &problem.criteria(), limits)?.is_none();
            report.detail = format!(
                "{m} goods: no allocation satisfies the conjunction{}",
                if confirmed {
                    ""
                } else {
                    " under the integer scan, but the exact check disagrees"
                }
            );
            report.counterexample = Some(inst);
            return Ok(report);
        }
    }
    report.detail = format!(
        "no counterexample with {n} agents, at most {max_goods} goods and values in the grid"
    );
    Ok(report)
}

fn advance(idx: &mut [usize], base: usize) -> bool {
    for k in idx.iter_mut().rev() {
        *k += 1;
        if *k < base {
            return true;
        }
        *k = 0;
    }
    false
}

/// Picks one mask per agent so that, with some market mask, no allocation
/// survives. Returns the chosen valuations.
fn empty_product(
    per_agent: &[Vec<(u128, Vec<i64>)>],
    market: &[(u128, Vec<i64>)],
    acc: u128,
    choice: &mut Vec<Vec<i64>>,
) -> Option<(Vec<Vec<i64>>, Vec<i64>)> {
    let Some((first, rest)) = per_agent.split_first() else {
        return market
            .iter()
            .find(|(m, _)| acc & m == 0)
            .map(|(_, v)| (choice.clone(), v.clone()));
    };
    for (mask, w) in first {
        choice.push(w.clone());
        if let Some(hit) = empty_product(rest, market, acc & mask, choice) {
            return Some(hit);
        }
        choice.pop();
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::ratio;

    fn grid(k: i64) -> Vec<Value> {
        (1..=k).map(int).collect()
    }

    #[test]
    fn single_good_has_no_counterexample() {
        for p in [
            OpenProblem::SdEf1WithMarketEf1,
            OpenProblem::Ef1PoWithMarketEf1,
        ] {
            let r = search_open_problem(p, 2, 1, &grid(5), &Limits::default()).unwrap();
            assert!(r.counterexample.is_none());
        }
    }

    #[test]
    fn small_sd_scan_is_clean() {
        let r = search_open_problem(
            OpenProblem::SdEf1WithMarketEf1,
            2,
            4,
            &grid(3),
            &Limits::default(),
        )
        .unwrap();
        assert!(r.counterexample.is_none(), "{}", r.detail);
        assert_eq!(r.profiles, 3 + 9 + 27 + 81);
    }

    #[test]
    fn small_po_scan_is_clean() {
        let r = search_open_problem(
            OpenProblem::Ef1PoWithMarketEf1,
            2,
            3,
            &grid(3),
            &Limits::default(),
        )
        .unwrap();
        assert!(r.counterexample.is_none(), "{}", r.detail);
    }

    #[test]
    fn zero_utilities_break_po_with_market_ef1() {
        let g = vec![int(0), int(1), int(3)];
        let r = search_open_problem(
            OpenProblem::Ef1PoWithMarketEf1,
            2,
            3,
            &g,
            &Limits::default(),
        )
        .unwrap();
        let inst = r
            .counterexample
            .expect("an agent valuing nothing forces everything to the other");
        assert_eq!(inst.m(), 2);
    }

    #[test]
    fn four_goods_po_counterexample() {
        let r = search_open_problem(
            OpenProblem::Ef1PoWithMarketEf1,
            2,
            4,
            &grid(4),
            &Limits::default(),
        )
        .unwrap();
        let inst = r.counterexample.expect("found on the 1..4 grid");
        let expected = Instance::from_ints(&[&[1, 1, 1, 1], &[2, 2, 3, 3]], &[1, 1, 3, 3]).unwrap();
        assert_eq!(
            instance_to_value(&inst).unwrap(),
            instance_to_value(&expected).unwrap()
        );
        let crit = OpenProblem::Ef1PoWithMarketEf1.criteria();
        assert!(exists_allocation(&expected, &crit, &Limits::default())
            .unwrap()
            .is_none());
        // Dropping any one requirement leaves a witness.
        for skip in 0..crit.len() {
            let rest: Vec<_> = crit
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != skip)
                .map(|(_, c)| c.clone())
                .collect();
            assert!(exists_allocation(&expected, &rest, &Limits::default())
                .unwrap()
                .is_some());
        }
    }

    #[test]
    fn rational_grid_is_scaled() {
        let (ints, scale) = integer_grid(&[ratio(1, 2), ratio(1, 3), int(1)]).unwrap();
        assert_eq!(ints, vec![2, 3, 6]);
        assert_eq!(scale, int(6));
    }

    #[test]
    fn masks_keep_only_minimal_sets() {
        let kept = minimal(vec![(0b111, ()), (0b011, ()), (0b001, ()), (0b110, ())]);
        let masks: Vec<u128> = kept.iter().map(|(m, _)| *m).collect();
        assert_eq!(masks, vec![0b001, 0b110]);
    }
}
