//! Exhaustive predicate search over allocations.

use serde::Serialize;

use super::enumerate::{enumerate_allocations, Constraint};
use crate::criteria::{evaluate, mms_profile, own_values, Criterion, CriterionSpec, Side};
use crate::error::Result;
use crate::model::{Allocation, Instance};
use crate::value::Value;
use crate::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanResult {
    pub examined: u64,
    pub satisfying: u64,
    /// Lexicographically first satisfying allocation.
    pub first: Option<Allocation>,
}

/// A predicate prepared once per instance. Maximin thresholds are computed
/// up front instead of once per allocation.
enum Prepared<'a> {
    MmsThresholds { side: Side, thresholds: Vec<Value> },
    Spec(&'a CriterionSpec),
}

fn prepare<'a>(
    instance: &Instance,
    specs: &'a [CriterionSpec],
    limits: &Limits,
) -> Result<Vec<Prepared<'a>>> {
    specs
        .iter()
        .map(|spec| {
            if spec.criterion != Criterion::Mms {
                return Ok(Prepared::Spec(spec));
            }
            let profile = match spec.side {
                Side::Agents => instance.require_additive_utilities("maximin share")?,
                Side::Market => instance.market_profile(),
            };
            let alpha = spec.alpha.clone().unwrap_or_else(crate::value::one);
            let thresholds = mms_profile(&profile, instance.n(), limits.mms_max_goods)?
                .into_iter()
                .map(|s| &alpha * s.value)
                .collect();
            Ok(Prepared::MmsThresholds {
                side: spec.side,
                thresholds,
            })
        })
        .collect()
}

fn holds(instance: &Instance, alloc: &Allocation, p: &Prepared, limits: &Limits) -> Result<bool> {
    match p {
        Prepared::Spec(spec) => Ok(evaluate(instance, alloc, spec, limits, None)?.passed),
        Prepared::MmsThresholds { side, thresholds } => {
            let own = match side {
                Side::Agents => own_values(instance.utilities(), alloc),
                Side::Market => own_values(&instance.market_profile(), alloc),
            };
            Ok(own.iter().zip(thresholds).all(|(o, t)| o >= t))
        }
    }
}

/// Scans every allocation allowed by `constraint` against the conjunction of
/// `specs`. With `stop_at_first` the scan ends at the first match.
pub fn scan(
    instance: &Instance,
    specs: &[CriterionSpec],
    constraint: Constraint,
    limits: &Limits,
    stop_at_first: bool,
) -> Result<ScanResult> {
    let prepared = prepare(instance, specs, limits)?;
    let mut iter = enumerate_allocations(
        instance.n(),
        instance.m(),
        constraint,
        limits.enumeration_bound,
    )?;
    let mut result = ScanResult {
        examined: 0,
        satisfying: 0,
        first: None,
    };
    while let Some(owners) = iter.next_owners() {
        let alloc = Allocation::from_owners(instance.n(), owners);
        result.examined += 1;
        let mut ok = true;
        for p in &prepared {
            if !holds(instance, &alloc, p, limits)? {
                ok = false;
                break;
            }
        }
        if ok {
            result.satisfying += 1;
            if result.first.is_none() {
                result.first = Some(alloc);
                if stop_at_first {
                    break;
                }
            }
        }
    }
    Ok(result)
}

/// First allocation (lexicographic in the owner vector) satisfying every
/// predicate, if any.
pub fn exists_allocation(
    instance: &Instance,
    specs: &[CriterionSpec],
    limits: &Limits,
) -> Result<Option<Allocation>> {
    Ok(scan(instance, specs, Constraint::None, limits, true)?.first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::library::{thm_3_1, thm_4_1};

    fn specs(list: &str) -> Vec<CriterionSpec> {
        list.split(',').map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn sd_ef1_both_sides_has_no_witness() {
        let found = exists_allocation(
            &thm_3_1(),
            &specs("sdef1:agents,sdef1:market"),
            &Limits::default(),
        )
        .unwrap();
        assert!(found.is_none());
    }

    #[test]
    fn ef1_always_has_a_witness() {
        let inst = thm_4_1();
        let a = exists_allocation(&inst, &specs("ef1:agents"), &Limits::default())
            .unwrap()
            .unwrap();
        assert!(
            crate::criteria::check_ef1(inst.utilities(), &a)
                .unwrap()
                .passed
        );
    }

    #[test]
    fn single_agent_gets_everything() {
        let inst = Instance::from_ints(&[&[3, 1, 2]], &[1, 5, 1]).unwrap();
        for s in ["ef1:agents", "sdef1:market", "eq1:market"] {
            let a = exists_allocation(&inst, &specs(s), &Limits::default())
                .unwrap()
                .unwrap();
            assert_eq!(a.bundles(), &[vec![0, 1, 2]]);
        }
    }

    #[test]
    fn counts_and_bound() {
        let inst = thm_4_1();
        let r = scan(&inst, &[], Constraint::None, &Limits::default(), false).unwrap();
        assert_eq!((r.examined, r.satisfying), (64, 64));
        let tight = Limits {
            enumeration_bound: 10,
            ..Limits::default()
        };
        assert!(scan(&inst, &[], Constraint::None, &tight, false)
            .unwrap_err()
            .is_bound_exceeded());
    }

    #[test]
    fn maximin_thresholds_match_the_checker() {
        let inst = crate::oracle::library::thm_4_4(2).unwrap();
        let s = specs("mms:agents@3/4");
        let r = scan(&inst, &s, Constraint::None, &Limits::default(), false).unwrap();
        let mut direct = 0;
        let mut iter = crate::oracle::enumerate::AllocationIter::new(2, 3, Constraint::None);
        while let Some(o) = iter.next_owners() {
            let a = Allocation::from_owners(2, o);
            if evaluate(&inst, &a, &s[0], &Limits::default(), None)
                .unwrap()
                .passed
            {
                direct += 1;
            }
        }
        assert_eq!(r.satisfying, direct);
    }
}
