//! Stochastic-dominance checkers.
//!
//! `X` SD-dominates `Y` for an agent when, at every value level of that
//! agent, `X` holds at least as many goods at or above the level as `Y`.
//! Removing the top-valued good of the envied bundle is always the best single
//! removal, so SD-EF1 reduces to one dominance test per ordered pair.

use super::envy::check_shape;
use super::report::{Criterion, FairnessReport, Witness};
use crate::error::{Error, Result};
use crate::model::{AdditiveValuation, Allocation, BlockPartition, Good, Ranking};
use crate::value::{int, Value};

fn top_good(u: &AdditiveValuation, bundle: &[Good]) -> Good {
    let mut best = bundle[0];
    for &g in &bundle[1..] {
        if u.good(g) > u.good(best) {
            best = g;
        }
    }
    best
}

/// First level (descending) where `x` holds fewer goods at or above the
/// level than `y`, as `(level, count_x, count_y)`.
pub fn sd_violation(
    u: &AdditiveValuation,
    x: &[Good],
    y: &[Good],
) -> Option<(Value, usize, usize)> {
    let mut levels: Vec<&Value> = y.iter().map(|&g| u.good(g)).collect();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    levels.dedup();
    for t in levels {
        let cx = x.iter().filter(|&&g| u.good(g) >= t).count();
        let cy = y.iter().filter(|&&g| u.good(g) >= t).count();
        if cx < cy {
            return Some((t.clone(), cx, cy));
        }
    }
    None
}

/// Whether `u` SD-prefers `x` to `y`.
pub fn sd_prefers(u: &AdditiveValuation, x: &[Good], y: &[Good]) -> bool {
    sd_violation(u, x, y).is_none()
}

pub fn check_sd_ef1(profile: &[AdditiveValuation], alloc: &Allocation) -> Result<FairnessReport> {
    check_shape(profile, alloc)?;
    let mut witnesses = Vec::new();
    for (i, u) in profile.iter().enumerate() {
        for j in 0..alloc.n() {
            let other = alloc.bundle(j);
            if i == j || other.is_empty() {
                continue;
            }
            let g = top_good(u, other);
            let rest: Vec<Good> = other.iter().copied().filter(|&h| h != g).collect();
            if let Some((t, cx, cy)) = sd_violation(u, alloc.bundle(i), &rest) {
                let mut w = Witness::pair(i, j, Some(g), int(cx as i64), int(cy as i64));
                w.threshold = Some(t);
                witnesses.push(w);
            }
        }
    }
    Ok(FairnessReport::new(Criterion::SdEf1, witnesses))
}

/// Value-free SD-EF1: each agent is described only by a strict ranking, and
/// the levels are the ranking's prefixes. The witness `threshold` is the
/// prefix length.
pub fn check_sd_ef1_ranked(rankings: &[Ranking], alloc: &Allocation) -> Result<FairnessReport> {
    if rankings.len() != alloc.n() {
        return Err(Error::Length {
            what: "rankings vs. allocation".into(),
            expected: alloc.n(),
            found: rankings.len(),
        });
    }
    let mut witnesses = Vec::new();
    for (i, r) in rankings.iter().enumerate() {
        let mine: Vec<usize> = alloc.bundle(i).iter().map(|&g| r.position(g)).collect();
        for j in 0..alloc.n() {
            if i == j || alloc.bundle(j).is_empty() {
                continue;
            }
            let mut theirs: Vec<usize> = alloc.bundle(j).iter().map(|&g| r.position(g)).collect();
            theirs.sort_unstable();
            let removed = r.order()[theirs.remove(0)];
            // Only prefixes ending at one of `theirs` can be violated.
            for &p in &theirs {
                let prefix = p + 1;
                let cx = mine.iter().filter(|&&q| q < prefix).count();
                let cy = theirs.iter().filter(|&&q| q < prefix).count();
                if cx < cy {
                    let mut w = Witness::pair(i, j, Some(removed), int(cx as i64), int(cy as i64));
                    w.threshold = Some(int(prefix as i64));
                    witnesses.push(w);
                    break;
                }
            }
        }
    }
    Ok(FairnessReport::new(Criterion::SdEf1Ranked, witnesses))
}

/// Every agent holds at most one good of every block of the ranking's
/// `n`-partition.
pub fn check_sd_ef1_market_blocks(
    market_ranking: &Ranking,
    n: usize,
    alloc: &Allocation,
) -> Result<FairnessReport> {
    if alloc.n() != n {
        return Err(Error::Length {
            what: "allocation bundles".into(),
            expected: n,
            found: alloc.n(),
        });
    }
    let blocks = BlockPartition::new(market_ranking, n);
    let m = market_ranking.len();
    let mut witnesses = Vec::new();
    for (i, bundle) in alloc.bundles().iter().enumerate() {
        if let Some(&g) = bundle.iter().find(|&&g| g >= m) {
            return Err(Error::GoodOutOfRange { good: g, m });
        }
        let mut counts = vec![0usize; blocks.len()];
        for &g in bundle {
            counts[blocks.block_of(g)] += 1;
        }
        for (k, &c) in counts.iter().enumerate() {
            if c > 1 {
                witnesses.push(Witness {
                    agent: Some(i),
                    other: None,
                    good: None,
                    threshold: None,
                    block: Some(k),
                    lhs: int(1),
                    rhs: int(c as i64),
                });
            }
        }
    }
    Ok(FairnessReport::new(Criterion::SdEf1Blocks, witnesses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::check_ef1;

    fn profile(rows: &[&[i64]]) -> Vec<AdditiveValuation> {
        rows.iter()
            .map(|r| AdditiveValuation::from_ints(r))
            .collect()
    }

    #[test]
    fn three_one_style_allocation_fails_for_agent_two() {
        let p = profile(&[&[7, 5, 6, 3, 4, 1, 2], &[7, 5, 4, 1, 6, 3, 2]]);
        let a = Allocation::new(vec![vec![0, 2, 5, 6], vec![1, 3, 4]]);
        let r = check_sd_ef1(&p, &a).unwrap();
        assert!(!r.passed);
        assert!(r.witnesses.iter().all(|w| w.agent == Some(1)));
        // Giving g7 to agent 2 instead makes agent 1 the violator.
        let a = Allocation::new(vec![vec![0, 2, 5], vec![1, 3, 4, 6]]);
        let r = check_sd_ef1(&p, &a).unwrap();
        assert!(!r.passed);
        assert!(r.witnesses.iter().all(|w| w.agent == Some(0)));
    }

    #[test]
    fn equal_singletons_pass() {
        let p = profile(&[&[2, 2], &[2, 2]]);
        let a = Allocation::new(vec![vec![0], vec![1]]);
        assert!(check_sd_ef1(&p, &a).unwrap().passed);
    }

    #[test]
    fn four_goods_split_outer_inner_passes() {
        let p = profile(&[&[4, 3, 2, 1], &[4, 3, 2, 1]]);
        let a = Allocation::new(vec![vec![0, 3], vec![1, 2]]);
        assert!(check_sd_ef1(&p, &a).unwrap().passed);
    }

    #[test]
    fn blocks_examples() {
        let r = Ranking::from_order((0..7).collect()).unwrap();
        let a = Allocation::new(vec![vec![0, 2, 5, 6], vec![1, 3, 4]]);
        assert!(check_sd_ef1_market_blocks(&r, 2, &a).unwrap().passed);
        let a = Allocation::new(vec![vec![0, 1], vec![2, 3, 4, 5, 6]]);
        let rep = check_sd_ef1_market_blocks(&r, 2, &a).unwrap();
        assert!(!rep.passed);
        assert_eq!(rep.witnesses[0].agent, Some(0));
        assert_eq!(rep.witnesses[0].block, Some(0));
        let r = Ranking::from_order((0..3).collect()).unwrap();
        let a = Allocation::new(vec![vec![2], vec![0], vec![1], vec![]]);
        assert!(check_sd_ef1_market_blocks(&r, 4, &a).unwrap().passed);
    }

    #[test]
    fn ranked_route_agrees_with_value_route_on_strict_values() {
        let p = profile(&[&[7, 5, 6, 3, 4, 1, 2], &[7, 5, 4, 1, 6, 3, 2]]);
        let ranks: Vec<Ranking> = p.iter().map(AdditiveValuation::ranking).collect();
        for mask in 0u32..128 {
            let owners: Vec<usize> = (0..7).map(|g| ((mask >> g) & 1) as usize).collect();
            let a = Allocation::from_owners(2, &owners);
            let by_value = check_sd_ef1(&p, &a).unwrap();
            let by_rank = check_sd_ef1_ranked(&ranks, &a).unwrap();
            assert_eq!(by_value.passed, by_rank.passed, "{a}");
            if by_value.passed {
                assert!(check_ef1(&p, &a).unwrap().passed);
            }
        }
    }
}
