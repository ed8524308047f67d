//! Two agents, at most six goods: SD-EF1 on both sides by cut and choose.
//!
//! Agent 1 cuts with the identical-ranking solver using its own ranking and
//! the market ranking; both halves are then fine for agent 1 and the market.
//! Agent 2 chooses by comparing prefix counts of the halves along its own
//! ranking.

use crate::error::{Error, Result};
use crate::model::{Allocation, Instance, Ranking};

use super::identical::solve_identical_ranking;

pub const CUT_CHOOSE_MAX_GOODS: usize = 6;

/// `e[l-1] = |A1 ∩ top_l| - |A2 ∩ top_l|` along `ranking`.
pub fn prefix_imbalance(ranking: &Ranking, first: &[usize], second: &[usize]) -> Vec<i64> {
    let mut e = Vec::with_capacity(ranking.len());
    let mut acc = 0i64;
    for &g in ranking.order() {
        if first.contains(&g) {
            acc += 1;
        } else if second.contains(&g) {
            acc -= 1;
        }
        e.push(acc);
    }
    e
}

pub fn solve_two_agent_cut_choose(instance: &Instance) -> Result<Allocation> {
    if instance.n() != 2 {
        return Err(Error::Precondition(format!(
            "cut and choose needs exactly 2 agents, got {}",
            instance.n()
        )));
    }
    if instance.m() > CUT_CHOOSE_MAX_GOODS {
        return Err(Error::Precondition(format!(
            "cut and choose handles at most {CUT_CHOOSE_MAX_GOODS} goods, got {}",
            instance.m()
        )));
    }
    let utilities = instance.require_additive_utilities("cut and choose")?;
    let cut = solve_identical_ranking(&instance.market_ranking()?, &utilities[0].ranking(), 2)?;
    let (a1, a2) = (cut.bundle(0), cut.bundle(1));
    let e = prefix_imbalance(&utilities[1].ranking(), a1, a2);
    let choice = if e.iter().all(|&x| x >= -1) {
        vec![a2.to_vec(), a1.to_vec()]
    } else {
        debug_assert!(
            e.iter().all(|&x| x <= 1),
            "prefix imbalance spread too wide"
        );
        vec![a1.to_vec(), a2.to_vec()]
    };
    Ok(Allocation::new(choice))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::check_sd_ef1;

    #[test]
    fn six_goods_instance_is_sd_ef1_both_sides() {
        let inst = Instance::from_ints(
            &[&[19, 7, 4, 3, 2, 1], &[8, 7, 6, 5, 4, 3]],
            &[19, 7, 4, 3, 2, 1],
        )
        .unwrap();
        let a = solve_two_agent_cut_choose(&inst).unwrap();
        let u = inst.require_additive_utilities("test").unwrap();
        assert!(check_sd_ef1(&u, &a).unwrap().passed);
        assert!(check_sd_ef1(&inst.market_profile(), &a).unwrap().passed);
    }

    #[test]
    fn identical_utilities_keep_the_cut() {
        let inst = Instance::from_ints(&[&[4, 3, 2, 1], &[4, 3, 2, 1]], &[1, 2, 3, 4]).unwrap();
        let a = solve_two_agent_cut_choose(&inst).unwrap();
        let u = inst.require_additive_utilities("test").unwrap();
        let cut =
            solve_identical_ranking(&inst.market_ranking().unwrap(), &u[0].ranking(), 2).unwrap();
        let mut got = a.into_bundles();
        let mut want = cut.into_bundles();
        got.sort();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn rejects_bad_shapes() {
        let three = Instance::from_ints(&[&[1], &[1], &[1]], &[1]).unwrap();
        assert!(solve_two_agent_cut_choose(&three).is_err());
        let seven = Instance::from_ints(&[&[1; 7], &[1; 7]], &[1; 7]).unwrap();
        assert!(solve_two_agent_cut_choose(&seven).is_err());
    }

    #[test]
    fn imbalance_counts_prefixes() {
        let r = Ranking::from_order(vec![0, 1, 2, 3]).unwrap();
        assert_eq!(prefix_imbalance(&r, &[0, 3], &[1, 2]), vec![1, 0, -1, 0]);
    }
}
