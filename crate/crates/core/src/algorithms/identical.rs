//! Identical rankings: one good per block on both sides via a perfect
//! matching decomposition of a regular bipartite multigraph.
//!
//! After padding to `m' = n*k` goods, good `g` becomes an edge between the
//! market block of `g` and the utility block of `g`. Every block vertex has
//! degree `n`, so the multigraph splits into `n` perfect matchings; each
//! matching is one bundle and holds exactly one good of every block on both
//! sides.

use crate::error::{Error, Result};
use crate::model::{common_ranking, Allocation, Good, Instance, Ranking};

pub fn solve_identical_ranking(
    market_ranking: &Ranking,
    utility_ranking: &Ranking,
    n: usize,
) -> Result<Allocation> {
    if n == 0 {
        return Err(Error::NoAgents);
    }
    let m = market_ranking.len();
    if utility_ranking.len() != m {
        return Err(Error::Length {
            what: "utility ranking".into(),
            expected: m,
            found: utility_ranking.len(),
        });
    }
    let k = m.div_ceil(n);
    let pad = k * n - m;
    let market = market_ranking.padded(pad);
    let utility = utility_ranking.padded(pad);

    // edges[w] lists (z, good) for market block w.
    let mut edges: Vec<Vec<(usize, Good)>> = vec![Vec::new(); k];
    for g in 0..k * n {
        edges[market.position(g) / n].push((utility.position(g) / n, g));
    }
    let mut bundles = Vec::with_capacity(n);
    for _ in 0..n {
        let matching = perfect_matching(&edges, k);
        let mut bundle = Vec::with_capacity(k);
        for (w, &idx) in matching.iter().enumerate() {
            bundle.push(edges[w][idx].1);
        }
        for (w, &idx) in matching.iter().enumerate() {
            edges[w].remove(idx);
        }
        bundles.push(bundle);
    }
    Ok(Allocation::new(bundles).truncated(m))
}

/// Kuhn's augmenting-path matching on a regular bipartite multigraph. Returns,
/// for every left vertex, the index of its matched edge in `edges[w]`.
fn perfect_matching(edges: &[Vec<(usize, Good)>], k: usize) -> Vec<usize> {
    fn augment(
        w: usize,
        edges: &[Vec<(usize, Good)>],
        seen: &mut [bool],
        right: &mut [Option<(usize, usize)>],
    ) -> bool {
        for (idx, &(z, _)) in edges[w].iter().enumerate() {
            if seen[z] {
                continue;
            }
            seen[z] = true;
            let free = match right[z] {
                None => true,
                Some((w2, _)) => augment(w2, edges, seen, right),
            };
            if free {
                right[z] = Some((w, idx));
                return true;
            }
        }
        false
    }

    let mut right: Vec<Option<(usize, usize)>> = vec![None; k];
    for w in 0..k {
        let mut seen = vec![false; k];
        let ok = augment(w, edges, &mut seen, &mut right);
        assert!(ok, "regular bipartite multigraph has a perfect matching");
    }
    let mut left = vec![0; k];
    for (w, idx) in right.into_iter().flatten() {
        left[w] = idx;
    }
    left
}

/// Runs [`solve_identical_ranking`] on an instance whose additive utilities
/// induce a common ranking.
pub fn solve_identical_ranking_instance(instance: &Instance) -> Result<Allocation> {
    let utilities = instance.require_additive_utilities("identical-ranking solver")?;
    let common = common_ranking(&utilities)?;
    solve_identical_ranking(&instance.market_ranking()?, &common, instance.n())
}
