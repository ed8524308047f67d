//! Lexicographic enumeration of complete allocations.
//!
//! Goods are assigned in index order; `owners[0]` is the most significant
//! digit. Constraints prune partial assignments, so infeasible allocations are
//! never produced.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::model::{Allocation, BlockPartition};

pub const DEFAULT_ENUMERATION_BOUND: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    None,
    /// At most one good per block per agent.
    OnePerBlock(BlockPartition),
    /// Bundle sizes in `{floor(m/n), ceil(m/n)}`.
    Balanced,
}

/// Number of allocations `enumerate` would produce, computed in closed form.
pub fn count_allocations(n: usize, m: usize, constraint: &Constraint) -> BigUint {
    match constraint {
        Constraint::None => BigUint::from(n).pow(m as u32),
        Constraint::OnePerBlock(blocks) => blocks
            .blocks()
            .iter()
            .map(|b| falling_factorial(n, b.len()))
            .product(),
        Constraint::Balanced => {
            if n == 0 {
                return if m == 0 {
                    BigUint::one()
                } else {
                    BigUint::from(0u8)
                };
            }
            let (lo, r) = (m / n, m % n);
            // choose which r agents get the larger size, then a multinomial.
            let mut count = binomial(n, r) * factorial(m);
            let small = factorial(lo);
            let large = factorial(lo + 1);
            for k in 0..n {
                count /= if k < r { &large } else { &small };
            }
            count
        }
    }
}

fn factorial(k: usize) -> BigUint {
    (1..=k).map(BigUint::from).product()
}

fn falling_factorial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u8);
    }
    (n - k + 1..=n).map(BigUint::from).product()
}

fn binomial(n: usize, k: usize) -> BigUint {
    falling_factorial(n, k) / factorial(k)
}

pub fn check_bound(what: &str, count: &BigUint, bound: u64) -> Result<()> {
    match count.to_u64() {
        Some(c) if c <= bound => Ok(()),
        _ => Err(Error::BoundExceeded {
            what: what.into(),
            size: count.to_string(),
            bound,
        }),
    }
}

/// Streams every complete allocation of `m` goods to `n` agents satisfying
/// `constraint`, in lexicographic order of the owner vector.
pub fn enumerate_allocations(
    n: usize,
    m: usize,
    constraint: Constraint,
    bound: u64,
) -> Result<AllocationIter> {
    check_bound(
        "allocation enumeration",
        &count_allocations(n, m, &constraint),
        bound,
    )?;
    Ok(AllocationIter::new(n, m, constraint))
}

#[derive(Debug, Clone)]
pub struct AllocationIter {
    n: usize,
    m: usize,
    constraint: Constraint,
    owners: Vec<usize>,
    counts: Vec<usize>,
    taken: Vec<Vec<bool>>,
    started: bool,
    done: bool,
}

impl AllocationIter {
    pub fn new(n: usize, m: usize, constraint: Constraint) -> Self {
        let blocks = match &constraint {
            Constraint::OnePerBlock(b) => b.len(),
            _ => 0,
        };
        Self {
            n,
            m,
            owners: vec![0; m],
            counts: vec![0; n],
            taken: vec![vec![false; blocks]; n],
            started: false,
            done: n == 0 && m > 0,
            constraint,
        }
    }

    fn allowed(&self, good: usize, agent: usize) -> bool {
        match &self.constraint {
            Constraint::None => true,
            Constraint::OnePerBlock(b) => !self.taken[agent][b.block_of(good)],
            Constraint::Balanced => {
                let (lo, r) = (self.m / self.n, self.m % self.n);
                let hi = if r > 0 { lo + 1 } else { lo };
                if self.counts[agent] + 1 > hi {
                    return false;
                }
                let at_hi = self
                    .counts
                    .iter()
                    .enumerate()
                    .filter(|&(a, &c)| (if a == agent { c + 1 } else { c }) == hi)
                    .count();
                if r > 0 && at_hi > r {
                    return false;
                }
                let remaining = self.m - good - 1;
                let deficit: usize = self
                    .counts
                    .iter()
                    .enumerate()
                    .map(|(a, &c)| lo.saturating_sub(if a == agent { c + 1 } else { c }))
                    .sum();
                deficit <= remaining
            }
        }
    }

    fn assign(&mut self, good: usize, agent: usize) {
        self.owners[good] = agent;
        self.counts[agent] += 1;
        if let Constraint::OnePerBlock(b) = &self.constraint {
            self.taken[agent][b.block_of(good)] = true;
        }
    }

    fn unassign(&mut self, good: usize) {
        let agent = self.owners[good];
        self.counts[agent] -= 1;
        if let Constraint::OnePerBlock(b) = &self.constraint {
            self.taken[agent][b.block_of(good)] = false;
        }
    }

    /// Advances `owners` to the next feasible complete assignment.
    fn advance(&mut self) -> bool {
        let (mut depth, mut candidate) = if !self.started {
            self.started = true;
            (0, 0)
        } else {
            if self.m == 0 {
                return false;
            }
            let last = self.m - 1;
            let a = self.owners[last];
            self.unassign(last);
            (last, a + 1)
        };
        loop {
            if depth == self.m {
                return true;
            }
            match (candidate..self.n).find(|&a| self.allowed(depth, a)) {
                Some(a) => {
                    self.assign(depth, a);
                    depth += 1;
                    candidate = 0;
                }
                None => {
                    if depth == 0 {
                        return false;
                    }
                    depth -= 1;
                    let a = self.owners[depth];
                    self.unassign(depth);
                    candidate = a + 1;
                }
            }
        }
    }

    pub fn owners(&self) -> &[usize] {
        &self.owners
    }

    /// Advances and exposes the raw owner vector without building an
    /// [`Allocation`].
    pub fn next_owners(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if self.advance() {
            Some(&self.owners)
        } else {
            self.done = true;
            None
        }
    }
}

impl Iterator for AllocationIter {
    type Item = Allocation;

    fn next(&mut self) -> Option<Allocation> {
        let n = self.n;
        self.next_owners().map(|o| Allocation::from_owners(n, o))
    }
}
