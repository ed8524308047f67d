//! Seeded random instances. The same configuration and seed always give the
//! same instance.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{AdditiveValuation, Instance, Market, MonotoneValuation, OracleValuation};
use crate::value::{format_value, int, one, parse_value, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Distribution {
    /// Every value uniform in `1..=max`.
    Uniform,
    /// `mix * v(g) + (1 - mix) * noise`, noise uniform in `1..=max`.
    Correlated { mix: Value },
    /// Strictly decreasing values along one shared random order.
    IdenticalRanking,
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "identical-ranking" | "identical_ranking" => Ok(Self::IdenticalRanking),
            "correlated" => Ok(Self::Correlated {
                mix: Value::new(1.into(), 2.into()),
            }),
            other => match other.strip_prefix("correlated:") {
                Some(mix) => {
                    let mix = parse_value(mix).map_err(|e| Error::Parse(e.to_string()))?;
                    if mix > one() {
                        return Err(Error::Parse(format!(
                            "mix weight must lie in [0, 1], got {}",
                            format_value(&mix)
                        )));
                    }
                    Ok(Self::Correlated { mix })
                }
                None => Err(Error::UnknownId {
                    kind: "distribution",
                    id: other.into(),
                }),
            },
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform => f.write_str("uniform"),
            Self::Correlated { mix } => write!(f, "correlated:{}", format_value(mix)),
            Self::IdenticalRanking => f.write_str("identical-ranking"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub n: usize,
    pub m: usize,
    pub dist: Distribution,
    pub max: u64,
    /// One market valuation per agent instead of a shared one.
    pub heterogeneous_market: bool,
    /// Budget-additive utilities with caps drawn between the largest single
    /// value and the total.
    pub budget_caps: bool,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(n: usize, m: usize, seed: u64) -> Self {
        Self {
            n,
            m,
            dist: Distribution::Uniform,
            max: 10,
            heterogeneous_market: false,
            budget_caps: false,
            seed,
        }
    }
}

fn uniform_row(rng: &mut ChaCha8Rng, m: usize, max: u64) -> Vec<Value> {
    (0..m).map(|_| int(rng.gen_range(1..=max) as i64)).collect()
}

pub fn generate(config: &GenConfig) -> Result<Instance> {
    if config.n == 0 {
        return Err(Error::NoAgents);
    }
    if config.max == 0 {
        return Err(Error::Parse("max value must be at least 1".into()));
    }
    let (n, m, max) = (config.n, config.m, config.max);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let market_rows: Vec<Vec<Value>> = if config.heterogeneous_market {
        (0..n).map(|_| uniform_row(&mut rng, m, max)).collect()
    } else {
        vec![uniform_row(&mut rng, m, max)]
    };
    let utility_rows: Vec<Vec<Value>> = match &config.dist {
        Distribution::Uniform => (0..n).map(|_| uniform_row(&mut rng, m, max)).collect(),
        Distribution::Correlated { mix } => (0..n)
            .map(|i| {
                let v = &market_rows[i.min(market_rows.len() - 1)];
                let noise = uniform_row(&mut rng, m, max);
                v.iter()
                    .zip(noise)
                    .map(|(vg, r)| mix * vg + (one() - mix) * r)
                    .collect()
            })
            .collect(),
        Distribution::IdenticalRanking => {
            let mut order: Vec<usize> = (0..m).collect();
            order.shuffle(&mut rng);
            (0..n)
                .map(|_| {
                    let mut row = vec![Value::default(); m];
                    let mut acc = 0i64;
                    for &g in order.iter().rev() {
                        acc += rng.gen_range(1..=max) as i64;
                        row[g] = int(acc);
                    }
                    row
                })
                .collect()
        }
    };
    let bases: Vec<AdditiveValuation> = utility_rows
        .into_iter()
        .map(AdditiveValuation::new)
        .collect::<Result<_>>()?;
    let utilities: Vec<MonotoneValuation> = if config.budget_caps {
        bases
            .into_iter()
            .map(|b| {
                let top = b.values().iter().max().cloned().unwrap_or_default();
                let total = b.total();
                let span = (&total - &top).to_integer().to_i64().unwrap_or(i64::MAX);
                let extra = rng.gen_range(0..=span.max(0));
                MonotoneValuation::budget_additive(b, top + int(extra))
            })
            .collect::<Result<_>>()?
    } else {
        bases.into_iter().map(MonotoneValuation::Additive).collect()
    };
    let mut markets: Vec<AdditiveValuation> = market_rows
        .into_iter()
        .map(AdditiveValuation::new)
        .collect::<Result<_>>()?;
    let market = if config.heterogeneous_market {
        Market::Heterogeneous(markets)
    } else {
        Market::Homogeneous(markets.remove(0))
    };
    Instance::new(m, utilities, market)
}

/// A random monotone set function on `m` goods (`m <= 16`): random
/// nonnegative scores on all subsets, closed upward by taking the best
/// subset score.
pub fn random_monotone_oracle(
    rng: &mut impl Rng,
    m: usize,
    max: u64,
    label: &str,
) -> OracleValuation {
    assert!(m <= 16, "oracle tables are limited to 16 goods");
    let size = 1usize << m;
    let mut table: Vec<u64> = (0..size)
        .map(|mask: usize| {
            if mask == 0 {
                0
            } else {
                rng.gen_range(0..=max * mask.count_ones() as u64)
            }
        })
        .collect();
    for bit in 0..m {
        for mask in 0..size {
            if mask >> bit & 1 == 1 {
                table[mask] = table[mask].max(table[mask ^ (1 << bit)]);
            }
        }
    }
    let table = Arc::new(table);
    OracleValuation::new(m, label, move |bundle| {
        let mask = bundle.iter().fold(0usize, |acc, &g| acc | 1 << g);
        int(table[mask] as i64)
    })
}
