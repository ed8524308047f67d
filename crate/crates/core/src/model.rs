//! Instances, valuations, allocations and rankings.
//!
//! Goods are indexed `0..m` internally and rendered as `g1..gm`; agents are
//! indexed `0..n` and rendered 1-based in messages.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value::{int, Value};

pub type Good = usize;

pub fn good_name(g: Good) -> String {
    format!("g{}", g + 1)
}

pub fn parse_good_name(s: &str) -> Result<Good> {
    let t = s.trim();
    let digits = t
        .strip_prefix('g')
        .or_else(|| t.strip_prefix('G'))
        .ok_or_else(|| Error::Parse(format!("good name `{s}` must look like g1, g2, ...")))?;
    match digits.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k - 1),
        _ => Err(Error::Parse(format!(
            "good name `{s}` must look like g1, g2, ..."
        ))),
    }
}

/// A set function over goods. Callers pass bundles with in-range indices;
/// [`bundle_value`] is the checked entry point.
pub trait Valuation {
    fn num_goods(&self) -> usize;
    fn value(&self, bundle: &[Good]) -> Value;
}

pub fn bundle_value<V: Valuation + ?Sized>(val: &V, bundle: &[Good]) -> Result<Value> {
    let m = val.num_goods();
    if let Some(&g) = bundle.iter().find(|&&g| g >= m) {
        return Err(Error::GoodOutOfRange { good: g, m });
    }
    Ok(val.value(bundle))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdditiveValuation {
    values: Vec<Value>,
}

impl AdditiveValuation {
    pub fn new(values: Vec<Value>) -> Result<Self> {
        if let Some(g) = values.iter().position(|v| v.is_negative()) {
            return Err(Error::NegativeValue {
                what: format!("value of {}", good_name(g)),
            });
        }
        Ok(Self { values })
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Self::new(values.iter().map(|&v| int(v)).collect()).expect("nonnegative integers")
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn good(&self, g: Good) -> &Value {
        &self.values[g]
    }

    pub fn total(&self) -> Value {
        self.values.iter().sum()
    }

    pub fn scaled(&self, factor: &Value) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn ranking(&self) -> Ranking {
        Ranking::from_valuation(self, TieBreak::IndexAscending)
    }

    /// Same valuation extended with `extra` zero-valued goods at the end.
    pub fn padded(&self, extra: usize) -> Self {
        let mut values = self.values.clone();
        values.extend(std::iter::repeat_with(Value::zero).take(extra));
        Self { values }
    }
}

impl Valuation for AdditiveValuation {
    fn num_goods(&self) -> usize {
        self.values.len()
    }

    fn value(&self, bundle: &[Good]) -> Value {
        bundle.iter().map(|&g| &self.values[g]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValuationKind {
    Additive,
    BudgetAdditive,
    GenericMonotone,
}

/// An opaque monotone set function. The closure must be monotone; solvers that
/// depend on it report [`Error::NonMonotone`] when they observe a violation.
type SetFunction = Arc<dyn Fn(&[Good]) -> Value + Send + Sync>;

#[derive(Clone)]
pub struct OracleValuation {
    m: usize,
    label: String,
    f: SetFunction,
}

impl OracleValuation {
    pub fn new(
        m: usize,
        label: impl Into<String>,
        f: impl Fn(&[Good]) -> Value + Send + Sync + 'static,
    ) -> Self {
        Self {
            m,
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for OracleValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OracleValuation")
            .field("m", &self.m)
            .field("label", &self.label)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum MonotoneValuation {
    Additive(AdditiveValuation),
    /// `min(cap, sum of singleton values)`; monotone and subadditive.
    BudgetAdditive {
        base: AdditiveValuation,
        cap: Value,
    },
    Oracle(OracleValuation),
}

impl MonotoneValuation {
    pub fn budget_additive(base: AdditiveValuation, cap: Value) -> Result<Self> {
        if cap.is_negative() {
            return Err(Error::NegativeValue {
                what: "budget cap".into(),
            });
        }
        Ok(Self::BudgetAdditive { base, cap })
    }

    pub fn kind(&self) -> ValuationKind {
        match self {
            Self::Additive(_) => ValuationKind::Additive,
            Self::BudgetAdditive { .. } => ValuationKind::BudgetAdditive,
            Self::Oracle(_) => ValuationKind::GenericMonotone,
        }
    }

    pub fn as_additive(&self) -> Option<&AdditiveValuation> {
        match self {
            Self::Additive(a) => Some(a),
            _ => None,
        }
    }
}

impl From<AdditiveValuation> for MonotoneValuation {
    fn from(a: AdditiveValuation) -> Self {
        Self::Additive(a)
    }
}

impl Valuation for MonotoneValuation {
    fn num_goods(&self) -> usize {
        match self {
            Self::Additive(a) => a.num_goods(),
            Self::BudgetAdditive { base, .. } => base.num_goods(),
            Self::Oracle(o) => o.m,
        }
    }

    fn value(&self, bundle: &[Good]) -> Value {
        match self {
            Self::Additive(a) => a.value(bundle),
            Self::BudgetAdditive { base, cap } => {
                let s = base.value(bundle);
                if &s > cap {
                    cap.clone()
                } else {
                    s
                }
            }
            Self::Oracle(o) => (o.f)(bundle),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Market {
    Homogeneous(AdditiveValuation),
    /// One market valuation per agent.
    Heterogeneous(Vec<AdditiveValuation>),
}

#[derive(Debug, Clone)]
pub struct Instance {
    m: usize,
    utilities: Vec<MonotoneValuation>,
    market: Market,
}

impl Instance {
    pub fn new(m: usize, utilities: Vec<MonotoneValuation>, market: Market) -> Result<Self> {
        if utilities.is_empty() {
            return Err(Error::NoAgents);
        }
        let n = utilities.len();
        for (i, u) in utilities.iter().enumerate() {
            if u.num_goods() != m {
                return Err(Error::Length {
                    what: format!("utility of agent {}", i + 1),
                    expected: m,
                    found: u.num_goods(),
                });
            }
        }
        match &market {
            Market::Homogeneous(v) => {
                if v.num_goods() != m {
                    return Err(Error::Length {
                        what: "market valuation".into(),
                        expected: m,
                        found: v.num_goods(),
                    });
                }
            }
            Market::Heterogeneous(vs) => {
                if vs.len() != n {
                    return Err(Error::Length {
                        what: "heterogeneous market valuations".into(),
                        expected: n,
                        found: vs.len(),
                    });
                }
                for (i, v) in vs.iter().enumerate() {
                    if v.num_goods() != m {
                        return Err(Error::Length {
                            what: format!("market valuation of agent {}", i + 1),
                            expected: m,
                            found: v.num_goods(),
                        });
                    }
                }
            }
        }
        Ok(Self {
            m,
            utilities,
            market,
        })
    }

    /// Additive utilities and a single market valuation.
    pub fn additive(utilities: Vec<AdditiveValuation>, market: AdditiveValuation) -> Result<Self> {
        let m = market.num_goods();
        Self::new(
            m,
            utilities
                .into_iter()
                .map(MonotoneValuation::Additive)
                .collect(),
            Market::Homogeneous(market),
        )
    }

    pub fn from_ints(utilities: &[&[i64]], market: &[i64]) -> Result<Self> {
        Self::additive(
            utilities
                .iter()
                .map(|u| AdditiveValuation::from_ints(u))
                .collect(),
            AdditiveValuation::from_ints(market),
        )
    }

    pub fn n(&self) -> usize {
        self.utilities.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn utilities(&self) -> &[MonotoneValuation] {
        &self.utilities
    }

    pub fn market(&self) -> &Market {
        &self.market
    }

    pub fn homogeneous_market(&self) -> Option<&AdditiveValuation> {
        match &self.market {
            Market::Homogeneous(v) => Some(v),
            Market::Heterogeneous(_) => None,
        }
    }

    pub fn require_homogeneous_market(&self, what: &str) -> Result<&AdditiveValuation> {
        self.homogeneous_market()
            .ok_or_else(|| Error::NeedsHomogeneousMarket { what: what.into() })
    }

    /// The market side as an `n`-agent profile (replicated when homogeneous).
    pub fn market_profile(&self) -> Vec<AdditiveValuation> {
        match &self.market {
            Market::Homogeneous(v) => vec![v.clone(); self.n()],
            Market::Heterogeneous(vs) => vs.clone(),
        }
    }

    pub fn additive_utilities(&self) -> Option<Vec<AdditiveValuation>> {
        self.utilities
            .iter()
            .map(|u| u.as_additive().cloned())
            .collect()
    }

    pub fn require_additive_utilities(&self, what: &str) -> Result<Vec<AdditiveValuation>> {
        self.additive_utilities()
            .ok_or_else(|| Error::NotAdditive { what: what.into() })
    }

    pub fn market_ranking(&self) -> Result<Ranking> {
        Ok(self.require_homogeneous_market("market ranking")?.ranking())
    }

    /// First `(agent, good)` with zero subjective utility, if any. Only
    /// meaningful for additive utilities.
    pub fn zero_utility(&self) -> Option<(usize, Good)> {
        self.utilities
            .iter()
            .enumerate()
            .find_map(|(i, u)| (0..self.m).find_map(|g| u.value(&[g]).is_zero().then_some((i, g))))
    }
}

/// An ordered partition of the goods into one bundle per agent. Bundles are
/// kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Allocation {
    bundles: Vec<Vec<Good>>,
}

impl Allocation {
    pub fn new(mut bundles: Vec<Vec<Good>>) -> Self {
        for b in &mut bundles {
            b.sort_unstable();
        }
        Self { bundles }
    }

    pub fn empty(n: usize) -> Self {
        Self {
            bundles: vec![Vec::new(); n],
        }
    }

    /// `owners[g]` is the agent receiving good `g`.
    pub fn from_owners(n: usize, owners: &[usize]) -> Self {
        let mut bundles = vec![Vec::new(); n];
        for (g, &a) in owners.iter().enumerate() {
            bundles[a].push(g);
        }
        Self { bundles }
    }

    pub fn n(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundles(&self) -> &[Vec<Good>] {
        &self.bundles
    }

    pub fn bundle(&self, agent: usize) -> &[Good] {
        &self.bundles[agent]
    }

    pub fn into_bundles(self) -> Vec<Vec<Good>> {
        self.bundles
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.bundles.iter().map(Vec::len).collect()
    }

    /// Owner of each good in `0..m`, `None` for unallocated goods.
    pub fn owners(&self, m: usize) -> Vec<Option<usize>> {
        let mut owners = vec![None; m];
        for (i, b) in self.bundles.iter().enumerate() {
            for &g in b {
                if g < m {
                    owners[g] = Some(i);
                }
            }
        }
        owners
    }

    pub fn owner_of(&self, g: Good) -> Option<usize> {
        self.bundles
            .iter()
            .position(|b| b.binary_search(&g).is_ok())
    }

    pub fn move_good(&mut self, g: Good, to: usize) {
        for b in &mut self.bundles {
            if let Ok(pos) = b.binary_search(&g) {
                b.remove(pos);
            }
        }
        let b = &mut self.bundles[to];
        let pos = b.binary_search(&g).unwrap_or_else(|p| p);
        b.insert(pos, g);
    }

    pub fn set_bundle(&mut self, agent: usize, mut bundle: Vec<Good>) {
        bundle.sort_unstable();
        self.bundles[agent] = bundle;
    }

    pub fn swap_bundles(&mut self, a: usize, b: usize) {
        self.bundles.swap(a, b);
    }

    /// Drops goods with index `>= m` (dummy padding).
    pub fn truncated(&self, m: usize) -> Self {
        Self {
            bundles: self
                .bundles
                .iter()
                .map(|b| b.iter().copied().filter(|&g| g < m).collect())
                .collect(),
        }
    }
}

impl fmt::Display for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.bundles.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            let names: Vec<_> = b.iter().map(|&g| good_name(g)).collect();
            write!(f, "{{{}}}", names.join(","))?;
        }
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
struct AllocationJson {
    bundles: Vec<Vec<String>>,
}

impl Serialize for Allocation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AllocationJson {
            bundles: self
                .bundles
                .iter()
                .map(|b| b.iter().map(|&g| good_name(g)).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Allocation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = AllocationJson::deserialize(d)?;
        let bundles = raw
            .bundles
            .iter()
            .map(|b| {
                b.iter()
                    .map(|name| parse_good_name(name))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(Allocation::new(bundles))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Among equal values, the lower good index ranks first.
    #[default]
    IndexAscending,
    IndexDescending,
}

/// A strict order over goods, best first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    order: Vec<Good>,
    position: Vec<usize>,
    tie_break: TieBreak,
}

impl Ranking {
    pub fn from_valuation(val: &AdditiveValuation, tie_break: TieBreak) -> Self {
        let mut order: Vec<Good> = (0..val.num_goods()).collect();
        order.sort_by(|&a, &b| {
            val.good(b).cmp(val.good(a)).then_with(|| match tie_break {
                TieBreak::IndexAscending => a.cmp(&b),
                TieBreak::IndexDescending => b.cmp(&a),
            })
        });
        Self::with_order(order, tie_break)
    }

    /// Builds a ranking from an explicit best-first order.
    pub fn from_order(order: Vec<Good>) -> Result<Self> {
        let m = order.len();
        let mut seen = vec![false; m];
        for &g in &order {
            if g >= m || seen[g] {
                return Err(Error::InvalidRanking(format!(
                    "order is not a permutation of 0..{m}"
                )));
            }
            seen[g] = true;
        }
        Ok(Self::with_order(order, TieBreak::IndexAscending))
    }

    fn with_order(order: Vec<Good>, tie_break: TieBreak) -> Self {
        let mut position = vec![0; order.len()];
        for (p, &g) in order.iter().enumerate() {
            position[g] = p;
        }
        Self {
            order,
            position,
            tie_break,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[Good] {
        &self.order
    }

    /// 0-based rank of `g` (0 = best).
    pub fn position(&self, g: Good) -> usize {
        self.position[g]
    }

    pub fn top(&self, count: usize) -> &[Good] {
        &self.order[..count.min(self.order.len())]
    }

    pub fn tie_break(&self) -> TieBreak {
        self.tie_break
    }

    /// `position(g) < position(g')` implies `val(g) >= val(g')`.
    pub fn is_consistent_with(&self, val: &AdditiveValuation) -> bool {
        self.order
            .windows(2)
            .all(|w| val.good(w[0]) >= val.good(w[1]))
    }

    /// Extends the ranking with `extra` goods `len..len+extra` appended last.
    pub fn padded(&self, extra: usize) -> Self {
        let m = self.order.len();
        let mut order = self.order.clone();
        order.extend(m..m + extra);
        Self::with_order(order, self.tie_break)
    }
}

/// Consecutive groups of `n` goods along a ranking. Block `k` holds ranking
/// positions `k*n .. (k+1)*n - 1`; only the last block may be shorter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    n: usize,
    blocks: Vec<Vec<Good>>,
    block_of: Vec<usize>,
}

impl BlockPartition {
    pub fn new(ranking: &Ranking, n: usize) -> Self {
        assert!(n >= 1, "block partition needs n >= 1");
        let blocks: Vec<Vec<Good>> = ranking.order().chunks(n).map(<[Good]>::to_vec).collect();
        let mut block_of = vec![0; ranking.len()];
        for (k, block) in blocks.iter().enumerate() {
            for &g in block {
                block_of[g] = k;
            }
        }
        Self {
            n,
            blocks,
            block_of,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<Good>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, g: Good) -> usize {
        self.block_of[g]
    }

    pub fn num_goods(&self) -> usize {
        self.block_of.len()
    }

    /// At most one good per block in `bundle`.
    pub fn is_feasible(&self, bundle: &[Good]) -> bool {
        let mut seen = vec![false; self.blocks.len()];
        bundle.iter().all(|&g| {
            let k = self.block_of[g];
            !std::mem::replace(&mut seen[k], true)
        })
    }
}

pub fn ranking_from_valuation(val: &AdditiveValuation, tie_break: TieBreak) -> Ranking {
    Ranking::from_valuation(val, tie_break)
}

pub fn block_partition(ranking: &Ranking, n: usize) -> BlockPartition {
    BlockPartition::new(ranking, n)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    BundleCount { expected: usize, found: usize },
    GoodOutOfRange { good: usize },
    AssignedTwice { good: usize, agents: Vec<usize> },
    Unallocated { good: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BundleCount { expected, found } => {
                write!(f, "expected {expected} bundles, found {found}")
            }
            Violation::GoodOutOfRange { good } => {
                write!(f, "good index {good} is out of range")
            }
            Violation::AssignedTwice { good, agents } => {
                let agents: Vec<_> = agents.iter().map(|a| (a + 1).to_string()).collect();
                write!(
                    f,
                    "{} assigned more than once (agents {})",
                    good_name(*good),
                    agents.join(", ")
                )
            }
            Violation::Unallocated { good } => write!(f, "{} unallocated", good_name(*good)),
        }
    }
}

/// Checks that `alloc` is a complete partition of `0..m` into `n` bundles.
pub fn validate_allocation(n: usize, m: usize, alloc: &Allocation) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    if alloc.n() != n {
        violations.push(Violation::BundleCount {
            expected: n,
            found: alloc.n(),
        });
    }
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut out_of_range = BTreeSet::new();
    for (i, b) in alloc.bundles().iter().enumerate() {
        for &g in b {
            if g < m {
                holders[g].push(i);
            } else {
                out_of_range.insert(g);
            }
        }
    }
    violations.extend(
        out_of_range
            .into_iter()
            .map(|good| Violation::GoodOutOfRange { good }),
    );
    for (good, agents) in holders.into_iter().enumerate() {
        match agents.len() {
            0 => violations.push(Violation::Unallocated { good }),
            1 => {}
            _ => violations.push(Violation::AssignedTwice { good, agents }),
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

pub fn validate(instance: &Instance, alloc: &Allocation) -> Result<(), Vec<Violation>> {
    validate_allocation(instance.n(), instance.m(), alloc)
}

/// A strict ranking consistent with every agent's additive utility, if the
/// utilities induce a common (weak) ranking. Ties left by all agents fall
/// back to ascending good index.
pub fn common_ranking(utilities: &[AdditiveValuation]) -> Result<Ranking> {
    let m = utilities.first().map_or(0, |u| u.num_goods());
    for a in 0..utilities.len() {
        for b in a + 1..utilities.len() {
            for g in 0..m {
                for h in g + 1..m {
                    let da = utilities[a].good(g).cmp(utilities[a].good(h));
                    let db = utilities[b].good(g).cmp(utilities[b].good(h));
                    if da != Ordering::Equal && db != Ordering::Equal && da != db {
                        return Err(Error::NotIdenticalRankings {
                            a: a + 1,
                            b: b + 1,
                            goods: (g, h),
                        });
                    }
                }
            }
        }
    }
    let mut order: Vec<Good> = (0..m).collect();
    order.sort_by(|&g, &h| {
        utilities
            .iter()
            .map(|u| u.good(h).cmp(u.good(g)))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
            .then(g.cmp(&h))
    });
    Ranking::from_order(order)
}
