//! Divisible goods on `[0, 1]` with piecewise-constant densities.
//!
//! Pieces are half-open intervals `[a, b)` internally so that disjointness is
//! decidable; they are rendered closed. All measures are exact.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::criteria::{Criterion, FairnessReport, Side, Witness};
use crate::error::{Error, Result};
use crate::value::{format_value, int, serde_value_vec, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseConstantDensity {
    breakpoints: Vec<Value>,
    densities: Vec<Value>,
}

impl PiecewiseConstantDensity {
    pub fn new(breakpoints: Vec<Value>, densities: Vec<Value>) -> Result<Self> {
        if breakpoints.len() != densities.len() + 1 || densities.is_empty() {
            return Err(Error::Cake(format!(
                "{} breakpoints cannot bound {} constant pieces",
                breakpoints.len(),
                densities.len()
            )));
        }
        if !breakpoints[0].is_zero() || !breakpoints[breakpoints.len() - 1].is_one() {
            return Err(Error::Cake(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Cake("breakpoints must be strictly ascending".into()));
        }
        if densities.iter().any(Signed::is_negative) {
            return Err(Error::Cake("densities must be nonnegative".into()));
        }
        Ok(Self {
            breakpoints,
            densities,
        })
    }

    pub fn uniform() -> Self {
        Self::constant(Value::one())
    }

    pub fn constant(density: Value) -> Self {
        Self {
            breakpoints: vec![Value::zero(), Value::one()],
            densities: vec![density],
        }
    }

    /// One equal-width cell per listed density.
    pub fn on_grid(densities: Vec<Value>) -> Result<Self> {
        let k = densities.len() as i64;
        let breakpoints = (0..=k).map(|i| crate::value::ratio(i, k.max(1))).collect();
        Self::new(breakpoints, densities)
    }

    pub fn breakpoints(&self) -> &[Value] {
        &self.breakpoints
    }

    pub fn densities(&self) -> &[Value] {
        &self.densities
    }

    pub fn total(&self) -> Value {
        self.interval_measure(&Value::zero(), &Value::one())
    }

    fn interval_measure(&self, a: &Value, b: &Value) -> Value {
        let mut sum = Value::zero();
        for (k, d) in self.densities.iter().enumerate() {
            let lo = a.max(&self.breakpoints[k]);
            let hi = b.min(&self.breakpoints[k + 1]);
            if lo < hi {
                sum += d * (hi - lo);
            }
        }
        sum
    }

    /// Same measure, scaled to total 1.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total();
        if total.is_zero() {
            return Err(Error::Cake("density has zero total measure".into()));
        }
        Ok(Self {
            breakpoints: self.breakpoints.clone(),
            densities: self.densities.iter().map(|d| d / &total).collect(),
        })
    }
}

#[derive(Deserialize)]
struct DensityJson {
    #[serde(deserialize_with = "serde_value_vec::deserialize")]
    breakpoints: Vec<Value>,
    #[serde(deserialize_with = "serde_value_vec::deserialize")]
    densities: Vec<Value>,
}

fn strings(vs: &[Value]) -> Vec<String> {
    vs.iter().map(format_value).collect()
}

impl Serialize for PiecewiseConstantDensity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            breakpoints: Vec<String>,
            densities: Vec<String>,
        }
        Out {
            breakpoints: strings(&self.breakpoints),
            densities: strings(&self.densities),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiecewiseConstantDensity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = DensityJson::deserialize(d)?;
        Self::new(raw.breakpoints, raw.densities).map_err(serde::de::Error::custom)
    }
}

/// `[start, end)`; `start <= end`, both within `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Interval {
    pub start: Value,
    pub end: Value,
}

impl Interval {
    pub fn new(start: Value, end: Value) -> Result<Self> {
        if start.is_negative() || end > Value::one() || start > end {
            return Err(Error::Cake(format!(
                "[{}, {}] is not a subinterval of [0, 1]",
                format_value(&start),
                format_value(&end)
            )));
        }
        Ok(Self { start, end })
    }

    pub fn length(&self) -> Value {
        &self.end - &self.start
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            format_value(&self.start),
            format_value(&self.end)
        )
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [format_value(&self.start), format_value(&self.end)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<Value> = serde_value_vec::deserialize(d)?;
        match raw.as_slice() {
            [a, b] => Interval::new(a.clone(), b.clone()).map_err(serde::de::Error::custom),
            _ => Err(serde::de::Error::custom(
                "an interval is a pair [start, end]",
            )),
        }
    }
}

fn check_disjoint(intervals: &[&Interval]) -> Result<()> {
    let mut sorted: Vec<&Interval> = intervals
        .iter()
        .copied()
        .filter(|i| i.start < i.end)
        .collect();
    sorted.sort();
    for w in sorted.windows(2) {
        if w[1].start < w[0].end {
            return Err(Error::Cake(format!("{} and {} overlap", w[0], w[1])));
        }
    }
    Ok(())
}

/// Exact measure of a union of pairwise disjoint intervals.
pub fn measure(density: &PiecewiseConstantDensity, piece: &[Interval]) -> Result<Value> {
    check_disjoint(&piece.iter().collect::<Vec<_>>())?;
    Ok(piece
        .iter()
        .map(|i| density.interval_measure(&i.start, &i.end))
        .sum())
}

/// One piece (a list of intervals) per agent; together the pieces tile
/// `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalAllocation {
    pieces: Vec<Vec<Interval>>,
}

impl<'de> Deserialize<'de> for IntervalAllocation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            pieces: Vec<Vec<Interval>>,
        }
        let raw = Raw::deserialize(d)?;
        Self::new(raw.pieces).map_err(serde::de::Error::custom)
    }
}

impl IntervalAllocation {
    pub fn new(mut pieces: Vec<Vec<Interval>>) -> Result<Self> {
        for p in &mut pieces {
            p.retain(|i| i.start < i.end);
            p.sort();
        }
        let mut all: Vec<&Interval> = pieces.iter().flatten().collect();
        check_disjoint(&all)?;
        all.sort();
        let mut reach = Value::zero();
        for i in all {
            if i.start != reach {
                return Err(Error::Cake(format!(
                    "[{}, {}] is not covered",
                    format_value(&reach),
                    format_value(&i.start)
                )));
            }
            reach = i.end.clone();
        }
        if !reach.is_one() && !pieces.is_empty() {
            return Err(Error::Cake(format!(
                "[{}, 1] is not covered",
                format_value(&reach)
            )));
        }
        Ok(Self { pieces })
    }

    pub fn n(&self) -> usize {
        self.pieces.len()
    }

    pub fn pieces(&self) -> &[Vec<Interval>] {
        &self.pieces
    }

    pub fn piece(&self, agent: usize) -> &[Interval] {
        &self.pieces[agent]
    }

    /// Interior boundaries between different agents' pieces. Touching
    /// intervals of the same agent count as one.
    pub fn cut_count(&self) -> usize {
        let mut owned: Vec<(&Interval, usize)> = self
            .pieces
            .iter()
            .enumerate()
            .flat_map(|(a, p)| p.iter().map(move |i| (i, a)))
            .collect();
        owned.sort();
        let runs =
            owned.windows(2).filter(|w| w[0].1 != w[1].1).count() + usize::from(!owned.is_empty());
        runs.saturating_sub(1)
    }

    pub fn length(&self, agent: usize) -> Value {
        self.pieces[agent].iter().map(Interval::length).sum()
    }
}

impl fmt::Display for IntervalAllocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, p) in self.pieces.iter().enumerate() {
            let parts: Vec<String> = p.iter().map(ToString::to_string).collect();
            writeln!(f, "A{} = {}", a + 1, parts.join(" u "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CakeFairness {
    EnvyFree,
    Equitable,
    Balanced,
}

impl CakeFairness {
    pub fn criterion(self) -> Criterion {
        match self {
            CakeFairness::EnvyFree => Criterion::CakeEf,
            CakeFairness::Equitable => Criterion::CakeEq,
            CakeFairness::Balanced => Criterion::CakeBalanced,
        }
    }
}

/// Envy-freeness, equitability or balancedness of an interval allocation.
///
/// On the market side `profile` is the market density replicated per agent;
/// with one shared density envy-freeness is the same as all pieces having
/// equal value.
pub fn check_cake(
    fairness: CakeFairness,
    side: Side,
    profile: &[PiecewiseConstantDensity],
    alloc: &IntervalAllocation,
) -> Result<FairnessReport> {
    let n = alloc.n();
    if fairness != CakeFairness::Balanced && profile.len() != n {
        return Err(Error::Length {
            what: "densities vs. pieces".into(),
            expected: n,
            found: profile.len(),
        });
    }
    let mut witnesses = Vec::new();
    match fairness {
        CakeFairness::EnvyFree => {
            for (i, u) in profile.iter().enumerate() {
                let own = measure(u, alloc.piece(i))?;
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let other = measure(u, alloc.piece(j))?;
                    if own < other {
                        witnesses.push(Witness::pair(i, j, None, own.clone(), other));
                    }
                }
            }
        }
        CakeFairness::Equitable => {
            let own: Vec<Value> = (0..n)
                .map(|i| measure(&profile[i], alloc.piece(i)))
                .collect::<Result<_>>()?;
            for i in 0..n {
                for j in 0..n {
                    if own[i] < own[j] {
                        witnesses.push(Witness::pair(i, j, None, own[i].clone(), own[j].clone()));
                    }
                }
            }
        }
        CakeFairness::Balanced => {
            let share = Value::one() / int(n.max(1) as i64);
            for i in 0..n {
                let len = alloc.length(i);
                if len != share {
                    witnesses.push(Witness::single(i, len, share.clone()));
                }
            }
        }
    }
    Ok(FairnessReport::new(fairness.criterion(), witnesses).on(side))
}

/// Order in which the `n` equal parts of each refined piece go to agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitOrder {
    /// Agent 1 first in every piece.
    Ascending,
    /// Direction alternates between consecutive pieces so neighbouring parts
    /// share an owner; uses `pieces * (n - 1)` cuts.
    #[default]
    Snake,
}

/// Equal division under every density at once: each piece of the common
/// refinement is split into `n` equal-length parts, one per agent.
pub fn perfect_division(
    densities: &[PiecewiseConstantDensity],
    n: usize,
    order: SplitOrder,
) -> Result<IntervalAllocation> {
    if n == 0 {
        return Err(Error::NoAgents);
    }
    for d in densities {
        d.normalized()?;
    }
    let mut points: Vec<Value> = densities
        .iter()
        .flat_map(|d| d.breakpoints().iter().cloned())
        .chain([Value::zero(), Value::one()])
        .collect();
    points.sort();
    points.dedup();
    let mut pieces = vec![Vec::new(); n];
    let parts = int(n as i64);
    for (k, w) in points.windows(2).enumerate() {
        let step = (&w[1] - &w[0]) / &parts;
        for p in 0..n {
            let start = &w[0] + &step * int(p as i64);
            let end = if p + 1 == n {
                w[1].clone()
            } else {
                &start + &step
            };
            let agent = match order {
                SplitOrder::Snake if k % 2 == 1 => n - 1 - p,
                _ => p,
            };
            pieces[agent].push(Interval { start, end });
        }
    }
    for p in &mut pieces {
        merge_touching(p);
    }
    IntervalAllocation::new(pieces)
}

fn merge_touching(piece: &mut Vec<Interval>) {
    piece.sort();
    let mut merged: Vec<Interval> = Vec::with_capacity(piece.len());
    for i in piece.drain(..) {
        match merged.last_mut() {
            Some(last) if last.end == i.start => last.end = i.end,
            _ => merged.push(i),
        }
    }
    *piece = merged;
}

/// A cake instance: one subjective density per agent and a market density.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CakeInstance {
    pub utilities: Vec<PiecewiseConstantDensity>,
    pub market: PiecewiseConstantDensity,
}

impl CakeInstance {
    pub fn n(&self) -> usize {
        self.utilities.len()
    }

    pub fn market_profile(&self) -> Vec<PiecewiseConstantDensity> {
        vec![self.market.clone(); self.n()]
    }

    /// Subjective utilities followed by the market density.
    pub fn all_densities(&self) -> Vec<PiecewiseConstantDensity> {
        let mut all = self.utilities.clone();
        all.push(self.market.clone());
        all
    }
}
