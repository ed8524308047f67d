//! Built-in instances: the counterexamples behind each impossibility result
//! and the fixed instances used by the positive checks.
//!
//! Instances given only by rankings use the descending integer values
//! `m, m - 1, ..., 1` along each ranking.

use crate::cake::{CakeInstance, Interval, IntervalAllocation, PiecewiseConstantDensity};
use crate::error::{Error, Result};
use crate::model::{AdditiveValuation, Good, Instance};
use crate::value::{int, one, ratio, Value};

/// Names accepted by [`builtin_instance`].
pub const INSTANCE_NAMES: &[&str] = &["thm_3_1", "thm_4_1", "prop_B_1", "thm_4_4", "thm_4_5"];

/// Names accepted by [`builtin_cake`].
pub const CAKE_NAMES: &[&str] = &["thm_5_1", "thm_5_5"];

/// Additive values `m - r` for the good at ranking position `r`.
pub fn values_from_ranking(order: &[Good]) -> AdditiveValuation {
    let m = order.len();
    let mut values = vec![Value::default(); m];
    for (r, &g) in order.iter().enumerate() {
        values[g] = int((m - r) as i64);
    }
    AdditiveValuation::new(values).expect("positive integers")
}

/// Two agents, seven goods; market order `g1..g7`, agent orders
/// `g1 g3 g2 g5 g4 g7 g6` and `g1 g5 g2 g3 g6 g7 g4`.
pub fn thm_3_1() -> Instance {
    Instance::additive(
        vec![
            values_from_ranking(&[0, 2, 1, 4, 3, 6, 5]),
            values_from_ranking(&[0, 4, 1, 2, 5, 6, 3]),
        ],
        values_from_ranking(&[0, 1, 2, 3, 4, 5, 6]),
    )
    .expect("well-formed")
}

/// Two agents, six goods, market values equal to agent 1's utilities.
pub fn thm_4_1() -> Instance {
    Instance::from_ints(
        &[&[19, 7, 4, 3, 2, 1], &[8, 7, 6, 5, 4, 3]],
        &[19, 7, 4, 3, 2, 1],
    )
    .expect("well-formed")
}

/// Two agents, four goods, unit market values.
pub fn prop_b_1() -> Instance {
    Instance::from_ints(&[&[4, 4, 1, 1], &[3, 3, 1, 1]], &[1, 1, 1, 1]).expect("well-formed")
}

/// `n` agents, `2n - 1` goods. The first `n` goods are worth 1 to everyone
/// and to the market; the other `n - 1` are worth `n` to everyone and 0 to
/// the market.
pub fn thm_4_4(n: usize) -> Result<Instance> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "the construction needs at least 2 agents, got {n}"
        )));
    }
    let m = 2 * n - 1;
    let u: Vec<i64> = (0..m).map(|g| if g < n { 1 } else { n as i64 }).collect();
    let v: Vec<i64> = (0..m).map(|g| i64::from(g < n)).collect();
    Instance::additive(
        vec![AdditiveValuation::from_ints(&u); n],
        AdditiveValuation::from_ints(&v),
    )
}

/// Two agents, four goods of unit utility; market values
/// `(2/alpha + 1, 1, 1, 1)`.
pub fn thm_4_5(alpha: &Value) -> Result<Instance> {
    if *alpha <= Value::default() || *alpha > one() {
        return Err(Error::InvalidAlpha(alpha.clone()));
    }
    let top = int(2) / alpha + one();
    Instance::additive(
        vec![AdditiveValuation::from_ints(&[1, 1, 1, 1]); 2],
        AdditiveValuation::new(vec![top, one(), one(), one()])?,
    )
}

/// Resolves a built-in instance name. `n` parameterizes `thm_4_4`
/// (default 2) and `alpha` parameterizes `thm_4_5` (default 1).
pub fn builtin_instance(name: &str, n: Option<usize>, alpha: Option<&Value>) -> Result<Instance> {
    match name {
        "thm_3_1" => Ok(thm_3_1()),
        "thm_4_1" => Ok(thm_4_1()),
        "prop_B_1" | "prop_b_1" => Ok(prop_b_1()),
        "thm_4_4" => thm_4_4(n.unwrap_or(2)),
        "thm_4_5" => thm_4_5(alpha.unwrap_or(&one())),
        other => Err(Error::UnknownId {
            kind: "instance",
            id: other.into(),
        }),
    }
}

/// `n` agents with identical utility density 2 on `[0, 1/2]` and 0 after;
/// uniform market density.
pub fn thm_5_1(n: usize) -> Result<CakeInstance> {
    if n == 0 {
        return Err(Error::NoAgents);
    }
    let u = PiecewiseConstantDensity::new(vec![int(0), ratio(1, 2), int(1)], vec![int(2), int(0)])?;
    Ok(CakeInstance {
        utilities: vec![u; n],
        market: PiecewiseConstantDensity::uniform(),
    })
}

/// Cell averages of a density that is linear on `[0, 1/2]` and mirrored
/// on `[1/2, 1]`, on twelve equal cells. Integrals over unions of cells are
/// exact.
fn mirrored_linear(intercept: Value, slope: Value) -> PiecewiseConstantDensity {
    let cells = 12;
    let densities = (0..cells)
        .map(|k| {
            let mid = ratio(2 * k + 1, 2 * cells);
            let x = if mid < ratio(1, 2) { mid } else { one() - mid };
            &intercept - &slope * x
        })
        .collect();
    PiecewiseConstantDensity::on_grid(densities).expect("positive cell averages")
}

/// Three agents: `5/3 - 8x/3` and `3/2 - 2x` (both mirrored around 1/2) and
/// the uniform density; uniform market density.
pub fn thm_5_5() -> CakeInstance {
    CakeInstance {
        utilities: vec![
            mirrored_linear(ratio(5, 3), ratio(8, 3)),
            mirrored_linear(ratio(3, 2), int(2)),
            PiecewiseConstantDensity::uniform(),
        ],
        market: PiecewiseConstantDensity::uniform(),
    }
}

/// The balanced weighted-welfare maximizer of [`thm_5_5`]:
/// `[0,1/6] ∪ [5/6,1]`, `[1/6,1/3] ∪ [2/3,5/6]`, `[1/3,2/3]`.
pub fn thm_5_5_allocation() -> IntervalAllocation {
    let iv = |a: i64, b: i64| Interval::new(ratio(a, 6), ratio(b, 6)).expect("ordered");
    IntervalAllocation::new(vec![
        vec![iv(0, 1), iv(5, 6)],
        vec![iv(1, 2), iv(4, 5)],
        vec![iv(2, 4)],
    ])
    .expect("a partition of the cake")
}

pub fn builtin_cake(name: &str, n: Option<usize>) -> Result<CakeInstance> {
    match name {
        "thm_5_1" => thm_5_1(n.unwrap_or(2)),
        "thm_5_5" => Ok(thm_5_5()),
        other => Err(Error::UnknownId {
            kind: "cake instance",
            id: other.into(),
        }),
    }
}
