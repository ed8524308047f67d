//! Exact checkers for every fairness and efficiency notion, each returning a
//! [`FairnessReport`] whose witnesses describe the violations.

mod efficiency;
mod envy;
mod mms;
mod report;
mod sd;

use std::fmt;
use std::str::FromStr;

use num_traits::One;

pub use efficiency::{
    balanced_report, check_balanced, check_fisher_equilibrium, check_fpo, check_po_bruteforce,
};
pub use envy::{check_ef1, check_ef1_alpha, check_efx_alpha, check_eq1};
pub use mms::{check_mms_alpha, compute_mms, mms_profile, MaximinShare, DEFAULT_MMS_MAX_GOODS};
pub use report::{Criterion, FairnessReport, Side, Witness};
pub use sd::{
    check_sd_ef1, check_sd_ef1_market_blocks, check_sd_ef1_ranked, sd_prefers, sd_violation,
};

use crate::error::{Error, Result};
use crate::model::{common_ranking, AdditiveValuation, Allocation, Instance, Ranking, Valuation};
use crate::value::{format_value, parse_value, Value};
use crate::Limits;

/// A criterion together with the side it is evaluated on and its optional
/// `alpha`. Text form: `name[:side][@alpha]`, e.g. `efx:market@1/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionSpec {
    pub criterion: Criterion,
    pub side: Side,
    pub alpha: Option<Value>,
}

impl CriterionSpec {
    pub fn new(criterion: Criterion, side: Side) -> Self {
        Self {
            criterion,
            side,
            alpha: None,
        }
    }

    pub fn with_alpha(mut self, alpha: Value) -> Self {
        self.alpha = Some(alpha);
        self
    }

    fn alpha_or_one(&self) -> Value {
        self.alpha.clone().unwrap_or_else(Value::one)
    }
}

impl FromStr for CriterionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (body, alpha) = match s.split_once('@') {
            Some((b, a)) => (
                b,
                Some(parse_value(a.trim()).map_err(|e| Error::Parse(e.to_string()))?),
            ),
            None => (s, None),
        };
        let (name, side) = match body.split_once(':') {
            Some((n, side)) => (n, side.trim().parse()?),
            None => (body, Side::Agents),
        };
        Ok(Self {
            criterion: name.trim().parse()?,
            side,
            alpha,
        })
    }
}

impl fmt::Display for CriterionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.criterion, self.side)?;
        if let Some(a) = &self.alpha {
            write!(f, "@{}", format_value(a))?;
        }
        Ok(())
    }
}

/// Runs one criterion against `alloc`. `prices` is only consulted by the
/// Fisher-equilibrium check.
pub fn evaluate(
    instance: &Instance,
    alloc: &Allocation,
    spec: &CriterionSpec,
    limits: &Limits,
    prices: Option<&[Value]>,
) -> Result<FairnessReport> {
    let what = spec.criterion.id();
    let additive = || -> Result<Vec<AdditiveValuation>> {
        match spec.side {
            Side::Agents => instance.require_additive_utilities(what),
            Side::Market => Ok(instance.market_profile()),
        }
    };
    let report = match spec.criterion {
        Criterion::Ef1 => on_profile(instance, spec.side, |p| check_ef1(p, alloc))?,
        Criterion::Ef1Alpha => on_profile(instance, spec.side, |p| {
            check_ef1_alpha(p, alloc, &spec.alpha_or_one())
        })?,
        Criterion::Efx => on_profile(instance, spec.side, |p| {
            check_efx_alpha(p, alloc, &spec.alpha_or_one())
        })?,
        Criterion::Eq1 => on_profile(instance, spec.side, |p| check_eq1(p, alloc))?,
        Criterion::Po => on_profile(instance, spec.side, |p| {
            check_po_bruteforce(p, alloc, limits.enumeration_bound)
        })?,
        Criterion::SdEf1 => check_sd_ef1(&additive()?, alloc)?,
        Criterion::SdEf1Ranked => {
            let rankings: Vec<Ranking> = additive()?.iter().map(|u| u.ranking()).collect();
            check_sd_ef1_ranked(&rankings, alloc)?
        }
        Criterion::SdEf1Blocks => {
            let ranking = match spec.side {
                Side::Market => instance.market_ranking()?,
                Side::Agents => common_ranking(&additive()?)?,
            };
            check_sd_ef1_market_blocks(&ranking, instance.n(), alloc)?
        }
        Criterion::Mms => check_mms_alpha(
            &additive()?,
            alloc,
            &spec.alpha_or_one(),
            limits.mms_max_goods,
        )?,
        Criterion::Fpo => check_fpo(&additive()?, alloc)?,
        Criterion::FisherEquilibrium => {
            let prices = prices.ok_or_else(|| {
                Error::Precondition("the equilibrium check needs a price vector".into())
            })?;
            check_fisher_equilibrium(&additive()?, alloc, prices)?
        }
        Criterion::Balanced => balanced_report(alloc, instance.n(), instance.m()),
        Criterion::CakeEf | Criterion::CakeEq | Criterion::CakeBalanced => {
            return Err(Error::Precondition(format!(
                "{what} applies to interval allocations of a cake instance"
            )))
        }
    };
    Ok(report.on(spec.side))
}

fn on_profile(
    instance: &Instance,
    side: Side,
    f: impl Fn(&[crate::model::MonotoneValuation]) -> Result<FairnessReport>,
) -> Result<FairnessReport> {
    match side {
        Side::Agents => f(instance.utilities()),
        Side::Market => {
            let profile: Vec<_> = instance
                .market_profile()
                .into_iter()
                .map(crate::model::MonotoneValuation::from)
                .collect();
            f(&profile)
        }
    }
}

/// Value of each agent's own bundle.
pub fn own_values<V: Valuation>(profile: &[V], alloc: &Allocation) -> Vec<Value> {
    profile
        .iter()
        .zip(alloc.bundles())
        .map(|(v, b)| v.value(b))
        .collect()
}
