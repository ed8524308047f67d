//! JSON and text formats for instances and allocations.
//!
//! Instance JSON:
//! `{"n": 2, "m": 3, "utilities": [[1, 2, "1/2"], ...], "market": [...] | [[...], ...],
//!   "utility_kind": "additive" | {"budget_additive": {"caps": [...]}}}`.
//! Values are integers or `"a/b"` strings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    parse_good_name, AdditiveValuation, Allocation, Instance, Market, MonotoneValuation,
};
use crate::value::{serde_value_vec, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
struct Row(#[serde(with = "serde_value_vec")] Vec<Value>);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum MarketJson {
    Homogeneous(Row),
    Heterogeneous(Vec<Row>),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtilityKind {
    #[default]
    Additive,
    BudgetAdditive {
        #[serde(with = "serde_value_vec")]
        caps: Vec<Value>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct InstanceJson {
    n: usize,
    m: usize,
    utilities: Vec<Row>,
    market: MarketJson,
    #[serde(default)]
    utility_kind: UtilityKind,
}

fn additive(row: Row, what: &str) -> Result<AdditiveValuation> {
    AdditiveValuation::new(row.0).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

impl TryFrom<InstanceJson> for Instance {
    type Error = Error;

    fn try_from(raw: InstanceJson) -> Result<Instance> {
        if raw.utilities.len() != raw.n {
            return Err(Error::Length {
                what: "utilities".into(),
                expected: raw.n,
                found: raw.utilities.len(),
            });
        }
        let bases = raw
            .utilities
            .into_iter()
            .enumerate()
            .map(|(i, r)| additive(r, &format!("utility of agent {}", i + 1)))
            .collect::<Result<Vec<_>>>()?;
        let utilities = match raw.utility_kind {
            UtilityKind::Additive => bases.into_iter().map(MonotoneValuation::Additive).collect(),
            UtilityKind::BudgetAdditive { caps } => {
                if caps.len() != raw.n {
                    return Err(Error::Length {
                        what: "budget caps".into(),
                        expected: raw.n,
                        found: caps.len(),
                    });
                }
                bases
                    .into_iter()
                    .zip(caps)
                    .map(|(b, c)| MonotoneValuation::budget_additive(b, c))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        let market = match raw.market {
            MarketJson::Homogeneous(r) => Market::Homogeneous(additive(r, "market valuation")?),
            MarketJson::Heterogeneous(rows) => Market::Heterogeneous(
                rows.into_iter()
                    .enumerate()
                    .map(|(i, r)| additive(r, &format!("market valuation of agent {}", i + 1)))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Instance::new(raw.m, utilities, market)
    }
}

impl TryFrom<&Instance> for InstanceJson {
    type Error = Error;

    fn try_from(inst: &Instance) -> Result<InstanceJson> {
        let mut caps = Vec::new();
        let mut utilities = Vec::new();
        for u in inst.utilities() {
            match u {
                MonotoneValuation::Additive(a) => utilities.push(Row(a.values().to_vec())),
                MonotoneValuation::BudgetAdditive { base, cap } => {
                    utilities.push(Row(base.values().to_vec()));
                    caps.push(cap.clone());
                }
                MonotoneValuation::Oracle(o) => {
                    return Err(Error::Parse(format!(
                        "utility oracle `{}` has no JSON form",
                        o.label()
                    )))
                }
            }
        }
        let utility_kind = match caps.len() {
            0 => UtilityKind::Additive,
            k if k == inst.n() => UtilityKind::BudgetAdditive { caps },
            _ => {
                return Err(Error::Parse(
                    "mixed additive and budget-additive utilities have no JSON form".into(),
                ))
            }
        };
        let market = match inst.market() {
            Market::Homogeneous(v) => MarketJson::Homogeneous(Row(v.values().to_vec())),
            Market::Heterogeneous(vs) => {
                MarketJson::Heterogeneous(vs.iter().map(|v| Row(v.values().to_vec())).collect())
            }
        };
        Ok(InstanceJson {
            n: inst.n(),
            m: inst.m(),
            utilities,
            market,
            utility_kind,
        })
    }
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    let raw: InstanceJson = serde_json::from_str(text)?;
    raw.try_into()
}

pub fn instance_to_json(instance: &Instance) -> Result<String> {
    let raw = InstanceJson::try_from(instance)?;
    Ok(serde_json::to_string_pretty(&raw)?)
}

pub fn instance_to_value(instance: &Instance) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(InstanceJson::try_from(instance)?)?)
}

/// Parses `"g1,g4|g2,g3"` (bundles separated by `|`, empty bundles allowed)
/// or an allocation in JSON: `{"bundles": [["g1"], ...]}` or `[["g1"], ...]`.
pub fn parse_allocation(text: &str) -> Result<Allocation> {
    let t = text.trim();
    if t.starts_with('{') {
        return Ok(serde_json::from_str(t)?);
    }
    if t.starts_with('[') {
        let raw: Vec<Vec<String>> = serde_json::from_str(t)?;
        return bundles_from_names(&raw);
    }
    let raw: Vec<Vec<String>> = t
        .split('|')
        .map(|b| {
            b.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_owned)
                .collect()
        })
        .collect();
    bundles_from_names(&raw)
}

fn bundles_from_names(raw: &[Vec<String>]) -> Result<Allocation> {
    let bundles = raw
        .iter()
        .map(|b| {
            b.iter()
                .map(|g| parse_good_name(g))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Allocation::new(bundles))
}
