use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Allocation;
use crate::value::{serde_opt_value, serde_value, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Agents,
    Market,
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "agents" | "utilities" | "u" => Ok(Side::Agents),
            "market" | "v" => Ok(Side::Market),
            _ => Err(Error::UnknownId {
                kind: "side",
                id: s.into(),
            }),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Agents => "agents",
            Side::Market => "market",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Ef1,
    /// `u_i(A_i) >= alpha * u_i(A_j \ {g})` for some `g`.
    Ef1Alpha,
    #[serde(rename = "sdef1")]
    SdEf1,
    /// One good per market block (value-free SD-EF1 for a common ranking).
    #[serde(rename = "sdef1_blocks")]
    SdEf1Blocks,
    /// SD-EF1 evaluated on strict rankings only.
    #[serde(rename = "sdef1_ranked")]
    SdEf1Ranked,
    Efx,
    Mms,
    Eq1,
    Po,
    Fpo,
    FisherEquilibrium,
    Balanced,
    CakeEf,
    CakeEq,
    CakeBalanced,
}

impl Criterion {
    pub const ALL: [Criterion; 15] = [
        Criterion::Ef1,
        Criterion::Ef1Alpha,
        Criterion::SdEf1,
        Criterion::SdEf1Blocks,
        Criterion::SdEf1Ranked,
        Criterion::Efx,
        Criterion::Mms,
        Criterion::Eq1,
        Criterion::Po,
        Criterion::Fpo,
        Criterion::FisherEquilibrium,
        Criterion::Balanced,
        Criterion::CakeEf,
        Criterion::CakeEq,
        Criterion::CakeBalanced,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Criterion::Ef1 => "ef1",
            Criterion::Ef1Alpha => "ef1_alpha",
            Criterion::SdEf1 => "sdef1",
            Criterion::SdEf1Blocks => "sdef1_blocks",
            Criterion::SdEf1Ranked => "sdef1_ranked",
            Criterion::Efx => "efx",
            Criterion::Mms => "mms",
            Criterion::Eq1 => "eq1",
            Criterion::Po => "po",
            Criterion::Fpo => "fpo",
            Criterion::FisherEquilibrium => "fisher_equilibrium",
            Criterion::Balanced => "balanced",
            Criterion::CakeEf => "cake_ef",
            Criterion::CakeEq => "cake_eq",
            Criterion::CakeBalanced => "cake_balanced",
        }
    }

    pub fn takes_alpha(self) -> bool {
        matches!(self, Criterion::Ef1Alpha | Criterion::Efx | Criterion::Mms)
    }
}

impl FromStr for Criterion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        let alias = match s.as_str() {
            "sd_ef1" => "sdef1",
            "blocks" => "sdef1_blocks",
            "fisher" | "equilibrium" => "fisher_equilibrium",
            other => other,
        };
        Criterion::ALL
            .into_iter()
            .find(|c| c.id() == alias)
            .ok_or(Error::UnknownId {
                kind: "criterion",
                id: s,
            })
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// One recorded violation. `lhs < rhs` (or `lhs != rhs` for equality
/// criteria) is the failed comparison; the optional fields say which goods,
/// thresholds or blocks produced the two sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(
        with = "one_based_opt",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub agent: Option<usize>,
    #[serde(
        with = "one_based_opt",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub other: Option<usize>,
    #[serde(with = "good_opt", default, skip_serializing_if = "Option::is_none")]
    pub good: Option<usize>,
    #[serde(
        with = "serde_opt_value",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub threshold: Option<Value>,
    #[serde(
        with = "one_based_opt",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub block: Option<usize>,
    #[serde(with = "serde_value")]
    pub lhs: Value,
    #[serde(with = "serde_value")]
    pub rhs: Value,
}

impl Witness {
    pub fn pair(agent: usize, other: usize, good: Option<usize>, lhs: Value, rhs: Value) -> Self {
        Self {
            agent: Some(agent),
            other: Some(other),
            good,
            threshold: None,
            block: None,
            lhs,
            rhs,
        }
    }

    pub fn single(agent: usize, lhs: Value, rhs: Value) -> Self {
        Self {
            agent: Some(agent),
            other: None,
            good: None,
            threshold: None,
            block: None,
            lhs,
            rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub criterion: Criterion,
    pub side: Side,
    #[serde(
        with = "serde_opt_value",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub alpha: Option<Value>,
    pub passed: bool,
    pub witnesses: Vec<Witness>,
    /// A dominating allocation (PO) when one was found.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Allocation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl FairnessReport {
    pub fn new(criterion: Criterion, witnesses: Vec<Witness>) -> Self {
        Self {
            criterion,
            side: Side::Agents,
            alpha: None,
            passed: witnesses.is_empty(),
            witnesses,
            counterexample: None,
            detail: None,
        }
    }

    pub fn on(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    pub fn with_alpha(mut self, alpha: Value) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn label(&self) -> String {
        match &self.alpha {
            Some(a) => format!(
                "{}({}):{}",
                self.criterion,
                crate::value::format_value(a),
                self.side
            ),
            None => format!("{}:{}", self.criterion, self.side),
        }
    }
}

mod one_based_opt {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<usize>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(i) => s.serialize_u64(*i as u64 + 1),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<usize>, D::Error> {
        let raw = Option::<usize>::deserialize(d)?;
        match raw {
            Some(0) => Err(serde::de::Error::custom("indices are 1-based")),
            Some(k) => Ok(Some(k - 1)),
            None => Ok(None),
        }
    }
}

mod good_opt {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::model::{good_name, parse_good_name};

    pub fn serialize<S: Serializer>(v: &Option<usize>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(g) => s.serialize_str(&good_name(*g)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<usize>, D::Error> {
        let raw = Option::<String>::deserialize(d)?;
        raw.map(|s| parse_good_name(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}
