//! Constructive solvers. Each one advertises the guarantees it provides;
//! callers certify them with [`crate::criteria`].

pub mod cardinality;
pub mod cut_choose;
pub mod eq1_fpo;
pub mod identical;
pub mod mes;
pub mod pairs;
pub mod trace;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use cardinality::{solve_ef1_sdef1, solve_ef1_sdef1_traced};
pub use cut_choose::solve_two_agent_cut_choose;
pub use eq1_fpo::{solve_eq1_fpo, solve_eq1_fpo_traced, MarketOutcome};
pub use identical::{solve_identical_ranking, solve_identical_ranking_instance};
pub use mes::{solve_mes, solve_mes_traced};
pub use pairs::solve_two_agent_pairs;
pub use trace::{StepKind, TraceStep};

use crate::criteria::{evaluate, Criterion, CriterionSpec, FairnessReport, Side};
use crate::error::{Error, Result};
use crate::model::{Allocation, Instance};
use crate::value::{ratio, serde_value_vec, Value};
use crate::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    IdenticalRanking,
    Ef1SdEf1,
    CutChoose,
    Mes,
    Eq1Fpo,
    Pairs,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::IdenticalRanking,
        Algorithm::Ef1SdEf1,
        Algorithm::CutChoose,
        Algorithm::Mes,
        Algorithm::Eq1Fpo,
        Algorithm::Pairs,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::IdenticalRanking => "identical_ranking",
            Algorithm::Ef1SdEf1 => "ef1_sdef1",
            Algorithm::CutChoose => "cut_choose",
            Algorithm::Mes => "mes",
            Algorithm::Eq1Fpo => "eq1_fpo",
            Algorithm::Pairs => "pairs",
        }
    }

    /// The criteria every output of this solver must pass.
    pub fn guarantees(self) -> Vec<CriterionSpec> {
        use Criterion::*;
        use Side::*;
        match self {
            Algorithm::IdenticalRanking | Algorithm::CutChoose => vec![
                CriterionSpec::new(SdEf1, Agents),
                CriterionSpec::new(SdEf1, Market),
            ],
            Algorithm::Ef1SdEf1 | Algorithm::Pairs => vec![
                CriterionSpec::new(Ef1, Agents),
                CriterionSpec::new(SdEf1Blocks, Market),
            ],
            Algorithm::Mes => vec![
                CriterionSpec::new(Ef1Alpha, Agents).with_alpha(ratio(1, 2)),
                CriterionSpec::new(SdEf1Blocks, Market),
            ],
            Algorithm::Eq1Fpo => vec![
                CriterionSpec::new(Eq1, Market),
                CriterionSpec::new(FisherEquilibrium, Agents),
                CriterionSpec::new(Fpo, Agents),
            ],
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or(Error::UnknownId {
                kind: "algorithm",
                id: s,
            })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub algorithm: String,
    pub allocation: Allocation,
    #[serde(with = "serde_value_vec", skip_serializing_if = "Vec::is_empty")]
    pub prices: Vec<Value>,
    pub certificates: Vec<FairnessReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceStep>,
}

impl Solution {
    pub fn certified(&self) -> bool {
        self.certificates.iter().all(|c| c.passed)
    }
}

/// Runs `algorithm` and recomputes its advertised guarantees from scratch.
pub fn solve(
    algorithm: Algorithm,
    instance: &Instance,
    limits: &Limits,
    with_trace: bool,
) -> Result<Solution> {
    let mut prices = Vec::new();
    let mut trace = Vec::new();
    let allocation = match algorithm {
        Algorithm::IdenticalRanking => solve_identical_ranking_instance(instance)?,
        Algorithm::Ef1SdEf1 => {
            let (a, t) = solve_ef1_sdef1_traced(instance)?;
            trace = t;
            a
        }
        Algorithm::CutChoose => solve_two_agent_cut_choose(instance)?,
        Algorithm::Mes => {
            let (a, t) = solve_mes_traced(instance, limits.enumeration_bound)?;
            trace = t;
            a
        }
        Algorithm::Eq1Fpo => {
            let out = if with_trace {
                solve_eq1_fpo_traced(instance, limits.eq1_iteration_guard)?
            } else {
                solve_eq1_fpo(instance, limits.eq1_iteration_guard)?
            };
            prices = out.prices;
            trace = out.trace;
            out.allocation
        }
        Algorithm::Pairs => solve_two_agent_pairs(instance, limits.max_pairs)?,
    };
    if !with_trace {
        trace.clear();
    }
    let certificates = algorithm
        .guarantees()
        .iter()
        .map(|spec| evaluate(instance, &allocation, spec, limits, Some(&prices)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Solution {
        algorithm: algorithm.id().into(),
        allocation,
        prices,
        certificates,
        trace,
    })
}
