//! One-call exhaustive verification of each impossibility result and of the
//! two-agent, six-good positive result.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::enumerate::{enumerate_allocations, Constraint};
use super::library;
use super::search::scan;
use crate::criteria::{check_sd_ef1_ranked, compute_mms, CriterionSpec};
use crate::error::{Error, Result};
use crate::model::{Allocation, BlockPartition, Instance, Ranking};
use crate::value::{format_value, int, one, serde_opt_value, Value};
use crate::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// No allocation of the seven-good instance is SD-EF1 on both sides.
    SdEf1BothSides,
    /// Two agents and at most six goods always admit SD-EF1 on both sides.
    TwoAgentsSixGoods,
    /// No allocation of the six-good instance is PO and SD-EF1 for the market.
    PoVersusMarketSdEf1,
    /// `alpha`-MMS on one side excludes EF1 or `alpha`-MMS on the other.
    MmsVersusEf1,
    /// EF1 on one side excludes `alpha`-EFX on the other.
    Ef1VersusEfx,
    /// No allocation of the four-good instance is EF1 + fPO for the agents
    /// and EF1 for the market.
    Ef1FpoVersusMarketEf1,
}

impl Theorem {
    pub const ALL: [Theorem; 6] = [
        Theorem::SdEf1BothSides,
        Theorem::TwoAgentsSixGoods,
        Theorem::PoVersusMarketSdEf1,
        Theorem::MmsVersusEf1,
        Theorem::Ef1VersusEfx,
        Theorem::Ef1FpoVersusMarketEf1,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::SdEf1BothSides => "thm_3_1",
            Theorem::TwoAgentsSixGoods => "thm_3_2",
            Theorem::PoVersusMarketSdEf1 => "thm_4_1",
            Theorem::MmsVersusEf1 => "thm_4_4",
            Theorem::Ef1VersusEfx => "thm_4_5",
            Theorem::Ef1FpoVersusMarketEf1 => "prop_B_1",
        }
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownId {
                kind: "theorem",
                id: s.into(),
            })
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TheoremParams {
    /// Agent count for `thm_4_4` (default 2).
    pub n: Option<usize>,
    /// `thm_4_4` default 3/4, `thm_4_5` default 1.
    pub alpha: Option<Value>,
    /// Largest good count for `thm_3_2` (default 6).
    pub max_goods: Option<usize>,
}

/// One exhaustive scan within a verification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanLine {
    pub label: String,
    pub examined: u64,
    pub satisfying: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub theorem: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(with = "serde_opt_value", skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Value>,
    pub holds: bool,
    pub scans: Vec<ScanLine>,
    /// An allocation contradicting the claim, when one was found.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Allocation>,
    pub detail: String,
}

impl TheoremReport {
    fn new(theorem: Theorem) -> Self {
        Self {
            theorem: theorem.id().into(),
            n: None,
            alpha: None,
            holds: false,
            scans: Vec::new(),
            witness: None,
            detail: String::new(),
        }
    }
}

fn specs(list: &[&str]) -> Vec<CriterionSpec> {
    list.iter()
        .map(|s| s.parse().expect("built-in criterion strings parse"))
        .collect()
}

fn run_scan(
    report: &mut TheoremReport,
    instance: &Instance,
    criteria: &[&str],
    constraint: Constraint,
    label: &str,
    limits: &Limits,
) -> Result<u64> {
    let r = scan(instance, &specs(criteria), constraint, limits, false)?;
    report.scans.push(ScanLine {
        label: label.into(),
        examined: r.examined,
        satisfying: r.satisfying,
    });
    if r.satisfying > 0 && report.witness.is_none() {
        report.witness = r.first;
    }
    Ok(r.satisfying)
}

pub fn verify_theorem(
    theorem: Theorem,
    params: &TheoremParams,
    limits: &Limits,
) -> Result<TheoremReport> {
    match theorem {
        Theorem::SdEf1BothSides => verify_sd_ef1_both_sides(limits),
        Theorem::TwoAgentsSixGoods => verify_two_agents(params.max_goods.unwrap_or(6), limits),
        Theorem::PoVersusMarketSdEf1 => verify_po_market(limits),
        Theorem::MmsVersusEf1 => verify_mms(
            params.n.unwrap_or(2),
            params
                .alpha
                .clone()
                .unwrap_or_else(|| Value::new(3.into(), 4.into())),
            limits,
        ),
        Theorem::Ef1VersusEfx => verify_efx(params.alpha.clone().unwrap_or_else(one), limits),
        Theorem::Ef1FpoVersusMarketEf1 => verify_fpo(limits),
    }
}

fn verify_sd_ef1_both_sides(limits: &Limits) -> Result<TheoremReport> {
    let inst = library::thm_3_1();
    let mut report = TheoremReport::new(Theorem::SdEf1BothSides);
    let blocks = BlockPartition::new(&inst.market_ranking()?, 2);
    let a = run_scan(
        &mut report,
        &inst,
        &["sdef1:agents"],
        Constraint::OnePerBlock(blocks),
        "one good per market block, SD-EF1 for the agents",
        limits,
    )?;
    let b = run_scan(
        &mut report,
        &inst,
        &["sdef1:market", "sdef1:agents"],
        Constraint::None,
        "all allocations, SD-EF1 on both sides",
        limits,
    )?;
    let c = run_scan(
        &mut report,
        &inst,
        &["sdef1_ranked:market", "sdef1_ranked:agents"],
        Constraint::None,
        "all allocations, SD-EF1 on both sides from rankings alone",
        limits,
    )?;
    report.holds = a == 0 && b == 0 && c == 0;
    report.detail = format!(
        "{a} of {} block-feasible allocations are SD-EF1 for the agents; {b} of {} allocations are SD-EF1 on both sides ({c} by rankings alone)",
        report.scans[0].examined, report.scans[1].examined
    );
    Ok(report)
}

/// All permutations of `0..m` in lexicographic order.
fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (0..m).collect();
    let mut all = vec![perm.clone()];
    loop {
        let Some(i) = (1..m).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return all;
        };
        let j = (i..m)
            .rev()
            .find(|&j| perm[j] > perm[i - 1])
            .expect("exists");
        perm.swap(i - 1, j);
        perm[i..].reverse();
        all.push(perm.clone());
    }
}

/// Bit `k` set iff `agent` has no SD-EF1 complaint in allocation `k` under
/// `ranking`.
fn content_mask(ranking: &Ranking, agent: usize, allocs: &[Allocation]) -> Result<u64> {
    let rankings = [ranking.clone(), ranking.clone()];
    let mut mask = 0u64;
    for (k, a) in allocs.iter().enumerate() {
        let r = check_sd_ef1_ranked(&rankings, a)?;
        if r.witnesses.iter().all(|w| w.agent != Some(agent)) {
            mask |= 1 << k;
        }
    }
    Ok(mask)
}

/// Relabelling goods makes the market ranking `g1 > g2 > ...`, so it is
/// enough to range over every pair of agent rankings.
fn verify_two_agents(max_goods: usize, limits: &Limits) -> Result<TheoremReport> {
    let mut report = TheoremReport::new(Theorem::TwoAgentsSixGoods);
    if max_goods > 6 {
        return Err(Error::BoundExceeded {
            what: "two-agent ranking sweep".into(),
            size: format!("{max_goods} goods"),
            bound: 6,
        });
    }
    let mut failure = None;
    for m in 0..=max_goods {
        let allocs: Vec<Allocation> =
            enumerate_allocations(2, m, Constraint::None, limits.enumeration_bound)?.collect();
        let market = Ranking::from_order((0..m).collect())?;
        let market_ok = content_mask(&market, 0, &allocs)? & content_mask(&market, 1, &allocs)?;
        let perms = permutations(m);
        let mut first: Vec<u64> = Vec::new();
        let mut second: Vec<u64> = Vec::new();
        for p in &perms {
            let r = Ranking::from_order(p.clone())?;
            first.push(content_mask(&r, 0, &allocs)? & market_ok);
            second.push(content_mask(&r, 1, &allocs)?);
        }
        let mut satisfied = 0u64;
        for (i, a) in first.iter().enumerate() {
            for (j, b) in second.iter().enumerate() {
                if a & b != 0 {
                    satisfied += 1;
                } else if failure.is_none() {
                    failure = Some((m, perms[i].clone(), perms[j].clone()));
                }
            }
        }
        let total = (perms.len() * perms.len()) as u64;
        report.scans.push(ScanLine {
            label: format!("{m} goods, every pair of agent rankings"),
            examined: total,
            satisfying: satisfied,
        });
    }
    report.holds = failure.is_none();
    report.detail = match failure {
        None => format!(
            "every pair of agent rankings with at most {max_goods} goods admits an allocation that is SD-EF1 on both sides"
        ),
        Some((m, s1, s2)) => format!(
            "{m} goods: agent rankings {s1:?} and {s2:?} admit no allocation that is SD-EF1 on both sides"
        ),
    };
    Ok(report)
}

fn verify_po_market(limits: &Limits) -> Result<TheoremReport> {
    let inst = library::thm_4_1();
    let mut report = TheoremReport::new(Theorem::PoVersusMarketSdEf1);
    let feasible = run_scan(
        &mut report,
        &inst,
        &["sdef1:market"],
        Constraint::None,
        "SD-EF1 for the market",
        limits,
    )?;
    report.witness = None;
    let both = run_scan(
        &mut report,
        &inst,
        &["sdef1:market", "po:agents"],
        Constraint::None,
        "SD-EF1 for the market and PO for the agents",
        limits,
    )?;
    report.holds = both == 0;
    report.detail = format!(
        "{feasible} of {} allocations are SD-EF1 for the market; {both} of them are PO",
        report.scans[0].examined
    );
    Ok(report)
}

fn verify_mms(n: usize, alpha: Value, limits: &Limits) -> Result<TheoremReport> {
    if alpha <= Value::default() || alpha > one() {
        return Err(Error::InvalidAlpha(alpha));
    }
    let inst = library::thm_4_4(n)?;
    let mut report = TheoremReport::new(Theorem::MmsVersusEf1);
    report.n = Some(n);
    report.alpha = Some(alpha.clone());
    let u = inst.require_additive_utilities("maximin share")?;
    let shares: Vec<Value> = u
        .iter()
        .map(|ui| compute_mms(ui, n, limits.mms_max_goods).map(|s| s.value))
        .collect::<Result<_>>()?;
    let share_is_n = shares.iter().all(|s| *s == int(n as i64));
    let a = format_value(&alpha);
    let ef1 = run_scan(
        &mut report,
        &inst,
        &[&format!("mms:agents@{a}"), "ef1:market"],
        Constraint::None,
        "alpha-MMS for the agents and EF1 for the market",
        limits,
    )?;
    let mms = run_scan(
        &mut report,
        &inst,
        &[&format!("mms:agents@{a}"), &format!("mms:market@{a}")],
        Constraint::None,
        "alpha-MMS on both sides",
        limits,
    )?;
    report.holds = share_is_n && ef1 == 0 && mms == 0;
    let mut detail = format!(
        "maximin shares {}; {ef1} allocations are {a}-MMS with market EF1 and {mms} are {a}-MMS on both sides",
        shares.iter().map(format_value).collect::<Vec<_>>().join(",")
    );
    if alpha * int(n as i64) <= one() {
        detail.push_str(&format!(
            "; alpha = {a} is not above 1/{n}, where EF1 already yields (1/n)-MMS, so an allocation is expected to exist"
        ));
    }
    report.detail = detail;
    Ok(report)
}

fn verify_efx(alpha: Value, limits: &Limits) -> Result<TheoremReport> {
    let inst = library::thm_4_5(&alpha)?;
    let mut report = TheoremReport::new(Theorem::Ef1VersusEfx);
    report.alpha = Some(alpha.clone());
    let a = format_value(&alpha);
    let both = run_scan(
        &mut report,
        &inst,
        &["ef1:agents", &format!("efx:market@{a}")],
        Constraint::None,
        "EF1 for the agents and alpha-EFX for the market",
        limits,
    )?;
    report.holds = both == 0;
    report.detail = format!(
        "market values {}; {both} of {} allocations are EF1 for the agents and {a}-EFX for the market",
        inst.homogeneous_market()
            .map(|v| v.values().iter().map(format_value).collect::<Vec<_>>().join(","))
            .unwrap_or_default(),
        report.scans[0].examined
    );
    Ok(report)
}

/// fPO is checked exactly with exchange cycles. Integral PO is scanned as
/// well and reported: it is too weak to exclude every allocation here.
fn verify_fpo(limits: &Limits) -> Result<TheoremReport> {
    let inst = library::prop_b_1();
    let mut report = TheoremReport::new(Theorem::Ef1FpoVersusMarketEf1);
    let triple = run_scan(
        &mut report,
        &inst,
        &["ef1:agents", "ef1:market", "fpo:agents"],
        Constraint::None,
        "EF1 + fPO for the agents and EF1 for the market",
        limits,
    )?;
    let witness = report.witness.take();
    let pair = run_scan(
        &mut report,
        &inst,
        &["ef1:agents", "fpo:agents"],
        Constraint::None,
        "EF1 + fPO for the agents",
        limits,
    )?;
    let integral = run_scan(
        &mut report,
        &inst,
        &["ef1:agents", "ef1:market", "po:agents"],
        Constraint::None,
        "EF1 + integral PO for the agents and EF1 for the market",
        limits,
    )?;
    report.witness = witness;
    report.holds = triple == 0;
    report.detail = format!(
        "{triple} allocations are EF1 + fPO for the agents and EF1 for the market; {pair} are EF1 + fPO for the agents alone; with integral PO in place of fPO {integral} allocations remain"
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::ratio;

    fn run(t: Theorem, params: TheoremParams) -> TheoremReport {
        verify_theorem(t, &params, &Limits::default()).unwrap()
    }

    #[test]
    fn seven_goods() {
        let r = run(Theorem::SdEf1BothSides, TheoremParams::default());
        assert!(r.holds, "{}", r.detail);
        assert_eq!(r.scans[0].examined, 16);
        assert_eq!(r.scans[1].examined, 128);
    }

    #[test]
    fn small_two_agent_sweep() {
        let r = run(
            Theorem::TwoAgentsSixGoods,
            TheoremParams {
                max_goods: Some(4),
                ..Default::default()
            },
        );
        assert!(r.holds, "{}", r.detail);
        assert_eq!(r.scans[4].examined, 576);
    }

    #[test]
    fn po_instance() {
        let r = run(Theorem::PoVersusMarketSdEf1, TheoremParams::default());
        assert!(r.holds, "{}", r.detail);
        assert_eq!(r.scans[0].examined, 64);
        assert_eq!(r.scans[0].satisfying, 8);
    }

    #[test]
    fn mms_construction() {
        let r = run(
            Theorem::MmsVersusEf1,
            TheoremParams {
                n: Some(3),
                alpha: Some(ratio(1, 2)),
                ..Default::default()
            },
        );
        assert!(r.holds, "{}", r.detail);
        assert_eq!(r.scans[0].examined, 243);
    }

    #[test]
    fn mms_construction_needs_alpha_above_one_over_n() {
        let r = run(
            Theorem::MmsVersusEf1,
            TheoremParams {
                n: Some(2),
                alpha: Some(ratio(1, 2)),
                ..Default::default()
            },
        );
        assert!(!r.holds);
        assert!(r.witness.is_some());
    }

    #[test]
    fn efx_construction() {
        for alpha in [one(), ratio(1, 2), ratio(1, 7)] {
            let r = run(
                Theorem::Ef1VersusEfx,
                TheoremParams {
                    alpha: Some(alpha),
                    ..Default::default()
                },
            );
            assert!(r.holds, "{}", r.detail);
        }
    }

    #[test]
    fn fpo_instance() {
        let r = run(Theorem::Ef1FpoVersusMarketEf1, TheoremParams::default());
        assert!(r.holds, "{}", r.detail);
        assert_eq!(r.scans[1].satisfying, 2);
        assert!(r.scans[2].satisfying > 0);
        assert!(r.witness.is_none());
    }

    #[test]
    fn ids_round_trip() {
        for t in Theorem::ALL {
            assert_eq!(t.id().parse::<Theorem>().unwrap(), t);
        }
        assert!("thm_9_9".parse::<Theorem>().is_err());
    }

    #[test]
    fn permutations_in_order() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(3)[1], vec![0, 2, 1]);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }
}
