//! Envy- and equity-based checkers: EF1, alpha-EF1, alpha-EFX, EQ1.

use num_traits::{One, Zero};

use super::report::{Criterion, FairnessReport, Witness};
use crate::error::{Error, Result};
use crate::model::{Allocation, Good, Valuation};
use crate::value::Value;

pub(crate) fn check_shape<V: Valuation>(profile: &[V], alloc: &Allocation) -> Result<()> {
    if profile.len() != alloc.n() {
        return Err(Error::Length {
            what: "valuation profile vs. allocation".into(),
            expected: alloc.n(),
            found: profile.len(),
        });
    }
    if let Some(m) = profile.first().map(Valuation::num_goods) {
        for (i, v) in profile.iter().enumerate() {
            if v.num_goods() != m {
                return Err(Error::Length {
                    what: format!("valuation of agent {}", i + 1),
                    expected: m,
                    found: v.num_goods(),
                });
            }
        }
        if let Some(&g) = alloc.bundles().iter().flatten().find(|&&g| g >= m) {
            return Err(Error::GoodOutOfRange { good: g, m });
        }
    }
    Ok(())
}

pub(crate) fn check_alpha(alpha: &Value) -> Result<()> {
    if *alpha < Value::zero() || *alpha > Value::one() {
        return Err(Error::InvalidAlpha(alpha.clone()));
    }
    Ok(())
}

fn without(bundle: &[Good], g: Good) -> Vec<Good> {
    bundle.iter().copied().filter(|&h| h != g).collect()
}

/// `min over g in bundle of val(bundle \ {g})`, with the lowest-index minimizer.
/// Tries every removal, so monotone oracles are fine.
pub(crate) fn best_removal<V: Valuation + ?Sized>(val: &V, bundle: &[Good]) -> (Good, Value) {
    let mut best: Option<(Good, Value)> = None;
    for &g in bundle {
        let rest = val.value(&without(bundle, g));
        if best.as_ref().is_none_or(|(_, b)| rest < *b) {
            best = Some((g, rest));
        }
    }
    best.expect("bundle is nonempty")
}

fn worst_removal<V: Valuation + ?Sized>(val: &V, bundle: &[Good]) -> (Good, Value) {
    let mut best: Option<(Good, Value)> = None;
    for &g in bundle {
        let rest = val.value(&without(bundle, g));
        if best.as_ref().is_none_or(|(_, b)| rest > *b) {
            best = Some((g, rest));
        }
    }
    best.expect("bundle is nonempty")
}

/// alpha-EF1: for every pair, `A_j` is empty or some single removal brings
/// `alpha * u_i(A_j \ {g})` down to at most `u_i(A_i)`.
pub fn check_ef1_alpha<V: Valuation>(
    profile: &[V],
    alloc: &Allocation,
    alpha: &Value,
) -> Result<FairnessReport> {
    check_alpha(alpha)?;
    check_shape(profile, alloc)?;
    let mut witnesses = Vec::new();
    for (i, u) in profile.iter().enumerate() {
        let own = u.value(alloc.bundle(i));
        for j in 0..alloc.n() {
            if i == j || alloc.bundle(j).is_empty() {
                continue;
            }
            let (g, rest) = best_removal(u, alloc.bundle(j));
            let rhs = alpha * rest;
            if own < rhs {
                witnesses.push(Witness::pair(i, j, Some(g), own.clone(), rhs));
            }
        }
    }
    let report = FairnessReport::new(Criterion::Ef1Alpha, witnesses);
    Ok(report.with_alpha(alpha.clone()))
}

pub fn check_ef1<V: Valuation>(profile: &[V], alloc: &Allocation) -> Result<FairnessReport> {
    let mut report = check_ef1_alpha(profile, alloc, &Value::one())?;
    report.criterion = Criterion::Ef1;
    report.alpha = None;
    Ok(report)
}

/// alpha-EFX: every single removal from `A_j` must leave
/// `alpha * u_i(A_j \ {g}) <= u_i(A_i)`. The witness names the removal that
/// leaves the most value.
pub fn check_efx_alpha<V: Valuation>(
    profile: &[V],
    alloc: &Allocation,
    alpha: &Value,
) -> Result<FairnessReport> {
    check_alpha(alpha)?;
    check_shape(profile, alloc)?;
    let mut witnesses = Vec::new();
    for (i, u) in profile.iter().enumerate() {
        let own = u.value(alloc.bundle(i));
        for j in 0..alloc.n() {
            if i == j || alloc.bundle(j).is_empty() {
                continue;
            }
            let (g, rest) = worst_removal(u, alloc.bundle(j));
            let rhs = alpha * rest;
            if own < rhs {
                witnesses.push(Witness::pair(i, j, Some(g), own.clone(), rhs));
            }
        }
    }
    Ok(FairnessReport::new(Criterion::Efx, witnesses).with_alpha(alpha.clone()))
}

/// EQ1 compares `v_i(A_i)` against `v_j(A_j \ {g})`: each side is valued by
/// its own holder.
pub fn check_eq1<V: Valuation>(profile: &[V], alloc: &Allocation) -> Result<FairnessReport> {
    check_shape(profile, alloc)?;
    let own: Vec<Value> = profile
        .iter()
        .enumerate()
        .map(|(i, v)| v.value(alloc.bundle(i)))
        .collect();
    let mut witnesses = Vec::new();
    for (i, own_i) in own.iter().enumerate() {
        for (j, vj) in profile.iter().enumerate() {
            if i == j || alloc.bundle(j).is_empty() {
                continue;
            }
            let (g, rest) = best_removal(vj, alloc.bundle(j));
            if *own_i < rest {
                witnesses.push(Witness::pair(i, j, Some(g), own_i.clone(), rest));
            }
        }
    }
    Ok(FairnessReport::new(Criterion::Eq1, witnesses))
}
