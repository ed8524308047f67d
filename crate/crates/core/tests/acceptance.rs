//! Acceptance suite: one line per criterion, printed as
//! `[PASS]`/`[FAIL] <id> <summary>`. Run with
//! `cargo test -p fairmarket --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fairmarket::algorithms::{
    solve_ef1_sdef1, solve_eq1_fpo_traced, solve_identical_ranking_instance, solve_mes,
    solve_two_agent_cut_choose, solve_two_agent_pairs,
};
use fairmarket::cake::{
    check_cake, measure, perfect_division, CakeFairness, PiecewiseConstantDensity, SplitOrder,
};
use fairmarket::criteria::{
    check_ef1, check_efx_alpha, check_eq1, check_fisher_equilibrium, check_mms_alpha, check_sd_ef1,
    check_sd_ef1_market_blocks, compute_mms, Side,
};
use fairmarket::generate::{generate, random_monotone_oracle, Distribution, GenConfig};
use fairmarket::model::{AdditiveValuation, Market, MonotoneValuation, Valuation};
use fairmarket::oracle::library::{thm_4_4, thm_5_1, thm_5_5, thm_5_5_allocation};
use fairmarket::oracle::{verify_theorem, Theorem, TheoremParams};
use fairmarket::value::{int, one, ratio};
use fairmarket::{Allocation, Instance, Limits, Value};

const FAST: Duration = Duration::from_secs(1);
const CUT_CHOOSE_BUDGET: Duration = Duration::from_secs(10);
const CARDINALITY_BUDGET: Duration = Duration::from_secs(30);

struct Outcome {
    id: u8,
    pass: bool,
    summary: String,
}

impl Outcome {
    fn new(id: u8, pass: bool, summary: impl Into<String>) -> Self {
        Self {
            id,
            pass,
            summary: summary.into(),
        }
    }
}

fn ms(d: Duration) -> String {
    format!("{:.1} ms", d.as_secs_f64() * 1e3)
}

fn config(n: usize, m: usize, seed: u64) -> GenConfig {
    GenConfig::new(n, m, seed)
}

/// Market order with ties broken by lower index, computed without the
/// library's ranking code.
fn market_order(v: &[Value]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[b].cmp(&v[a]).then(a.cmp(&b)));
    order
}

fn one_per_block(v: &[Value], n: usize, alloc: &Allocation) -> bool {
    let order = market_order(v);
    order.chunks(n).all(|block| {
        alloc
            .bundles()
            .iter()
            .all(|b| block.iter().filter(|g| b.contains(g)).count() <= 1)
    })
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let r = verify_theorem(
        Theorem::SdEf1BothSides,
        &TheoremParams::default(),
        &Limits::default(),
    )
    .expect("runs");
    let took = started.elapsed();
    let scanned = r.scans[0].examined == 16 && r.scans[1].examined == 128;
    Outcome::new(
        1,
        r.holds && scanned && took < FAST,
        format!(
            "seven-good SD-EF1 impossibility: {}; {} (limit 1 s)",
            r.detail,
            ms(took)
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let started = Instant::now();
    let mut ok = 0;
    let total = 1000;
    for k in 0..total {
        let m = rng.gen_range(2..=6);
        let cfg = GenConfig {
            max: if k % 2 == 0 { 10 } else { 1000 },
            ..config(2, m, rng.gen())
        };
        let inst = generate(&cfg).unwrap();
        let Ok(a) = solve_two_agent_cut_choose(&inst) else {
            continue;
        };
        let u = inst.additive_utilities().unwrap();
        if check_sd_ef1(&u, &a).unwrap().passed
            && check_sd_ef1(&inst.market_profile(), &a).unwrap().passed
        {
            ok += 1;
        }
    }
    let took = started.elapsed();
    Outcome::new(
        2,
        ok == total && took < CUT_CHOOSE_BUDGET,
        format!("two agents, 2..6 goods, cut and choose SD-EF1 on both sides: {ok}/{total}; {} (limit 10 s)", ms(took)),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let started = Instant::now();
    let total = 500;
    let mut ok = 0;
    for _ in 0..total {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(0..=12);
        let inst = generate(&config(n, m, rng.gen())).unwrap();
        let a = solve_ef1_sdef1(&inst).unwrap();
        let ranking = inst.market_ranking().unwrap();
        if check_ef1(inst.utilities(), &a).unwrap().passed
            && check_sd_ef1_market_blocks(&ranking, n, &a).unwrap().passed
        {
            ok += 1;
        }
    }
    let took = started.elapsed();
    Outcome::new(
        3,
        ok == total && took < CARDINALITY_BUDGET,
        format!("EF1 for agents + one good per market block, n<=4, m<=12: {ok}/{total}; {} (limit 30 s)", ms(took)),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let total = 300;
    let mut ok = 0;
    for _ in 0..total {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(0..=15);
        let cfg = GenConfig {
            dist: Distribution::IdenticalRanking,
            ..config(n, m, rng.gen())
        };
        let inst = generate(&cfg).unwrap();
        let a = solve_identical_ranking_instance(&inst).unwrap();
        let u = inst.additive_utilities().unwrap();
        if check_sd_ef1(&u, &a).unwrap().passed
            && check_sd_ef1(&inst.market_profile(), &a).unwrap().passed
        {
            ok += 1;
        }
    }
    Outcome::new(
        4,
        ok == total,
        format!("identical agent rankings, n<=5, m<=15, SD-EF1 on both sides: {ok}/{total}"),
    )
}

fn criterion_5() -> Outcome {
    let started = Instant::now();
    let r = verify_theorem(
        Theorem::PoVersusMarketSdEf1,
        &TheoremParams::default(),
        &Limits::default(),
    )
    .expect("runs");
    let took = started.elapsed();
    Outcome::new(
        5,
        r.holds && r.scans[0].examined == 64 && took < FAST,
        format!(
            "six-good PO vs market SD-EF1: {}; {} (limit 1 s)",
            r.detail,
            ms(took)
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let total = 300;
    let (mut ok, mut steps) = (0, 0usize);
    let mut problems = Vec::new();
    for k in 0..total {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(0..=8);
        let cfg = GenConfig {
            heterogeneous_market: k % 2 == 1,
            ..config(n, m, rng.gen())
        };
        let inst = generate(&cfg).unwrap();
        let out = match solve_eq1_fpo_traced(&inst, None) {
            Ok(out) => out,
            Err(e) => {
                problems.push(format!("instance {k}: {e}"));
                continue;
            }
        };
        let u = inst.additive_utilities().unwrap();
        let v = inst.market_profile();
        let final_ok = check_eq1(&v, &out.allocation).unwrap().passed
            && check_fisher_equilibrium(&u, &out.allocation, &out.prices)
                .unwrap()
                .passed;
        let mut trace_ok = true;
        let mut last_min: Option<Value> = None;
        for step in &out.trace {
            steps += 1;
            let min = (0..n)
                .map(|i| v[i].value(step.allocation.bundle(i)))
                .min()
                .unwrap();
            if last_min.as_ref().is_some_and(|l| min < *l)
                || !check_fisher_equilibrium(&u, &step.allocation, &step.prices)
                    .unwrap()
                    .passed
            {
                trace_ok = false;
            }
            last_min = Some(min);
        }
        if final_ok && trace_ok {
            ok += 1;
        } else {
            problems.push(format!("instance {k}: final {final_ok}, trace {trace_ok}"));
        }
    }
    Outcome::new(
        6,
        ok == total,
        format!(
            "EQ1 market + Fisher equilibrium, min market value never drops over {steps} trace steps: {ok}/{total}{}",
            if problems.is_empty() { String::new() } else { format!(" ({})", problems.join("; ")) }
        ),
    )
}

/// The only case expected to come back `holds = false`: the construction
/// excludes only `alpha > 1/n`.
const OUTSIDE_RANGE: (usize, (i64, i64)) = (2, (1, 2));

fn criterion_7() -> (Outcome, Vec<String>) {
    let mut failures = Vec::new();
    let mut lines = Vec::new();
    let mut slow = false;
    let mut cases: Vec<(String, Theorem, TheoremParams)> = Vec::new();
    for n in [2usize, 3] {
        for (a, b) in [(1, 2), (3, 4)] {
            cases.push((
                format!("thm_4_4 n={n} alpha={a}/{b}"),
                Theorem::MmsVersusEf1,
                TheoremParams {
                    n: Some(n),
                    alpha: Some(ratio(a, b)),
                    ..Default::default()
                },
            ));
        }
    }
    for (a, b) in [(1, 1), (1, 2)] {
        cases.push((
            format!("thm_4_5 alpha={a}/{b}"),
            Theorem::Ef1VersusEfx,
            TheoremParams {
                alpha: Some(ratio(a, b)),
                ..Default::default()
            },
        ));
    }
    cases.push((
        "prop_B_1".into(),
        Theorem::Ef1FpoVersusMarketEf1,
        TheoremParams::default(),
    ));
    for (label, theorem, params) in cases {
        let started = Instant::now();
        let r = verify_theorem(theorem, &params, &Limits::default()).expect("runs");
        let took = started.elapsed();
        slow |= took >= FAST;
        lines.push(format!("{label}: holds={} in {}", r.holds, ms(took)));
        if !r.holds {
            failures.push((label, params, r));
        }
    }
    // The n = 2, alpha = 1/2 case is outside the construction's range; its
    // witness must be a genuine allocation that is 1/2-MMS for the agents and
    // EF1 for the market.
    let mut explained = Vec::new();
    let mut unexplained = Vec::new();
    for (label, params, r) in &failures {
        let is_outside = params.n == Some(OUTSIDE_RANGE.0)
            && params.alpha == Some(ratio(OUTSIDE_RANGE.1 .0, OUTSIDE_RANGE.1 .1));
        let witness_ok = r.witness.as_ref().is_some_and(|w| {
            let inst = thm_4_4(2).unwrap();
            let u = inst.additive_utilities().unwrap();
            check_mms_alpha(&u, w, &ratio(1, 2), 14).unwrap().passed
                && check_ef1(&inst.market_profile(), w).unwrap().passed
        });
        if is_outside && witness_ok {
            explained.push(format!(
                "{label} does not hold: alpha = 1/2 is not above 1/n, allocation {:?} is 1/2-MMS for the agents and EF1 for the market",
                r.witness.as_ref().unwrap().bundles()
            ));
        } else {
            unexplained.push(label.clone());
        }
    }
    let pass = failures.is_empty() && !slow;
    let mut summary = format!(
        "parametrized impossibilities, each under 1 s: {}",
        lines.join(", ")
    );
    if !explained.is_empty() {
        summary.push_str(&format!("; {}", explained.join("; ")));
    }
    (
        Outcome::new(7, pass, summary),
        unexplained
            .into_iter()
            .chain(slow.then(|| "time limit".to_string()))
            .collect(),
    )
}

/// `min(cap, sum)` straight from the stored parts.
fn budget_value(u: &MonotoneValuation, bundle: &[usize]) -> Value {
    let MonotoneValuation::BudgetAdditive { base, cap } = u else {
        panic!("budget-additive utilities expected")
    };
    let sum: Value = bundle.iter().map(|&g| base.values()[g].clone()).sum();
    sum.min(cap.clone())
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let total = 300;
    let mut ok = 0;
    let half = ratio(1, 2);
    for _ in 0..total {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(0..=8);
        let cfg = GenConfig {
            budget_caps: true,
            ..config(n, m, rng.gen())
        };
        let inst = generate(&cfg).unwrap();
        let a = solve_mes(&inst, 1 << 20).unwrap();
        let u = inst.utilities();
        let half_ef1 = (0..n).all(|i| {
            let own = budget_value(&u[i], a.bundle(i));
            (0..n).all(|j| {
                let other = a.bundle(j);
                i == j
                    || other.is_empty()
                    || other.iter().any(|&g| {
                        let rest: Vec<usize> = other.iter().copied().filter(|&h| h != g).collect();
                        own >= &half * budget_value(&u[i], &rest)
                    })
            })
        });
        let v = inst.homogeneous_market().unwrap().values().to_vec();
        let complete = a.bundles().iter().map(Vec::len).sum::<usize>() == m;
        if half_ef1 && complete && one_per_block(&v, n, &a) {
            ok += 1;
        }
    }
    Outcome::new(
        8,
        ok == total,
        format!("budget-additive utilities, n<=3, m<=8, 1/2-EF1 by direct evaluation + one good per block: {ok}/{total}"),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let total = 100;
    let mut ok = 0;
    let mut problems = Vec::new();
    for k in 0..total {
        let m = rng.gen_range(1..=12);
        let utilities = (0..2)
            .map(|i| {
                MonotoneValuation::Oracle(random_monotone_oracle(
                    &mut rng,
                    m,
                    6,
                    &format!("agent {}", i + 1),
                ))
            })
            .collect();
        let v: Vec<i64> = (0..m).map(|_| rng.gen_range(1..=10)).collect();
        let inst = Instance::new(
            m,
            utilities,
            Market::Homogeneous(AdditiveValuation::from_ints(&v)),
        )
        .unwrap();
        match solve_two_agent_pairs(&inst, 12) {
            Ok(a) => {
                let values: Vec<Value> = v.iter().map(|&x| int(x)).collect();
                let order = market_order(&values);
                let pairs_ok = order.chunks(2).all(|pair| {
                    pair.len() == 1
                        || (0..2)
                            .all(|i| pair.iter().filter(|g| a.bundle(i).contains(g)).count() == 1)
                });
                let complete = a.bundles().iter().map(Vec::len).sum::<usize>() == m;
                if pairs_ok && complete && check_ef1(inst.utilities(), &a).unwrap().passed {
                    ok += 1;
                } else {
                    problems.push(format!("instance {k}: invalid output"));
                }
            }
            Err(e) => problems.push(format!("instance {k}: {e}")),
        }
    }
    Outcome::new(
        9,
        ok == total,
        format!(
            "two agents, monotone set-function utilities, m<=12, pair-respecting EF1 found: {ok}/{total}{}",
            if problems.is_empty() { String::new() } else { format!(" ({})", problems.join("; ")) }
        ),
    )
}

/// Maximin share by trying every assignment of goods to bundles.
fn naive_mms(values: &[i64], n: usize) -> i64 {
    fn go(values: &[i64], idx: usize, loads: &mut Vec<i64>) -> i64 {
        if idx == values.len() {
            return *loads.iter().min().unwrap();
        }
        let mut best = i64::MIN;
        for k in 0..loads.len() {
            loads[k] += values[idx];
            best = best.max(go(values, idx + 1, loads));
            loads[k] -= values[idx];
        }
        best
    }
    go(values, 0, &mut vec![0; n])
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let total = 200;
    let mut ok = 0;
    for _ in 0..total {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(0..=8);
        let values: Vec<i64> = (0..m).map(|_| rng.gen_range(0..=20)).collect();
        let share = compute_mms(&AdditiveValuation::from_ints(&values), n, 14).unwrap();
        if share.value == int(naive_mms(&values, n)) {
            ok += 1;
        }
    }
    let mut construction = Vec::new();
    let mut construction_ok = true;
    for n in [2usize, 3, 4] {
        let inst = thm_4_4(n).unwrap();
        let u = inst.additive_utilities().unwrap();
        let mu = compute_mms(&u[0], n, 14).unwrap().value;
        construction_ok &= mu == int(n as i64);
        construction.push(format!("n={n}: {mu}"));
    }
    Outcome::new(
        10,
        ok == total && construction_ok,
        format!(
            "exact maximin share vs brute force: {ok}/{total}; construction shares {}",
            construction.join(", ")
        ),
    )
}

fn random_density(rng: &mut ChaCha8Rng) -> PiecewiseConstantDensity {
    let denom = 24;
    let pieces = rng.gen_range(1..=5);
    let mut cuts: Vec<i64> = (1..denom).collect();
    for i in (1..cuts.len()).rev() {
        cuts.swap(i, rng.gen_range(0..=i));
    }
    let mut inner: Vec<i64> = cuts.into_iter().take(pieces - 1).collect();
    inner.sort_unstable();
    let mut breakpoints = vec![int(0)];
    breakpoints.extend(inner.iter().map(|&c| ratio(c, denom)));
    breakpoints.push(one());
    let mut densities: Vec<Value> = (0..pieces).map(|_| int(rng.gen_range(0..=9))).collect();
    if densities.iter().all(|d| *d == int(0)) {
        densities[0] = one();
    }
    PiecewiseConstantDensity::new(breakpoints, densities).unwrap()
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let total = 200;
    let mut ok = 0;
    for _ in 0..total {
        let t = rng.gen_range(1..=4);
        let n = rng.gen_range(1..=5);
        let densities: Vec<_> = (0..t).map(|_| random_density(&mut rng)).collect();
        let a = perfect_division(&densities, n, SplitOrder::Snake).unwrap();
        let equal = densities.iter().all(|d| {
            let share = d.total() / int(n as i64);
            (0..n).all(|k| measure(d, a.piece(k)).unwrap() == share)
        });
        if equal {
            ok += 1;
        }
    }
    let mut cuts = Vec::new();
    let mut cuts_ok = true;
    for n in 2..=5usize {
        let cake = thm_5_1(n).unwrap();
        let a = perfect_division(&cake.all_densities(), n, SplitOrder::Snake).unwrap();
        let ef = check_cake(CakeFairness::EnvyFree, Side::Agents, &cake.utilities, &a)
            .unwrap()
            .passed
            && check_cake(
                CakeFairness::EnvyFree,
                Side::Market,
                &cake.market_profile(),
                &a,
            )
            .unwrap()
            .passed;
        cuts_ok &= ef && a.cut_count() >= 2 * n - 2;
        cuts.push(format!("n={n}: {} cuts", a.cut_count()));
    }
    let cake = thm_5_5();
    let a = thm_5_5_allocation();
    let own = measure(&cake.utilities[1], a.piece(1)).unwrap();
    let other = measure(&cake.utilities[1], a.piece(0)).unwrap();
    let reproduced = own == ratio(1, 3) && other == ratio(4, 9) && own < other;
    Outcome::new(
        11,
        ok == total && cuts_ok && reproduced,
        format!(
            "perfect division exact on {ok}/{total} random instances; two-level density EF on both sides with {}; three-agent balanced allocation: u2(A2) = {} < u2(A1) = {}",
            cuts.join(", "),
            fairmarket::value::format_value(&own),
            fairmarket::value::format_value(&other)
        ),
    )
}

fn criterion_12() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let total = 1000;
    let (mut sd, mut efx, mut ef1, mut violations) = (0, 0, 0, 0);
    for k in 0..total {
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(1..=8);
        let cfg = GenConfig {
            max: if k % 3 == 0 { 3 } else { 10 },
            ..config(n, m, rng.gen())
        };
        let inst = generate(&cfg).unwrap();
        let u = inst.additive_utilities().unwrap();
        let alloc = if k % 2 == 0 {
            let owners: Vec<usize> = (0..m).map(|_| rng.gen_range(0..n)).collect();
            Allocation::from_owners(n, &owners)
        } else {
            solve_ef1_sdef1(&inst).unwrap()
        };
        let is_ef1 = check_ef1(&u, &alloc).unwrap().passed;
        if check_sd_ef1(&u, &alloc).unwrap().passed {
            sd += 1;
            violations += usize::from(!is_ef1);
        }
        if check_efx_alpha(&u, &alloc, &one()).unwrap().passed {
            efx += 1;
            violations += usize::from(!is_ef1);
        }
        if is_ef1 {
            ef1 += 1;
            let share = ratio(1, n as i64);
            violations += usize::from(!check_mms_alpha(&u, &alloc, &share, 14).unwrap().passed);
        }
    }
    Outcome::new(
        12,
        violations == 0,
        format!(
            "implications on {total} pairs: SD-EF1=>EF1 ({sd} cases), EFX=>EF1 ({efx} cases), EF1=>1/n-MMS ({ef1} cases); {violations} violations"
        ),
    )
}

#[test]
fn acceptance() {
    let (seven, unexplained_seven) = criterion_7();
    let outcomes = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        seven,
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
        criterion_12(),
    ];
    for o in &outcomes {
        println!(
            "[{}] {:>2} {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.summary
        );
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("{passed}/{} criteria pass", outcomes.len());

    // Criterion 7 includes one parameter pair outside the construction's
    // range; that line fails by design and is accepted only with a checked
    // witness. Everything else must pass.
    for o in &outcomes {
        if o.id == 7 {
            assert!(
                unexplained_seven.is_empty(),
                "criterion 7: {unexplained_seven:?}"
            );
        } else {
            assert!(o.pass, "criterion {}: {}", o.id, o.summary);
        }
    }
}
