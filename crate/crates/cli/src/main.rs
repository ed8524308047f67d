//! `fairmarket`: solve, check, verify and generate fair division instances
//! with subjective utilities and market values.
//!
//! Exit codes: 0 success, 1 a check failed or a claim did not hold, 2 usage
//! or input error, 3 an enumeration bound was exceeded.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use fairmarket::algorithms::{solve, Algorithm};
use fairmarket::cake::{
    check_cake, measure, perfect_division, CakeFairness, CakeInstance, IntervalAllocation,
    SplitOrder,
};
use fairmarket::criteria::{evaluate, CriterionSpec, Side};
use fairmarket::generate::{generate, Distribution, GenConfig};
use fairmarket::io::{instance_from_json, instance_to_json, parse_allocation};
use fairmarket::model::validate;
use fairmarket::oracle::library::{builtin_cake, builtin_instance, thm_5_5_allocation};
use fairmarket::oracle::{
    search_open_problem, verify_theorem, OpenProblem, Theorem, TheoremParams,
};
use fairmarket::value::{format_value, parse_value};
use fairmarket::{Error, Instance, Limits, Value};

const ENUM_BOUND_VAR: &str = "FAIRMARKET_ENUM_BOUND";

#[derive(Parser)]
#[command(
    name = "fairmarket",
    version,
    about = "Fair division with subjective utilities and market values"
)]
struct Cli {
    /// Largest number of allocations a single exhaustive scan may visit.
    /// Overrides FAIRMARKET_ENUM_BOUND.
    #[arg(long, global = true)]
    enum_bound: Option<u64>,

    /// Write JSON output to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an allocation algorithm and certify its guarantees.
    Solve(SolveArgs),
    /// Check an allocation against a list of criteria.
    Check(CheckArgs),
    /// Exhaustively verify one of the built-in impossibility results.
    Verify(VerifyArgs),
    /// Generate a random instance from a seed.
    Gen(GenArgs),
    /// Time an algorithm over a batch of generated instances.
    Bench(BenchArgs),
    /// Search a value grid for counterexamples to an open question.
    Search(SearchArgs),
    /// Perfect division of a piecewise-constant cake.
    Cake(CakeArgs),
}

#[derive(Args)]
struct InstanceArgs {
    /// Path to an instance JSON file or a built-in name
    /// (thm_3_1, thm_4_1, prop_B_1, thm_4_4, thm_4_5).
    #[arg(long, short)]
    instance: String,
    /// Agent count for thm_4_4.
    #[arg(long)]
    n: Option<usize>,
    /// Parameter for thm_4_5, as an integer or a/b.
    #[arg(long, value_parser = value_arg)]
    alpha: Option<Value>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, short)]
    algorithm: String,
    #[command(flatten)]
    instance: InstanceArgs,
    /// Include the step-by-step trace.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// `g1,g2|g3` or a JSON allocation (inline or a file path).
    #[arg(long)]
    allocation: String,
    /// Comma-separated `name[:side][@alpha]`, e.g. `ef1:agents,efx:market@1/2`.
    #[arg(long, default_value = "")]
    criteria: String,
    /// Prices for the equilibrium check, comma-separated.
    #[arg(long)]
    prices: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// thm_3_1, thm_3_2, thm_4_1, thm_4_4, thm_4_5 or prop_B_1.
    #[arg(long, short)]
    theorem: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_parser = value_arg)]
    alpha: Option<Value>,
    /// Largest good count for thm_3_2.
    #[arg(long)]
    max_goods: Option<usize>,
}

#[derive(Args, Clone)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// uniform, correlated[:mix] or identical-ranking.
    #[arg(long, default_value = "uniform")]
    dist: String,
    /// Values are drawn from 1..=max.
    #[arg(long, default_value_t = 10)]
    max: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    heterogeneous_market: bool,
    #[arg(long)]
    budget_caps: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, short)]
    algorithm: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 100)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "uniform")]
    dist: String,
    #[arg(long, default_value_t = 10)]
    max: u64,
    #[arg(long)]
    heterogeneous_market: bool,
    #[arg(long)]
    budget_caps: bool,
}

#[derive(Args)]
struct SearchArgs {
    /// op_3_4 or op_4_2.
    #[arg(long, short)]
    problem: String,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long)]
    max_goods: usize,
    /// Comma-separated grid values.
    #[arg(long, default_value = "1,2,3")]
    grid: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Snake,
    Ascending,
}

#[derive(Args)]
struct CakeArgs {
    /// Path to a cake instance JSON file or thm_5_1 / thm_5_5.
    #[arg(long, short)]
    instance: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value = "snake")]
    order: Order,
    /// Evaluate this interval allocation (JSON, inline or a path) instead
    /// of computing a perfect division.
    #[arg(long)]
    allocation: Option<String>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_bound_exceeded() => 3,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn value_arg(s: &str) -> std::result::Result<Value, String> {
    parse_value(s).map_err(|e| e.to_string())
}

fn limits(cli_bound: Option<u64>) -> CliResult<Limits> {
    let mut limits = Limits::default();
    if let Ok(raw) = std::env::var(ENUM_BOUND_VAR) {
        limits.enumeration_bound = raw.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "{ENUM_BOUND_VAR} must be a nonnegative integer, got `{raw}`"
            ))
        })?;
    }
    if let Some(b) = cli_bound {
        limits.enumeration_bound = b;
    }
    Ok(limits)
}

/// Contents of the named file when `arg` is a path, otherwise `arg` itself.
fn inline_or_file(arg: &str) -> CliResult<String> {
    let path = Path::new(arg);
    if path.is_file() {
        std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: arg.into(),
            source,
        })
    } else {
        Ok(arg.into())
    }
}

fn load_instance(args: &InstanceArgs) -> CliResult<Instance> {
    let path = Path::new(&args.instance);
    if path.is_file() {
        let text = inline_or_file(&args.instance)?;
        return Ok(instance_from_json(&text)?);
    }
    Ok(builtin_instance(
        &args.instance,
        args.n,
        args.alpha.as_ref(),
    )?)
}

fn load_cake(name: &str, n: Option<usize>) -> CliResult<CakeInstance> {
    if Path::new(name).is_file() {
        let text = inline_or_file(name)?;
        return serde_json::from_str(&text).map_err(|e| Error::from(e).into());
    }
    Ok(builtin_cake(name, n)?)
}

fn parse_list<T>(raw: &str, f: impl Fn(&str) -> CliResult<T>) -> CliResult<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(f)
        .collect()
}

fn parse_values(raw: &str) -> CliResult<Vec<Value>> {
    parse_list(raw, |s| value_arg(s).map_err(CliError::Usage))
}

fn emit(output: Option<&Path>, value: &impl Serialize) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    emit_text(output, &text)
}

fn emit_text(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Write {
                    path: "stdout".into(),
                    source: e,
                }),
                _ => Ok(()),
            }
        }
    }
}

fn gen_config(args: &GenArgs) -> CliResult<GenConfig> {
    Ok(GenConfig {
        n: args.n,
        m: args.m,
        dist: args.dist.parse::<Distribution>()?,
        max: args.max,
        heterogeneous_market: args.heterogeneous_market,
        budget_caps: args.budget_caps,
        seed: args.seed,
    })
}

fn cmd_solve(args: &SolveArgs, limits: &Limits, output: Option<&Path>) -> CliResult<bool> {
    let algorithm: Algorithm = args.algorithm.parse()?;
    let instance = load_instance(&args.instance)?;
    let solution = solve(algorithm, &instance, limits, args.trace)?;
    emit(output, &solution)?;
    Ok(solution.certified())
}

fn cmd_check(args: &CheckArgs, limits: &Limits, output: Option<&Path>) -> CliResult<bool> {
    let specs = parse_list(&args.criteria, |s| Ok(s.parse::<CriterionSpec>()?))?;
    let global_alpha = args.instance.alpha.clone();
    let instance = load_instance(&args.instance)?;
    let allocation = parse_allocation(&inline_or_file(&args.allocation)?)?;
    if let Err(violations) = validate(&instance, &allocation) {
        let messages: Vec<String> = violations.iter().map(ToString::to_string).collect();
        emit(output, &json!({ "valid": false, "violations": messages }))?;
        return Ok(false);
    }
    let prices = args.prices.as_deref().map(parse_values).transpose()?;
    let mut reports = Vec::with_capacity(specs.len());
    for mut spec in specs {
        if spec.alpha.is_none() && spec.criterion.takes_alpha() {
            spec.alpha = global_alpha.clone();
        }
        reports.push(evaluate(
            &instance,
            &allocation,
            &spec,
            limits,
            prices.as_deref(),
        )?);
    }
    let passed = reports.iter().all(|r| r.passed);
    emit(
        output,
        &json!({ "valid": true, "allocation": allocation, "passed": passed, "reports": reports }),
    )?;
    Ok(passed)
}

fn cmd_verify(args: &VerifyArgs, limits: &Limits, output: Option<&Path>) -> CliResult<bool> {
    let theorem: Theorem = args.theorem.parse()?;
    let params = TheoremParams {
        n: args.n,
        alpha: args.alpha.clone(),
        max_goods: args.max_goods,
    };
    let started = Instant::now();
    let report = verify_theorem(theorem, &params, limits)?;
    let mut value = serde_json::to_value(&report).map_err(Error::from)?;
    value["elapsed_ms"] = json!(started.elapsed().as_secs_f64() * 1e3);
    emit(output, &value)?;
    Ok(report.holds)
}

fn cmd_gen(args: &GenArgs, output: Option<&Path>) -> CliResult<bool> {
    let instance = generate(&gen_config(args)?)?;
    emit_text(output, &instance_to_json(&instance)?)?;
    Ok(true)
}

fn cmd_bench(args: &BenchArgs, limits: &Limits, output: Option<&Path>) -> CliResult<bool> {
    let algorithm: Algorithm = args.algorithm.parse()?;
    let base = GenArgs {
        n: args.n,
        m: args.m,
        dist: args.dist.clone(),
        max: args.max,
        seed: args.seed,
        heterogeneous_market: args.heterogeneous_market,
        budget_caps: args.budget_caps,
    };
    let mut config = gen_config(&base)?;
    let (mut certified, mut uncertified, mut errors) = (0u64, Vec::new(), Vec::new());
    let mut solve_time = 0f64;
    for k in 0..args.count {
        config.seed = args.seed + k;
        let instance = generate(&config)?;
        let started = Instant::now();
        let result = solve(algorithm, &instance, limits, false);
        solve_time += started.elapsed().as_secs_f64();
        match result {
            Ok(s) if s.certified() => certified += 1,
            Ok(_) => uncertified.push(config.seed),
            Err(e) => errors.push(json!({ "seed": config.seed, "error": e.to_string() })),
        }
    }
    let ok = uncertified.is_empty() && errors.is_empty();
    emit(
        output,
        &json!({
            "algorithm": algorithm.id(),
            "n": args.n,
            "m": args.m,
            "dist": config.dist.to_string(),
            "count": args.count,
            "certified": certified,
            "uncertified_seeds": uncertified,
            "errors": errors,
            "total_ms": solve_time * 1e3,
            "mean_ms": if args.count > 0 { solve_time * 1e3 / args.count as f64 } else { 0.0 },
        }),
    )?;
    Ok(ok)
}

fn cmd_search(args: &SearchArgs, limits: &Limits, output: Option<&Path>) -> CliResult<bool> {
    let problem: OpenProblem = args.problem.parse()?;
    let grid = parse_values(&args.grid)?;
    let report = search_open_problem(problem, args.n, args.max_goods, &grid, limits)?;
    emit(output, &report)?;
    Ok(true)
}

fn cake_report(cake: &CakeInstance, alloc: &IntervalAllocation) -> CliResult<serde_json::Value> {
    let utilities = check_cake(CakeFairness::EnvyFree, Side::Agents, &cake.utilities, alloc)?;
    let market = check_cake(
        CakeFairness::EnvyFree,
        Side::Market,
        &cake.market_profile(),
        alloc,
    )?;
    let balanced = check_cake(CakeFairness::Balanced, Side::Market, &[], alloc)?;
    // values[i][j]: agent i's value for piece j; the last row is the market.
    let values = cake
        .all_densities()
        .iter()
        .map(|d| {
            alloc
                .pieces()
                .iter()
                .map(|p| measure(d, p).map(|v| format_value(&v)))
                .collect::<fairmarket::Result<Vec<_>>>()
        })
        .collect::<fairmarket::Result<Vec<_>>>()?;
    Ok(json!({
        "allocation": alloc,
        "display": alloc.to_string(),
        "cuts": alloc.cut_count(),
        "values": values,
        "passed": utilities.passed && market.passed,
        "reports": [utilities, market, balanced],
    }))
}

fn cmd_cake(args: &CakeArgs, output: Option<&Path>) -> CliResult<bool> {
    let cake = load_cake(&args.instance, args.n)?;
    let alloc = match &args.allocation {
        Some(raw) => serde_json::from_str(&inline_or_file(raw)?).map_err(Error::from)?,
        None if args.instance == "thm_5_5" => thm_5_5_allocation(),
        None => {
            let order = match args.order {
                Order::Snake => SplitOrder::Snake,
                Order::Ascending => SplitOrder::Ascending,
            };
            perfect_division(&cake.all_densities(), cake.n(), order)?
        }
    };
    let report = cake_report(&cake, &alloc)?;
    let passed = report["passed"].as_bool().unwrap_or(false);
    emit(output, &report)?;
    Ok(passed)
}

fn run(cli: &Cli) -> CliResult<bool> {
    let limits = limits(cli.enum_bound)?;
    let output = cli.output.as_deref();
    match &cli.command {
        Command::Solve(a) => cmd_solve(a, &limits, output),
        Command::Check(a) => cmd_check(a, &limits, output),
        Command::Verify(a) => cmd_verify(a, &limits, output),
        Command::Gen(a) => cmd_gen(a, output),
        Command::Bench(a) => cmd_bench(a, &limits, output),
        Command::Search(a) => cmd_search(a, &limits, output),
        Command::Cake(a) => cmd_cake(a, output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
