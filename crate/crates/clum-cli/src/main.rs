//! clum: command-line front end for the CLUM pricing engine.
//!
//! Every subcommand emits a single JSON report object on stdout (after any
//! requested trace lines), so harnesses can parse output without scraping.
//! Exit codes: 0 success, 1 usage, 2 domain error, 3 capacity error,
//! 4 numeric/sampling error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use clum_core::approx::{approximate_cost, approximate_cost_explicit, CostEstimate};
use clum_core::exact::{solve_cost, solve_deficit_groups, trade_cost, SolveConfig};
use clum_core::interval::IntervalTree;
use clum_core::market::{Literal, MarketState, Security, BRUTE_FORCE_LIMIT};
use clum_core::reduction::{count_models_brute_force, count_models_via_pricing_detailed};
use clum_core::twosat::TwoSatFormula;
use clum_core::wish::{wish_price, EnumerationOracle, WishConfig, ALPHA_STAR};
use clum_core::{Error, ErrorCategory, Result};

#[derive(Parser)]
#[command(
    name = "clum",
    version,
    about = "Pricing engine for constant log utility market makers"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the exact market cost for a ledger file
    SolveExact {
        #[arg(long)]
        ledger: PathBuf,
        /// Tolerance on the log-invariant residual
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Estimate the cost by sampled binary search
    SolveApprox {
        #[arg(long)]
        ledger: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        seed: Option<u64>,
        /// Emit one JSON line per search round before the report
        #[arg(long)]
        trace: bool,
    },
    /// Price a prospective trade without committing it
    Quote(TradeArgs),
    /// Price a trade and write the updated ledger back
    Trade(TradeArgs),
    /// Count satisfying assignments of a 2-SAT formula
    CountModels {
        /// DIMACS CNF file with two literals per clause
        #[arg(long)]
        dimacs: PathBuf,
        #[arg(long, value_enum, default_value_t = Via::Pricing)]
        via: Via,
    },
    /// Interval market operations against a state file
    Interval {
        #[command(subcommand)]
        action: IntervalCmd,
    },
    /// Estimate a clause price with parity-hash sampling
    WishPrice {
        #[arg(long)]
        ledger: PathBuf,
        /// Two nonzero literals, e.g. "1 -2"
        #[arg(long)]
        clause: String,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long)]
        seed: Option<u64>,
        /// Concentration rate; values above the default shrink T but weaken
        /// the formal guarantee
        #[arg(long, alias = "alpha-override")]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 12)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        c: u32,
    },
    /// Run the embedded invariant suite
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum Via {
    Pricing,
    Brute,
}

#[derive(Args)]
struct TradeArgs {
    #[arg(long)]
    ledger: PathBuf,
    /// Clause security, two nonzero literals e.g. "1 -2"
    #[arg(long, conflicts_with_all = ["outcome", "lo", "hi"])]
    clause: Option<String>,
    /// Single-outcome indicator security
    #[arg(long, conflicts_with_all = ["lo", "hi"])]
    outcome: Option<u64>,
    /// Interval security start (needs --hi)
    #[arg(long, requires = "hi")]
    lo: Option<u64>,
    /// Interval security end, inclusive (needs --lo)
    #[arg(long, requires = "lo")]
    hi: Option<u64>,
    #[arg(long, default_value_t = 1)]
    qty: u64,
    /// Exact-path solver tolerance
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Approximate-path accuracy (interval ledgers)
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum IntervalCmd {
    /// Create an empty interval market state file
    Init {
        #[arg(long)]
        state: PathBuf,
        /// Outcome count N
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1.0)]
        c0: f64,
    },
    /// Add shares on every outcome in [lo, hi]
    Buy {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        #[arg(long)]
        qty: u64,
    },
    /// Report the maximum payout and how many outcomes attain it
    Max {
        #[arg(long)]
        state: PathBuf,
    },
    /// Approximate cost of a prospective interval purchase
    Quote {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        #[arg(long, default_value_t = 1)]
        qty: u64,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            process::exit(code);
        }
    };
    match run(cli) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("report is plain JSON"));
        }
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err.category() {
                ErrorCategory::Domain => 2,
                ErrorCategory::Capacity => 3,
                ErrorCategory::Numeric => 4,
            };
            process::exit(code);
        }
    }
}

fn run(cli: Cli) -> Result<Value> {
    match cli.command {
        Cmd::SolveExact { ledger, tol } => cmd_solve_exact(&ledger, tol),
        Cmd::SolveApprox { ledger, epsilon, delta, seed, trace } => {
            cmd_solve_approx(&ledger, epsilon, delta, seed, trace)
        }
        Cmd::Quote(args) => cmd_trade(&args, false),
        Cmd::Trade(args) => cmd_trade(&args, true),
        Cmd::CountModels { dimacs, via } => cmd_count_models(&dimacs, via),
        Cmd::Interval { action } => cmd_interval(action),
        Cmd::WishPrice { ledger, clause, delta, seed, alpha, k, c } => {
            cmd_wish_price(&ledger, &clause, delta, seed, alpha, k, c)
        }
        Cmd::Selftest => cmd_selftest(),
    }
}

fn report(command: &str, inputs: Value, result: Value, diagnostics: Value, seed: Option<u64>) -> Value {
    json!({
        "command": command,
        "inputs": inputs,
        "result": result,
        "diagnostics": diagnostics,
        "seed": seed,
    })
}

/// Seed precedence: flag, then CLUM_SEED, then 0.
fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("CLUM_SEED") {
        Ok(text) => text.trim().parse::<u64>().map_err(|_| {
            Error::Parse(format!("CLUM_SEED must be an unsigned integer, got {text:?}"))
        }),
        Err(_) => Ok(0),
    }
}

fn parse_clause(text: &str) -> Result<Security> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(Error::Parse(format!(
            "a clause is two nonzero literals like \"1 -2\", got {text:?}"
        )));
    }
    let mut lits = [Literal::new(1, true); 2];
    for (slot, part) in lits.iter_mut().zip(&parts) {
        let v: i64 = part
            .parse()
            .map_err(|_| Error::Parse(format!("literal {part:?} is not an integer")))?;
        if v == 0 || v.unsigned_abs() > u32::MAX as u64 {
            return Err(Error::Parse(format!("literal {v} out of range")));
        }
        *slot = Literal::new(v.unsigned_abs() as u32, v > 0);
    }
    Ok(Security::Clause2(lits[0], lits[1]))
}

/// On-disk interval market: subsidy, universe size, elementary intervals.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalState {
    #[serde(rename = "C0")]
    c0: f64,
    #[serde(rename = "N")]
    n: u64,
    intervals: Vec<(u64, u64)>,
}

fn load_interval_state(path: &Path) -> Result<(f64, IntervalTree)> {
    let text = fs::read_to_string(path)?;
    let state: IntervalState =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    if !(state.c0 > 0.0) || !state.c0.is_finite() {
        return Err(Error::InvalidMarket(format!("C0 must be a positive real, got {}", state.c0)));
    }
    Ok((state.c0, IntervalTree::from_entries(state.n, &state.intervals)?))
}

fn save_interval_state(path: &Path, c0: f64, tree: &IntervalTree) -> Result<()> {
    let state = IntervalState { c0, n: tree.n_outcomes(), intervals: tree.to_entries() };
    let text = serde_json::to_string_pretty(&state).expect("interval state is plain JSON");
    fs::write(path, text + "\n")?;
    Ok(())
}

enum Loaded {
    Market(MarketState),
    Interval { c0: f64, tree: IntervalTree },
}

/// Accepts either a securities ledger or an interval state file.
fn load_ledger_any(path: &Path) -> Result<Loaded> {
    let text = fs::read_to_string(path)?;
    match MarketState::from_json(&text) {
        Ok(state) => Ok(Loaded::Market(state)),
        Err(market_err) => match serde_json::from_str::<IntervalState>(&text) {
            Ok(state) => {
                if !(state.c0 > 0.0) || !state.c0.is_finite() {
                    return Err(Error::InvalidMarket(format!(
                        "C0 must be a positive real, got {}",
                        state.c0
                    )));
                }
                let tree = IntervalTree::from_entries(state.n, &state.intervals)?;
                Ok(Loaded::Interval { c0: state.c0, tree })
            }
            Err(_) => Err(market_err),
        },
    }
}

/// Deficit groups straight off the elementary intervals, so interval
/// ledgers solve exactly without materializing N payouts.
fn tree_groups(tree: &IntervalTree) -> (u64, Vec<(f64, u64)>) {
    let n = tree.n_outcomes();
    let entries = tree.to_entries();
    let mut by_value: BTreeMap<u64, u64> = BTreeMap::new();
    if let (Some(&(first, _)), Some(&(last_key, last_val))) = (entries.first(), entries.last()) {
        if first > 0 {
            *by_value.entry(0).or_insert(0) += first;
        }
        for pair in entries.windows(2) {
            *by_value.entry(pair[0].1).or_insert(0) += pair[1].0 - pair[0].0;
        }
        *by_value.entry(last_val).or_insert(0) += n - last_key;
    } else {
        by_value.insert(0, n);
    }
    let q_max = *by_value.keys().last().expect("at least one group");
    // Ascending values give descending deficits.
    let groups = by_value.iter().map(|(&v, &len)| ((q_max - v) as f64, len)).collect();
    (q_max, groups)
}

fn cmd_solve_exact(ledger: &Path, tol: f64) -> Result<Value> {
    let cfg = SolveConfig { abs_tol: tol, ..Default::default() };
    let (sol, path, c0, n) = match load_ledger_any(ledger)? {
        Loaded::Market(state) => {
            let sol = solve_cost(&state.share_vector(), state.c0(), &cfg)?;
            (sol, "exact-explicit", state.c0(), state.n_outcomes())
        }
        Loaded::Interval { c0, tree } => {
            let (q_max, groups) = tree_groups(&tree);
            let sol = solve_deficit_groups(&groups, q_max as f64, c0, &cfg)?;
            (sol, "exact-interval-groups", c0, tree.n_outcomes())
        }
    };
    Ok(report(
        "solve-exact",
        json!({ "ledger": ledger.display().to_string(), "tol": tol, "C0": c0, "N": n }),
        json!({ "cost": sol.cost, "residual": sol.residual }),
        json!({
            "path": path,
            "q_max": sol.q_max,
            "log_offset": sol.log_offset,
            "iterations": sol.iterations,
        }),
        None,
    ))
}

fn estimate_diagnostics(est: &CostEstimate, path: &str) -> Value {
    json!({
        "path": path,
        "initial_bracket": [est.initial_bracket.0, est.initial_bracket.1],
        "iterations": est.iterations,
        "terminated_early": est.terminated_early,
        "samples_drawn": est.samples_drawn,
    })
}

fn cmd_solve_approx(
    ledger: &Path,
    epsilon: f64,
    delta: f64,
    seed: Option<u64>,
    trace: bool,
) -> Result<Value> {
    let seed = resolve_seed(seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (est, path, c0, n) = match load_ledger_any(ledger)? {
        Loaded::Market(state) => {
            let q = state.materialize_payouts(BRUTE_FORCE_LIMIT)?;
            let est = approximate_cost_explicit(&q, state.c0(), epsilon, delta, &mut rng)?;
            (est, "approx-explicit", state.c0(), state.n_outcomes())
        }
        Loaded::Interval { c0, tree } => {
            let est = approximate_cost(&tree, c0, epsilon, delta, &mut rng)?;
            (est, "approx-interval-oracle", c0, tree.n_outcomes())
        }
    };
    if trace {
        for row in &est.trace {
            let line = json!({ "round": row.round, "a": row.a, "b": row.b, "u_hat": row.u_hat });
            println!("{}", serde_json::to_string(&line).expect("trace row is plain JSON"));
        }
    }
    Ok(report(
        "solve-approx",
        json!({
            "ledger": ledger.display().to_string(),
            "epsilon": epsilon,
            "delta": delta,
            "C0": c0,
            "N": n,
        }),
        json!({ "c_hat": est.c_hat }),
        estimate_diagnostics(&est, path),
        Some(seed),
    ))
}

fn security_from_args(args: &TradeArgs) -> Result<Security> {
    match (&args.clause, args.outcome, args.lo, args.hi) {
        (Some(text), None, None, None) => parse_clause(text),
        (None, Some(j), None, None) => Ok(Security::Indicator(j)),
        (None, None, Some(lo), Some(hi)) => Ok(Security::Interval { lo, hi }),
        _ => Err(Error::InvalidParameter(
            "pick exactly one security: --clause, --outcome, or --lo/--hi".into(),
        )),
    }
}

fn security_echo(sec: &Security) -> Value {
    match *sec {
        Security::Clause2(a, b) => json!({
            "type": "clause2",
            "lits": [[a.event, a.positive], [b.event, b.positive]],
        }),
        Security::Indicator(j) => json!({ "type": "indicator", "outcome": j }),
        Security::Interval { lo, hi } => json!({ "type": "interval", "lo": lo, "hi": hi }),
    }
}

fn cmd_trade(args: &TradeArgs, commit: bool) -> Result<Value> {
    let command = if commit { "trade" } else { "quote" };
    match load_ledger_any(&args.ledger)? {
        Loaded::Market(mut state) => {
            let sec = security_from_args(args)?;
            let cfg = SolveConfig { abs_tol: args.tol, ..Default::default() };
            let cost = trade_cost(&state, sec, args.qty, &cfg)?;
            if commit {
                state.buy(sec, args.qty)?;
                fs::write(&args.ledger, state.to_json())?;
            }
            Ok(report(
                command,
                json!({
                    "ledger": args.ledger.display().to_string(),
                    "security": security_echo(&sec),
                    "qty": args.qty,
                    "tol": args.tol,
                }),
                json!({ "cost": cost, "committed": commit }),
                json!({ "path": "exact", "N": state.n_outcomes(), "C0": state.c0() }),
                None,
            ))
        }
        Loaded::Interval { c0, mut tree } => {
            let (lo, hi) = match (args.clause.as_ref(), args.outcome, args.lo, args.hi) {
                (None, None, Some(lo), Some(hi)) => (lo, hi),
                (None, Some(j), None, None) => (j, j),
                _ => {
                    return Err(Error::InvalidSecurity(
                        "interval ledgers only price interval securities (--lo/--hi)".into(),
                    ))
                }
            };
            let seed = resolve_seed(args.seed)?;
            let (cost, before, after) =
                interval_trade_estimate(&mut tree, c0, lo, hi, args.qty, args.epsilon, args.delta, seed)?;
            if commit {
                save_interval_state(&args.ledger, c0, &tree)?;
            }
            Ok(report(
                command,
                json!({
                    "ledger": args.ledger.display().to_string(),
                    "security": security_echo(&Security::Interval { lo, hi }),
                    "qty": args.qty,
                    "epsilon": args.epsilon,
                    "delta": args.delta,
                }),
                json!({ "cost": cost, "committed": commit }),
                json!({
                    "path": "interval-approx",
                    "N": tree.n_outcomes(),
                    "C0": c0,
                    "c_hat_before": before.c_hat,
                    "c_hat_after": after.c_hat,
                    "iterations": [before.iterations, after.iterations],
                    "samples_drawn": before.samples_drawn + after.samples_drawn,
                }),
                Some(seed),
            ))
        }
    }
}

/// Approximate trade cost as the difference of two cost estimates, taken on
/// independent RNG substreams of the same seed. Mutates the tree.
#[allow(clippy::too_many_arguments)]
fn interval_trade_estimate(
    tree: &mut IntervalTree,
    c0: f64,
    lo: u64,
    hi: u64,
    qty: u64,
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<(f64, CostEstimate, CostEstimate)> {
    let mut rng_before = ChaCha8Rng::seed_from_u64(seed);
    rng_before.set_stream(0);
    let before = approximate_cost(tree, c0, epsilon, delta, &mut rng_before)?;
    tree.purchase(lo, hi, qty)?;
    let mut rng_after = ChaCha8Rng::seed_from_u64(seed);
    rng_after.set_stream(1);
    let after = approximate_cost(tree, c0, epsilon, delta, &mut rng_after)?;
    Ok(((after.c_hat - before.c_hat).max(0.0), before, after))
}

fn cmd_count_models(dimacs: &Path, via: Via) -> Result<Value> {
    let text = fs::read_to_string(dimacs)?;
    let formula = TwoSatFormula::from_dimacs(&text)?;
    let inputs = json!({
        "dimacs": dimacs.display().to_string(),
        "n": formula.n(),
        "clauses": formula.k(),
        "via": match via { Via::Pricing => "pricing", Via::Brute => "brute" },
    });
    match via {
        Via::Brute => {
            let count = count_models_brute_force(&formula)?;
            Ok(report("count-models", inputs, json!({ "count": count }), json!({}), None))
        }
        Via::Pricing => {
            let detail = count_models_via_pricing_detailed(&formula, 1.0)?;
            let diagnostics = json!({
                "witness": detail.witness,
                "inverse_price": detail.inverse_price,
                "clause_quantity": detail.clause_quantity,
                "solver_iterations": detail.solution.as_ref().map(|s| s.iterations),
                "log_offset": detail.solution.as_ref().map(|s| s.log_offset),
            });
            Ok(report("count-models", inputs, json!({ "count": detail.count }), diagnostics, None))
        }
    }
}

fn cmd_interval(action: IntervalCmd) -> Result<Value> {
    match action {
        IntervalCmd::Init { state, n, c0 } => {
            let tree = IntervalTree::new(n)?;
            if !(c0 > 0.0) || !c0.is_finite() {
                return Err(Error::InvalidMarket(format!("C0 must be a positive real, got {c0}")));
            }
            save_interval_state(&state, c0, &tree)?;
            Ok(report(
                "interval-init",
                json!({ "state": state.display().to_string(), "N": n, "C0": c0 }),
                json!({ "created": true, "k": 0 }),
                json!({}),
                None,
            ))
        }
        IntervalCmd::Buy { state, lo, hi, qty } => {
            let (c0, mut tree) = load_interval_state(&state)?;
            tree.purchase(lo, hi, qty)?;
            save_interval_state(&state, c0, &tree)?;
            let stats = tree.max_stats();
            Ok(report(
                "interval-buy",
                json!({ "state": state.display().to_string(), "lo": lo, "hi": hi, "qty": qty }),
                json!({ "q_max": stats.q_max, "s_qmax": stats.s_qmax }),
                json!({ "k": tree.node_count(), "N": tree.n_outcomes() }),
                None,
            ))
        }
        IntervalCmd::Max { state } => {
            let (_, tree) = load_interval_state(&state)?;
            let stats = tree.max_stats();
            Ok(report(
                "interval-max",
                json!({ "state": state.display().to_string() }),
                json!({ "q_max": stats.q_max, "s_qmax": stats.s_qmax }),
                json!({ "k": tree.node_count(), "N": tree.n_outcomes() }),
                None,
            ))
        }
        IntervalCmd::Quote { state, lo, hi, qty, epsilon, delta, seed } => {
            let (c0, mut tree) = load_interval_state(&state)?;
            let seed = resolve_seed(seed)?;
            let (cost, before, after) =
                interval_trade_estimate(&mut tree, c0, lo, hi, qty, epsilon, delta, seed)?;
            Ok(report(
                "interval-quote",
                json!({
                    "state": state.display().to_string(),
                    "lo": lo,
                    "hi": hi,
                    "qty": qty,
                    "epsilon": epsilon,
                    "delta": delta,
                }),
                json!({ "cost": cost }),
                json!({
                    "path": "interval-approx",
                    "c_hat_before": before.c_hat,
                    "c_hat_after": after.c_hat,
                    "iterations": [before.iterations, after.iterations],
                    "samples_drawn": before.samples_drawn + after.samples_drawn,
                    "N": tree.n_outcomes(),
                    "C0": c0,
                }),
                Some(seed),
            ))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_wish_price(
    ledger: &Path,
    clause: &str,
    delta: f64,
    seed: Option<u64>,
    alpha: Option<f64>,
    k: u32,
    c: u32,
) -> Result<Value> {
    let seed = resolve_seed(seed)?;
    let alpha = alpha.unwrap_or(ALPHA_STAR);
    if alpha > ALPHA_STAR {
        eprintln!(
            "warning: alpha {alpha} exceeds alpha* = {ALPHA_STAR}; \
             fewer repetitions, weaker guarantee"
        );
    }
    let text = fs::read_to_string(ledger)?;
    let state = MarketState::from_json(&text)?;
    let sec = parse_clause(clause)?;
    let cfg = WishConfig { delta, alpha, c, k };
    let (oracle, sol) = EnumerationOracle::from_market(&state, sec, &SolveConfig::default())?;
    let out = wish_price(&oracle, &cfg, seed)?;
    Ok(report(
        "wish-price",
        json!({
            "ledger": ledger.display().to_string(),
            "clause": clause,
            "delta": delta,
            "alpha": alpha,
            "k": k,
            "c": c,
        }),
        json!({ "price": out.price }),
        json!({
            "rounds": out.rounds,
            "kmap_queries": out.kmap_queries,
            "degenerate": out.degenerate,
            "n_aggregate": out.n_aggregate,
            "n_prime_aggregate": out.n_prime_aggregate,
            "exact_cost": sol.cost,
        }),
        Some(seed),
    ))
}

fn cmd_selftest() -> Result<Value> {
    let checks: &[(&str, fn() -> Result<()>)] = &[
        ("exact-golden-ratio", check_golden_ratio),
        ("exact-interval-groups", check_interval_groups),
        ("twosat-witness", check_twosat_witness),
        ("count-pricing-vs-brute", check_count_agreement),
        ("interval-lazy-overlap", check_interval_overlap),
        ("approx-degenerate-exact", check_approx_degenerate),
        ("wish-tautology", check_wish_tautology),
    ];
    for (name, check) in checks {
        check().map_err(|e| Error::InvalidParameter(format!("selftest {name}: {e}")))?;
        println!("ok - {name}");
    }
    Ok(report(
        "selftest",
        json!({}),
        json!({ "checks": checks.len(), "passed": checks.len() }),
        json!({ "names": checks.iter().map(|(n, _)| *n).collect::<Vec<_>>() }),
        None,
    ))
}

fn ensure(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(what.into()))
    }
}

fn check_golden_ratio() -> Result<()> {
    // One unit on one of two outcomes at C0 = 1: C(C - 1) = 1.
    let mut state = MarketState::boolean(1.0, 1)?;
    state.buy(Security::Indicator(1), 1)?;
    let sol = solve_cost(&state.share_vector(), 1.0, &SolveConfig::default())?;
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    ensure((sol.cost - phi).abs() < 1e-12, "cost is not the golden ratio")
}

fn check_interval_groups() -> Result<()> {
    let mut tree = IntervalTree::new(1000)?;
    tree.purchase(0, 999, 5)?;
    let (q_max, groups) = tree_groups(&tree);
    let sol = solve_deficit_groups(&groups, q_max as f64, 2.0, &SolveConfig::default())?;
    ensure(sol.cost == 7.0, "uniform interval ledger must cost q_max + C0 exactly")
}

fn check_twosat_witness() -> Result<()> {
    let f = TwoSatFormula::new(
        3,
        vec![
            (Literal::new(1, true), Literal::new(2, true)),
            (Literal::new(1, false), Literal::new(3, true)),
        ],
    )?;
    match f.find_assignment() {
        Some(w) => ensure(f.satisfied_by(w), "witness does not satisfy the formula"),
        None => Err(Error::InvalidParameter("satisfiable formula reported unsat".into())),
    }
}

fn check_count_agreement() -> Result<()> {
    let f = TwoSatFormula::new(2, vec![(Literal::new(1, true), Literal::new(2, true))])?;
    let pricing = count_models_via_pricing_detailed(&f, 1.0)?.count;
    let brute = count_models_brute_force(&f)?;
    ensure(pricing == 3 && brute == 3, "(x1 v x2) must have exactly 3 models")
}

fn check_interval_overlap() -> Result<()> {
    let mut tree = IntervalTree::new(10)?;
    tree.purchase(0, 4, 1)?;
    tree.purchase(2, 6, 2)?;
    let stats = tree.max_stats();
    ensure(stats.q_max == 3 && stats.s_qmax == 3, "overlap must give (max 3, count 3)")?;
    ensure(tree.value_at(1)? == 1 && tree.value_at(5)? == 2, "point lookups disagree")
}

fn check_approx_degenerate() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let est = approximate_cost_explicit(&[7, 7, 7, 7], 2.0, 0.05, 0.05, &mut rng)?;
    ensure(est.c_hat == 9.0 && est.iterations == 0, "uniform payouts must solve exactly")
}

fn check_wish_tautology() -> Result<()> {
    let oracle =
        EnumerationOracle::new(4, vec![1.0; 16], Security::Interval { lo: 0, hi: 15 })?;
    let out = wish_price(&oracle, &WishConfig::default(), 1)?;
    ensure(out.price == 1.0 && out.degenerate, "full-cover security must price to 1 exactly")
}
