//! `odds-seq`: guaranteed-accuracy sequential estimation of odds and log
//! odds from Bernoulli observations.
//!
//! Subcommands: `estimate` (run the estimators on a bit file or a seeded
//! PRNG stream), `plan` (minimal target count for a requested accuracy),
//! `bounds` (closed-form bound tables as CSV), `sweep` (Monte Carlo
//! efficiency grids as CSV, deterministic per seed and worker-count
//! invariant), and `verify` (the deterministic oracle suites).
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 runtime sampling error (source exhausted or draw cap hit).

mod fmt;
mod grid;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use fmt::fmt_f64;
use odds_seq::analysis::plan_r;
use odds_seq::montecarlo::{sweep, SweepPoint};
use odds_seq::sampling::{estimate_log_odds, estimate_odds, EstimateError};
use odds_seq::source::{default_cap, ObservationSource, SourceError};
use odds_seq::verify::{
    all_suites, degroot_suite, lemma_suite, series_suite, topsoe_suite, SuiteReport, VerifyConfig,
};
use odds_seq::EstimatorKind;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "odds-seq",
    version,
    about = "Sequential odds / log-odds estimation with guaranteed accuracy"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one estimation against a bit file or a seeded PRNG stream.
    Estimate(EstimateArgs),
    /// Find the minimal target count r for a requested accuracy.
    Plan(PlanArgs),
    /// Emit closed-form bound tables as CSV.
    Bounds(BoundsArgs),
    /// Monte Carlo efficiency sweep as CSV (deterministic per seed).
    Sweep(SweepArgs),
    /// Run the deterministic verification suites.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Odds,
    Logodds,
}

impl KindArg {
    fn to_kind(self) -> EstimatorKind {
        match self {
            KindArg::Odds => EstimatorKind::Odds,
            KindArg::Logodds => EstimatorKind::LogOdds,
        }
    }
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "p"])))]
struct EstimateArgs {
    /// Which parameter to estimate.
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Target count; at least 2.
    #[arg(long)]
    r: u32,
    /// Bit file: '1' = success, '0' = failure, whitespace ignored.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["p", "seed"])]
    input: Option<PathBuf>,
    /// Success probability of the PRNG stream, in (0, 1).
    #[arg(long, requires = "seed")]
    p: Option<f64>,
    /// Seed of the PRNG stream.
    #[arg(long, requires = "p")]
    seed: Option<u64>,
    /// Draw cap (default: ODDS_SEQ_DEFAULT_CAP or 10^9).
    #[arg(long)]
    cap: Option<u64>,
}

fn positive_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be a positive real, got {v}"))
    }
}

#[derive(Args)]
#[command(group(ArgGroup::new("target").required(true).args(["target_var", "target_rmse"])))]
struct PlanArgs {
    /// Which parameter to estimate.
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Target relative variance (odds) or variance (log odds).
    #[arg(long, value_parser = positive_real)]
    target_var: Option<f64>,
    /// Target RMSE (relative for odds); squared into a variance target.
    #[arg(long, value_parser = positive_real)]
    target_rmse: Option<f64>,
    /// Also report the expected sample size at this success probability.
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Which parameter to estimate.
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Target count(s): a single integer or a comma list.
    #[arg(long, value_name = "R[,R...]")]
    r: String,
    /// Probability grid start:step:end, all inside (0, 1).
    #[arg(long, value_name = "START:STEP:END")]
    p_grid: String,
}

#[derive(Args)]
struct SweepArgs {
    /// Which parameter to estimate.
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Target counts to sweep (outer loop of the CSV).
    #[arg(long, value_name = "R[,R...]", default_value = "2,5,10,26")]
    r_list: String,
    /// Probability grid start:step:end (inner loop of the CSV).
    #[arg(long, value_name = "START:STEP:END", default_value = "0.05:0.05:0.95")]
    p_grid: String,
    /// Replications per grid point.
    #[arg(long, default_value_t = 1_000_000)]
    reps: u64,
    /// Master seed; replication i uses the derived child seed i.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads (default: available parallelism). Output is
    /// byte-identical for any value.
    #[arg(long)]
    workers: Option<usize>,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Degroot,
    Lemma,
    Series,
    Topsoe,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which suite to run.
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
    /// Override the swept maximum r (degroot and lemma suites only).
    #[arg(long)]
    r_max: Option<u32>,
    /// Override the swept maximum n (degroot and lemma suites only).
    #[arg(long)]
    n_max: Option<u64>,
}

/// A failure carrying its process exit code.
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn source_failure(e: SourceError) -> Failure {
    let code = match e {
        SourceError::Exhausted { .. } | SourceError::CapExceeded { .. } => 3,
        _ => 2,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn estimate_failure(e: EstimateError) -> Failure {
    match e {
        EstimateError::Source(src) => source_failure(src),
        EstimateError::Precondition(msg) => usage(msg),
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Plan(args) => cmd_plan(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            std::process::exit(f.code);
        }
    }
}

fn cmd_estimate(args: EstimateArgs) -> Result<i32, Failure> {
    if args.r < 2 {
        return Err(usage(format!("--r must be at least 2, got {}", args.r)));
    }
    let kind = args.kind.to_kind();
    let source = match (&args.input, args.p, args.seed) {
        (Some(path), None, None) => ObservationSource::bit_file(path).map_err(source_failure)?,
        (None, Some(p), Some(seed)) => ObservationSource::prng(p, seed).map_err(source_failure)?,
        _ => unreachable!("clap enforces exactly one observation source"),
    };
    let cap = args.cap.unwrap_or_else(default_cap);
    let mut source = source.with_cap(cap).map_err(source_failure)?;

    println!("kind = {kind}");
    println!("r = {}", args.r);
    let bound = kind
        .uniform_bound(args.r)
        .map_err(|e| usage(e.to_string()))?;
    match kind {
        EstimatorKind::Odds => {
            let est = estimate_odds(&mut source, args.r).map_err(estimate_failure)?;
            println!("estimate = {}", fmt_f64(est.value));
            println!("n1 = {}", est.run1.n);
            println!("n2 = {}", est.run2.n);
            println!("n_total = {}", est.n_total);
            println!("guaranteed_rel_var_bound = {}", fmt_f64(bound));
        }
        EstimatorKind::LogOdds => {
            let est = estimate_log_odds(&mut source, args.r).map_err(estimate_failure)?;
            println!("estimate = {}", fmt_f64(est.value));
            println!("n1 = {}", est.run1.n);
            println!("n2 = {}", est.run2.n);
            println!("n_total = {}", est.n_total);
            println!("guaranteed_var_bound = {}", fmt_f64(bound));
        }
    }
    Ok(0)
}

fn cmd_plan(args: PlanArgs) -> Result<i32, Failure> {
    let kind = args.kind.to_kind();
    let (target, from_rmse) = match (args.target_var, args.target_rmse) {
        (Some(v), None) => (v, false),
        (None, Some(rmse)) => (rmse * rmse, true),
        _ => unreachable!("clap enforces exactly one target flag"),
    };
    let plan = plan_r(kind, target).map_err(|e| usage(e.to_string()))?;

    println!("kind = {kind}");
    let target_label = match kind {
        EstimatorKind::Odds => "target_rel_var",
        EstimatorKind::LogOdds => "target_var",
    };
    println!("{target_label} = {}", fmt_f64(target));
    if from_rmse {
        println!("target_rmse = {}", fmt_f64(args.target_rmse.unwrap()));
    }
    println!("r = {}", plan.r);
    println!("guaranteed_bound = {}", fmt_f64(plan.guaranteed_bound));
    println!("guaranteed_rmse = {}", fmt_f64(plan.guaranteed_rmse()));
    if let Some(p) = args.p {
        let expected = plan
            .expected_samples_at(p)
            .map_err(|e| usage(e.to_string()))?;
        println!("expected_samples = {}", fmt_f64(expected));
    }
    Ok(0)
}

const BOUNDS_HEADER: &str =
    "kind,r,p,var_bound,uniform_bound,expected_n,eff_lower_bound,eff_uniform_bound";

fn cmd_bounds(args: BoundsArgs) -> Result<i32, Failure> {
    let kind = args.kind.to_kind();
    let r_list = grid::parse_r_list(&args.r).map_err(usage)?;
    let p_grid = grid::parse_p_grid(&args.p_grid).map_err(usage)?;

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let io_fail = |e: std::io::Error| Failure {
        code: 3,
        message: e.to_string(),
    };
    writeln!(out, "{BOUNDS_HEADER}").map_err(io_fail)?;
    for &r in &r_list {
        for &p in &p_grid {
            let row = (|| -> Result<String, odds_seq::AnalysisError> {
                Ok(format!(
                    "{},{},{},{},{},{},{},{}",
                    kind,
                    r,
                    fmt_f64(p),
                    fmt_f64(kind.pointwise_var_bound(r, p)?),
                    fmt_f64(kind.uniform_bound(r)?),
                    fmt_f64(kind.expected_samples(r, p)?),
                    fmt_f64(kind.efficiency_lower_bound(r, p)?),
                    fmt_f64(kind.efficiency_uniform_lower_bound(r)?),
                ))
            })()
            .map_err(|e| usage(e.to_string()))?;
            writeln!(out, "{row}").map_err(io_fail)?;
        }
    }
    Ok(0)
}

const SWEEP_HEADER: &str = "kind,r,p,reps,mean_estimate,true_value,sample_var,rel_var,\
mean_n,expected_n,efficiency,eff_lower_bound,stderr_efficiency";

/// `rel_var` is the accuracy figure each estimator guarantees: sample
/// variance over the squared true odds for `odds`, the plain sample
/// variance for `logodds` (the log scale already normalizes).
fn sweep_row(pt: &SweepPoint) -> String {
    match &pt.result {
        Ok(ep) => {
            let rel_var = match pt.kind {
                EstimatorKind::Odds => ep.sample_var / (ep.true_value * ep.true_value),
                EstimatorKind::LogOdds => ep.sample_var,
            };
            format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                pt.kind,
                pt.r,
                fmt_f64(pt.p),
                pt.reps,
                fmt_f64(ep.mean_estimate),
                fmt_f64(ep.true_value),
                fmt_f64(ep.sample_var),
                fmt_f64(rel_var),
                fmt_f64(ep.mean_n),
                fmt_f64(ep.expected_n),
                fmt_f64(ep.efficiency),
                fmt_f64(ep.lower_bound),
                fmt_f64(ep.stderr_efficiency),
            )
        }
        Err(_) => format!(
            "{},{},{},{},nan,nan,nan,nan,nan,nan,nan,nan,nan",
            pt.kind,
            pt.r,
            fmt_f64(pt.p),
            pt.reps,
        ),
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<i32, Failure> {
    let kind = args.kind.to_kind();
    let r_list = grid::parse_r_list(&args.r_list).map_err(usage)?;
    let p_grid = grid::parse_p_grid(&args.p_grid).map_err(usage)?;
    if args.reps < 2 {
        return Err(usage(format!(
            "--reps must be at least 2, got {}",
            args.reps
        )));
    }
    let workers = match args.workers {
        Some(0) => return Err(usage("--workers must be at least 1")),
        Some(w) => w,
        None => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
    };

    let points = sweep(kind, &p_grid, &r_list, args.reps, args.seed, workers);

    let mut csv = String::with_capacity(points.len() * 160 + 160);
    csv.push_str(SWEEP_HEADER);
    csv.push('\n');
    for pt in &points {
        csv.push_str(&sweep_row(pt));
        csv.push('\n');
    }
    match &args.out {
        Some(path) => std::fs::write(path, &csv).map_err(|e| Failure {
            code: 3,
            message: format!("writing {}: {e}", path.display()),
        })?,
        None => print!("{csv}"),
    }

    let failures: Vec<&SweepPoint> = points.iter().filter(|pt| pt.result.is_err()).collect();
    if failures.is_empty() {
        Ok(0)
    } else {
        for pt in &failures {
            eprintln!(
                "point kind={} r={} p={} failed: {}",
                pt.kind,
                pt.r,
                fmt_f64(pt.p),
                pt.result.as_ref().unwrap_err()
            );
        }
        Err(Failure {
            code: 3,
            message: format!(
                "{} of {} sweep points aborted",
                failures.len(),
                points.len()
            ),
        })
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<i32, Failure> {
    if (args.r_max.is_some() || args.n_max.is_some())
        && !matches!(args.suite, SuiteArg::Degroot | SuiteArg::Lemma)
    {
        return Err(usage(
            "--r-max/--n-max only apply to the degroot and lemma suites",
        ));
    }
    let mut cfg = VerifyConfig::default();
    match args.suite {
        SuiteArg::Degroot => {
            cfg.degroot_max_r = args.r_max.unwrap_or(cfg.degroot_max_r);
            cfg.degroot_max_n = args.n_max.unwrap_or(cfg.degroot_max_n);
        }
        SuiteArg::Lemma => {
            cfg.lemma_max_r = args.r_max.unwrap_or(cfg.lemma_max_r);
            cfg.lemma_max_n = args.n_max.unwrap_or(cfg.lemma_max_n);
        }
        _ => {}
    }

    let reports: Vec<SuiteReport> = match args.suite {
        SuiteArg::Degroot => vec![degroot_suite(&cfg)],
        SuiteArg::Lemma => vec![lemma_suite(&cfg)],
        SuiteArg::Series => vec![series_suite(&cfg)],
        SuiteArg::Topsoe => vec![topsoe_suite(&cfg)],
        SuiteArg::All => all_suites(&cfg),
    };

    let mut checks = 0usize;
    let mut failures = 0usize;
    for report in &reports {
        for check in &report.checks {
            checks += 1;
            if check.passed {
                println!("[PASS] {}: {}", check.name, check.detail);
            } else {
                failures += 1;
                println!("[FAIL] {}: {}", check.name, check.detail);
            }
        }
    }
    println!(
        "verify: {} suites, {checks} checks, {failures} failures",
        reports.len()
    );
    Ok(if failures == 0 { 0 } else { 1 })
}
