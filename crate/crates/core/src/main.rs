use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use edpaths::harness::emit::{self, fmt_f64, sibling, write_csv, write_gnuplot, write_json};
use edpaths::harness::{
    emit_condexp, emit_flows, emit_paths, run_conditional_expectation, run_flow_experiment,
    run_paths_experiment, AggregateRow, ExperimentConfig, KGrid, OutputFormat,
};
use edpaths::order_stats::{
    concentration_report, default_rank_cutoff, mean_order_stat, sample_order_stats_with, OrderStatContext,
};
use edpaths::spt::{radius_by_growth, radius_by_law_with, radius_mean};
use edpaths::tail_bounds::{
    binomial_lower_tail, exp_sum_tails, irwin_hall_tail, min_binomial_lower_bounds, validate_binomial_lower_tail,
    validate_exp_sum, validate_irwin_hall, validate_min_binomial,
};
use edpaths::walecki::{saturating_family, walecki_decompose};
use edpaths::weights::trial_seed;
use edpaths::{Error, StorageMode, WeightModel};

#[derive(Parser)]
#[command(name = "edpaths", version, about = "Successive edge-disjoint shortest paths on random complete graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Successive shortest paths X_k against their limit values.
    Paths(ExperimentArgs),
    /// Min-cost k-flows F_k against the summed limit values.
    Flow(ExperimentArgs),
    /// Conditional mean of X_k given that P_k exists.
    Condexp(ExperimentArgs),
    /// Order-statistic means and concentration.
    Orderstats(OrderStatsArgs),
    /// Shortest-path-tree radius samples.
    Spt(SptArgs),
    /// Walecki decomposition and saturating s-t family, as JSON.
    Walecki(WaleckiArgs),
    /// Evaluate a tail bound, optionally against simulation.
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Uniform,
    Exponential,
}

impl From<ModelArg> for WeightModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Uniform => WeightModel::Uniform01,
            ModelArg::Exponential => WeightModel::Exponential1,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Vertex count.
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "uniform")]
    model: ModelArg,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Master seed; trial i uses seed XOR splitmix64(i).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Largest k (defaults to n - 1).
    #[arg(long)]
    k_max: Option<usize>,
    /// "geometric" (default), "all", or a comma-separated list.
    #[arg(long, default_value = "geometric")]
    k_grid: String,
    /// Recompute weights on demand instead of materializing them.
    #[arg(long)]
    implicit: bool,
    /// Also write `<out stem>.ratio.dat` with `k ratio_mean` columns.
    #[arg(long)]
    gnuplot: bool,
}

#[derive(Args)]
struct OrderStatsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    /// Lowest rank in the concentration check (default ceil(sqrt(ln n))).
    #[arg(long)]
    a: Option<usize>,
    /// Ranks to summarize; defaults to the geometric grid.
    #[arg(long, default_value = "geometric")]
    k_grid: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum SptMethod {
    Law,
    Growth,
    Both,
}

#[derive(Args)]
struct SptArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Tree order.
    #[arg(long)]
    d: usize,
    #[arg(long, value_enum, default_value = "both")]
    method: SptMethod,
}

#[derive(Args)]
struct WaleckiArgs {
    /// Vertex count of K_n (even); the family uses r = (n - 2) / 2.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    s: usize,
    #[arg(long, default_value_t = 1)]
    t: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundName {
    IrwinHall,
    ExpSum,
    BinomialLower,
    MinBinomial,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(value_enum)]
    bound: BoundName,
    /// Irwin-Hall term count.
    #[arg(long)]
    l: Option<u64>,
    /// Irwin-Hall threshold.
    #[arg(long)]
    a: Option<f64>,
    /// Comma-separated exponential rates.
    #[arg(long)]
    rates: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    n_trials: Option<u64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Compare against Monte Carlo.
    #[arg(long)]
    validate: bool,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("edpaths: {e}");
            if e.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Paths(args) => cmd_paths(args),
        Command::Flow(args) => cmd_flow(args),
        Command::Condexp(args) => cmd_condexp(args),
        Command::Orderstats(args) => cmd_orderstats(args),
        Command::Spt(args) => cmd_spt(args),
        Command::Walecki(args) => cmd_walecki(args),
        Command::Bounds(args) => cmd_bounds(args),
    }
}

fn experiment_config(args: &ExperimentArgs) -> Result<ExperimentConfig, Error> {
    let c = &args.common;
    if c.n < 2 {
        return Err(Error::InvalidParameter(format!("--n must be at least 2, got {}", c.n)));
    }
    let mut cfg = ExperimentConfig::new(c.n, args.k_max.unwrap_or(c.n - 1), c.model.into(), c.trials, c.seed)
        .with_grid(args.k_grid.parse()?)
        .with_workers(c.workers);
    if args.implicit {
        cfg.storage = StorageMode::ImplicitPrf;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_aggregates(aggregates: &[AggregateRow]) -> Result<(), Error> {
    write_csv(aggregates, io::stdout().lock())
}

fn gnuplot(args: &ExperimentArgs, aggregates: &[AggregateRow]) -> Result<(), Error> {
    if !args.gnuplot {
        return Ok(());
    }
    let path = match &args.common.out {
        Some(out) => sibling(out, "ratio.dat"),
        None => PathBuf::from("ratio.dat"),
    };
    write_gnuplot(aggregates, &path)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn report_written(paths: &[PathBuf]) {
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
}

fn cmd_paths(args: ExperimentArgs) -> Result<(), Error> {
    let cfg = experiment_config(&args)?;
    let batch = run_paths_experiment(&cfg)?;
    match &args.common.out {
        Some(out) => report_written(&emit_paths(&batch, args.common.format.into(), out)?),
        None => print_aggregates(&batch.aggregates)?,
    }
    gnuplot(&args, &batch.aggregates)
}

fn cmd_flow(args: ExperimentArgs) -> Result<(), Error> {
    let cfg = experiment_config(&args)?;
    let batch = run_flow_experiment(&cfg)?;
    match &args.common.out {
        Some(out) => report_written(&emit_flows(&batch, args.common.format.into(), out)?),
        None => print_aggregates(&batch.aggregates)?,
    }
    gnuplot(&args, &batch.aggregates)
}

fn cmd_condexp(args: ExperimentArgs) -> Result<(), Error> {
    let cfg = experiment_config(&args)?;
    let rows = run_conditional_expectation(&cfg)?;
    match &args.common.out {
        Some(out) => report_written(&emit_condexp(&rows, args.common.format.into(), out)?),
        None => write_csv(&rows, io::stdout().lock())?,
    }
    Ok(())
}

fn cmd_orderstats(args: OrderStatsArgs) -> Result<(), Error> {
    let c = &args.common;
    let ctx = OrderStatContext::new(c.n, c.model.into())?;
    if c.trials == 0 {
        return Err(Error::InvalidParameter("--trials must be at least 1".into()));
    }
    let samples: Vec<Vec<f64>> = (0..c.trials)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(c.seed, i as u64));
            sample_order_stats_with(&ctx, &mut rng)
        })
        .collect();
    let a = args.a.unwrap_or_else(|| default_rank_cutoff(c.n));
    let report = concentration_report(&ctx, &samples, args.epsilon, a)?;
    let grid: KGrid = args.k_grid.parse()?;
    let ranks = grid
        .resolve(c.n, c.n - 1)?
        .into_iter()
        .map(|k| {
            let exact = mean_order_stat(&ctx, k)?;
            let col: Vec<f64> = samples.iter().map(|v| v[k - 1]).collect();
            let empirical = edpaths::stats::mean(&col).unwrap_or(f64::NAN);
            Ok(json!({ "k": k, "exact_mean": exact, "sample_mean": empirical, "ratio": empirical / exact }))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let doc = json!({
        "n": c.n,
        "model": WeightModel::from(c.model).to_string(),
        "vectors": c.trials,
        "ranks": ranks,
        "concentration": { "epsilon": report.epsilon, "a": report.rank_cutoff, "simultaneous_violation": report.simultaneous },
    });
    match &c.out {
        Some(out) => {
            emit::write_file(out, |w| write_json(&doc, w))?;
            report_written(std::slice::from_ref(out));
        }
        None => write_json(&doc, io::stdout().lock())?,
    }
    Ok(())
}

fn cmd_spt(args: SptArgs) -> Result<(), Error> {
    let c = &args.common;
    let (n, d) = (c.n, args.d);
    let mean = radius_mean(n, d)?;
    let model: WeightModel = c.model.into();
    let mut rows: Vec<(&str, usize, f64)> = Vec::new();
    if matches!(args.method, SptMethod::Law | SptMethod::Both) {
        let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
        for i in 0..c.trials {
            rows.push(("law", i, radius_by_law_with(n, d, &mut rng)?.radius));
        }
    }
    if matches!(args.method, SptMethod::Growth | SptMethod::Both) {
        for i in 0..c.trials {
            rows.push(("growth", i, radius_by_growth(model, n, d, trial_seed(c.seed, i as u64))?.radius));
        }
    }
    let write = |w: &mut dyn Write| -> Result<(), Error> {
        writeln!(w, "method,sample,radius")?;
        for (m, i, r) in &rows {
            writeln!(w, "{m},{i},{}", fmt_f64(*r))?;
        }
        Ok(())
    };
    match &c.out {
        Some(out) => {
            emit::write_file(out, |w| write(w))?;
            report_written(std::slice::from_ref(out));
        }
        None => write(&mut io::stdout().lock())?,
    }
    eprintln!("exact mean radius {}", fmt_f64(mean));
    Ok(())
}

fn cmd_walecki(args: WaleckiArgs) -> Result<(), Error> {
    let family = saturating_family(args.n, args.s, args.t)?;
    let decomposition = walecki_decompose((args.n - 2) / 2)?;
    let doc = json!({
        "decomposition": decomposition,
        "family": family,
        "residual_separates": family.residual_separates(),
    });
    write_json(&doc, io::stdout().lock())
}

fn need<T>(value: Option<T>, flag: &str) -> Result<T, Error> {
    value.ok_or_else(|| Error::InvalidParameter(format!("missing --{flag}")))
}

fn cmd_bounds(args: BoundsArgs) -> Result<(), Error> {
    let (mut doc, report) = match args.bound {
        BoundName::IrwinHall => {
            let (l, a) = (need(args.l, "l")?, need(args.a, "a")?);
            let bound = irwin_hall_tail(l, a)?;
            let mc = args.validate.then(|| validate_irwin_hall(l, a, args.samples, args.seed)).transpose()?;
            (json!({ "bound": "irwin-hall", "l": l, "a": a, "value": bound }), mc)
        }
        BoundName::ExpSum => {
            let rates = need(args.rates.as_deref(), "rates")?
                .split(',')
                .map(|r| r.trim().parse::<f64>().map_err(|_| Error::InvalidParameter(format!("bad rate '{r}'"))))
                .collect::<Result<Vec<_>, _>>()?;
            let lambda = need(args.lambda, "lambda")?;
            let tails = exp_sum_tails(&rates, lambda)?;
            let mc = args.validate.then(|| validate_exp_sum(&rates, lambda, args.samples, args.seed)).transpose()?;
            (json!({ "bound": "exp-sum", "lambda": lambda, "value": tails }), mc)
        }
        BoundName::BinomialLower => {
            let (n, p, eps) = (need(args.n_trials, "n-trials")?, need(args.p, "p")?, need(args.epsilon, "epsilon")?);
            let bound = binomial_lower_tail(n, p, eps)?;
            let mc = args
                .validate
                .then(|| validate_binomial_lower_tail(n, p, eps, args.samples, args.seed))
                .transpose()?;
            (json!({ "bound": "binomial-lower", "n_trials": n, "p": p, "epsilon": eps, "value": bound }), mc)
        }
        BoundName::MinBinomial => {
            let (n, p) = (need(args.n_trials, "n-trials")?, need(args.p, "p")?);
            let (case, bound) = min_binomial_lower_bounds(n, p)?;
            let mc = args.validate.then(|| validate_min_binomial(n, p, args.samples, args.seed)).transpose()?;
            (json!({ "bound": "min-binomial", "n_trials": n, "p": p, "case": case, "value": bound }), mc)
        }
    };
    if let Some(r) = report {
        doc["validation"] = json!(r);
        doc["holds"] = json!(r.holds(3.0));
    }
    write_json(&doc, io::stdout().lock())
}
