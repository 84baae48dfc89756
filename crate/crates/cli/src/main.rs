use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use gnrpa::bench::{
    run_benchmark, BenchConfig, CheckpointUnit, ProblemKind, ProblemSetup, Variant,
};
use gnrpa::samegame::{ColorBase, DEFAULT_ZOBRIST_SEED};
use gnrpa::tsptw::BiasSign;
use gnrpa::{Budget, Policy, Problem, Search, SearchParams};

#[derive(Parser)]
#[command(
    name = "gnrpa",
    version,
    about = "Nested rollout policy adaptation with temperature and bias"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one search and print the best score and its moves.
    Solve(Common),
    /// Repeat searches over seeds and write mean scores at checkpoints as CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Tsptw,
    Samegame,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Nrpa,
    GnrpaBeta,
    GnrpaBetaOpt,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    /// Near cities favored.
    Negated,
    /// Far cities favored.
    Literal,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum)]
    problem: ProblemArg,
    /// Instance file. Required for tsptw; samegame falls back to a random
    /// 15x15 board drawn from --board-seed.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "gnrpa-beta")]
    variant: VariantArg,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, default_value_t = 3)]
    levels: usize,
    #[arg(long, default_value_t = 100)]
    iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, conflicts_with = "budget_playouts")]
    budget_seconds: Option<f64>,
    #[arg(long)]
    budget_playouts: Option<u64>,
    #[arg(long, value_enum, default_value = "negated")]
    bias_sign: SignArg,
    #[arg(long, default_value_t = DEFAULT_ZOBRIST_SEED)]
    zobrist_seed: u64,
    /// Release size-2 groups of the dominant color from move 10 on.
    #[arg(long)]
    inclusive_tabu: bool,
    /// Board file colors start at 0 instead of 1.
    #[arg(long)]
    zero_based_colors: bool,
    #[arg(long, default_value_t = 0)]
    board_seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 200)]
    runs: usize,
    /// Output file; the CSV goes to stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Comma-separated checkpoints, in seconds or in playouts under
    /// --budget-playouts.
    #[arg(long, value_delimiter = ',')]
    checkpoints: Option<Vec<f64>>,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

impl Common {
    fn setup(&self) -> ProblemSetup {
        let kind = match self.problem {
            ProblemArg::Tsptw => ProblemKind::Tsptw,
            ProblemArg::Samegame => ProblemKind::SameGame,
        };
        let variant = match self.variant {
            VariantArg::Nrpa => Variant::Nrpa,
            VariantArg::GnrpaBeta => Variant::GnrpaBeta,
            VariantArg::GnrpaBetaOpt => Variant::GnrpaBetaOpt,
        };
        let mut setup = ProblemSetup::new(kind, self.instance.clone(), variant);
        setup.bias_sign = match self.bias_sign {
            SignArg::Negated => BiasSign::Negated,
            SignArg::Literal => BiasSign::Literal,
        };
        setup.zobrist_seed = self.zobrist_seed;
        setup.inclusive_tabu = self.inclusive_tabu;
        setup.board_seed = self.board_seed;
        if self.zero_based_colors {
            setup.color_base = ColorBase::ZeroBased;
        }
        setup
    }

    fn params(&self) -> SearchParams {
        let budget = match (self.budget_seconds, self.budget_playouts) {
            (Some(s), _) => Budget::Seconds(s),
            (_, Some(n)) => Budget::Playouts(n),
            _ => Budget::Unlimited,
        };
        let variant = self.setup().variant;
        SearchParams {
            alpha: self.alpha,
            tau: self.tau,
            iterations: self.iterations,
            levels: self.levels,
            budget,
            seed: self.seed,
            adapt: variant.adapt_mode(),
        }
    }

    fn check(&self) {
        if matches!(self.problem, ProblemArg::Tsptw) && self.instance.is_none() {
            Cli::command()
                .error(
                    clap::error::ErrorKind::MissingRequiredArgument,
                    "--instance is required for --problem tsptw",
                )
                .exit();
        }
    }
}

fn solve_with<P: Problem>(
    problem: &P,
    params: SearchParams,
    show: impl Fn(&P::Move) -> String,
) -> Result<()> {
    let started = Instant::now();
    let mut search = Search::seeded(problem, params)?;
    let best = search.run(&Policy::new())?;
    let stats = search.stats();
    let secs = started.elapsed().as_secs_f64();
    let mut out = std::io::stdout().lock();
    writeln!(out, "score {}", best.score())?;
    let moves: Vec<String> = best.moves().iter().map(show).collect();
    writeln!(out, "moves {}", moves.join(" "))?;
    eprintln!(
        "{} playouts in {secs:.2} s ({:.0}/s)",
        stats.playouts,
        stats.playouts as f64 / secs.max(1e-9)
    );
    Ok(())
}

fn loading(setup: &ProblemSetup) -> String {
    match &setup.instance {
        Some(path) => format!("loading {}", path.display()),
        None => "building the random board".into(),
    }
}

fn solve(args: &Common) -> Result<()> {
    args.check();
    let setup = args.setup();
    let params = args.params();
    match setup.kind {
        ProblemKind::Tsptw => {
            let problem = setup.tsptw().with_context(|| loading(&setup))?;
            let ids: Vec<i64> = problem.instance().nodes().iter().map(|n| n.id).collect();
            solve_with(&problem, params, |&i| ids[i].to_string())
        }
        ProblemKind::SameGame => {
            let problem = setup.samegame().with_context(|| loading(&setup))?;
            solve_with(&problem, params, |&(r, c)| format!("{r},{c}"))
        }
    }
}

fn bench(args: &BenchArgs) -> Result<()> {
    args.common.check();
    let mut config = BenchConfig::new(args.common.setup());
    config.params = args.common.params();
    config.runs = args.runs;
    config.checkpoints = args.checkpoints.clone();
    config.jobs = args.jobs;
    config.output = args.csv.clone();
    let report = run_benchmark(&config)?;
    if report.degenerate() {
        log::warn!("some checkpoints have fewer than two runs; their ci95 is 0");
    }
    if args.csv.is_none() {
        report.write_csv(std::io::stdout().lock())?;
    }
    let rate = report
        .runs
        .iter()
        .map(|r| r.playouts_per_sec())
        .sum::<f64>()
        / report.runs.len() as f64;
    let unit = match report.unit {
        CheckpointUnit::Seconds => "seconds",
        CheckpointUnit::Playouts => "playouts",
    };
    eprintln!(
        "{} runs, checkpoints in {unit}, {rate:.0} playouts/s per run",
        report.runs.len()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => solve(args),
        Command::Bench(args) => bench(args).context("benchmark failed"),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
