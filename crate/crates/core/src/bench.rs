//! Repeated seeded searches with best-so-far statistics at checkpoints.
//!
//! Every run records each improvement of its best score. At a checkpoint
//! the run contributes the best score it had reached by then, and the report
//! gives the mean and a 95% half-width `2 s / sqrt(n)` over runs, `s` being
//! the sample standard deviation (n - 1 denominator).

use std::fmt;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::policy::Policy;
use crate::problem::Problem;
use crate::samegame::{
    Board, ColorBase, SameGame, SameGameConfig, SelectiveRule, DEFAULT_ZOBRIST_SEED,
};
use crate::search::{AdaptMode, Budget, Improvement, Search, SearchParams};
use crate::tsptw::{BiasSign, Tsptw, TsptwInstance};

/// Checkpoints in seconds: 40.96 doubled four times.
pub const DEFAULT_CHECKPOINTS: [f64; 5] = [40.96, 81.92, 163.84, 327.68, 655.36];

pub const CSV_HEADER: [&str; 4] = ["time_s", "mean", "ci95", "n"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Tsptw,
    SameGame,
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsptw" => Ok(Self::Tsptw),
            "samegame" => Ok(Self::SameGame),
            _ => Err(Error::Config(format!("unknown problem {s:?}"))),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Tsptw => "tsptw",
            Self::SameGame => "samegame",
        })
    }
}

/// Algorithm variant: plain NRPA, biased GNRPA, or biased GNRPA with the
/// in-place adapt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Nrpa,
    GnrpaBeta,
    GnrpaBetaOpt,
}

impl Variant {
    pub fn biased(self) -> bool {
        !matches!(self, Self::Nrpa)
    }

    pub fn adapt_mode(self) -> AdaptMode {
        match self {
            Self::GnrpaBetaOpt => AdaptMode::InPlace,
            _ => AdaptMode::Copy,
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nrpa" => Ok(Self::Nrpa),
            "gnrpa-beta" => Ok(Self::GnrpaBeta),
            "gnrpa-beta-opt" => Ok(Self::GnrpaBetaOpt),
            _ => Err(Error::Config(format!("unknown variant {s:?}"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Nrpa => "nrpa",
            Self::GnrpaBeta => "gnrpa-beta",
            Self::GnrpaBetaOpt => "gnrpa-beta-opt",
        })
    }
}

/// Which instance to load and how to configure its domain.
#[derive(Debug, Clone)]
pub struct ProblemSetup {
    pub kind: ProblemKind,
    /// Instance file. A SameGame run without one uses a random 15x15,
    /// 5-color board drawn from `board_seed`.
    pub instance: Option<PathBuf>,
    pub variant: Variant,
    pub bias_sign: BiasSign,
    pub zobrist_seed: u64,
    pub inclusive_tabu: bool,
    pub color_base: ColorBase,
    pub board_seed: u64,
}

impl ProblemSetup {
    pub fn new(kind: ProblemKind, instance: Option<PathBuf>, variant: Variant) -> Self {
        Self {
            kind,
            instance,
            variant,
            bias_sign: BiasSign::default(),
            zobrist_seed: DEFAULT_ZOBRIST_SEED,
            inclusive_tabu: false,
            color_base: ColorBase::default(),
            board_seed: 0,
        }
    }

    fn read_instance(&self) -> Result<Option<String>> {
        self.instance
            .as_ref()
            .map(std::fs::read_to_string)
            .transpose()
            .map_err(Error::from)
    }

    pub fn tsptw(&self) -> Result<Tsptw> {
        let text = self
            .read_instance()?
            .ok_or_else(|| Error::Config("a TSPTW instance file is required".into()))?;
        let instance = TsptwInstance::parse(&text)?;
        let bias = self.variant.biased().then_some(self.bias_sign);
        Ok(Tsptw::with_bias(instance, bias))
    }

    pub fn samegame(&self) -> Result<SameGame> {
        let board = match self.read_instance()? {
            Some(text) => Board::parse_with(&text, self.color_base)?,
            None => Board::random(15, 15, 5, &mut ChaCha8Rng::seed_from_u64(self.board_seed)),
        };
        let config = SameGameConfig {
            selective: true,
            rule: SelectiveRule {
                inclusive: self.inclusive_tabu,
            },
            bias: self.variant.biased(),
            zobrist_seed: self.zobrist_seed,
        };
        Ok(SameGame::new(board, config))
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub setup: ProblemSetup,
    /// Base parameters; `seed` is the first run's seed and the variant
    /// decides the adapt mode.
    pub params: SearchParams,
    pub runs: usize,
    /// Seconds under a time budget, playouts under a playout budget. When
    /// absent: the default schedule for time budgets, and the budget halved
    /// four times for playout budgets.
    pub checkpoints: Option<Vec<f64>>,
    /// Worker threads; 0 means one per available core.
    pub jobs: usize,
    pub output: Option<PathBuf>,
}

impl BenchConfig {
    pub fn new(setup: ProblemSetup) -> Self {
        Self {
            setup,
            params: SearchParams::default(),
            runs: 200,
            checkpoints: None,
            jobs: 0,
            output: None,
        }
    }
}

/// What checkpoint positions are measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckpointUnit {
    Seconds,
    Playouts,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointStats {
    /// Seconds or playouts, see [`BenchmarkReport::unit`].
    pub time: f64,
    pub mean: f64,
    /// Half-width of the 95% interval, `2 s / sqrt(n)`; 0 when `n < 2`.
    pub ci95: f64,
    /// Runs with at least one playout by this checkpoint.
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub seed: u64,
    pub best_score: f64,
    pub playouts: u64,
    pub elapsed_secs: f64,
    pub trace: Vec<Improvement>,
}

impl RunSummary {
    pub fn playouts_per_sec(&self) -> f64 {
        self.playouts as f64 / self.elapsed_secs
    }

    /// Best score reached at or before `at`.
    pub fn best_at(&self, at: f64, unit: CheckpointUnit) -> Option<f64> {
        self.trace
            .iter()
            .take_while(|imp| match unit {
                CheckpointUnit::Seconds => imp.elapsed_secs <= at,
                CheckpointUnit::Playouts => imp.playouts as f64 <= at,
            })
            .last()
            .map(|imp| imp.score)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub unit: CheckpointUnit,
    pub rows: Vec<CheckpointStats>,
    pub runs: Vec<RunSummary>,
}

impl BenchmarkReport {
    /// True when some checkpoint has fewer than two runs, so its interval is
    /// reported as 0.
    pub fn degenerate(&self) -> bool {
        self.rows.iter().any(|r| r.n < 2)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(&self.rows, out)
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

/// Writes `time_s,mean,ci95,n` rows, scores with two decimals.
pub fn write_rows<W: Write>(rows: &[CheckpointStats], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.time.to_string(),
            format!("{:.2}", r.mean),
            format!("{:.2}", r.ci95),
            r.n.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_rows`].
pub fn read_rows<R: Read>(input: R) -> Result<Vec<CheckpointStats>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::parse(1, format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let field = |k: usize| -> Result<&str> {
            record
                .get(k)
                .ok_or_else(|| Error::parse(line, format!("missing column {}", CSV_HEADER[k])))
        };
        let num = |k: usize| -> Result<f64> {
            field(k)?
                .parse()
                .map_err(|_| Error::parse(line, format!("bad {}", CSV_HEADER[k])))
        };
        rows.push(CheckpointStats {
            time: num(0)?,
            mean: num(1)?,
            ci95: num(2)?,
            n: field(3)?.parse().map_err(|_| Error::parse(line, "bad n"))?,
        });
    }
    Ok(rows)
}

/// Mean and `2 s / sqrt(n)` with the sample standard deviation; the
/// interval is 0 for a single value.
pub fn mean_ci95(values: &[f64]) -> Option<(f64, f64)> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Some((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Some((mean, 2.0 * var.sqrt() / (n as f64).sqrt()))
}

/// Aggregates run summaries at each checkpoint.
pub fn aggregate(
    runs: &[RunSummary],
    checkpoints: &[f64],
    unit: CheckpointUnit,
) -> Vec<CheckpointStats> {
    checkpoints
        .iter()
        .map(|&t| {
            let values: Vec<f64> = runs.iter().filter_map(|r| r.best_at(t, unit)).collect();
            let (mean, ci95) = mean_ci95(&values).unwrap_or((f64::NAN, 0.0));
            CheckpointStats {
                time: t,
                mean,
                ci95,
                n: values.len(),
            }
        })
        .collect()
}

fn validate_checkpoints(checkpoints: &[f64]) -> Result<()> {
    if checkpoints.is_empty() {
        return Err(Error::Config("at least one checkpoint is required".into()));
    }
    if checkpoints.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
        return Err(Error::Config("checkpoints must be positive".into()));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(
            "checkpoints must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Runs `runs` independent searches on `problem` with seeds
/// `params.seed + i` and aggregates them at `checkpoints`.
///
/// The budget must be bounded; checkpoints are in its unit.
pub fn run_searches<P>(
    problem: &P,
    params: &SearchParams,
    runs: usize,
    checkpoints: &[f64],
    jobs: usize,
) -> Result<BenchmarkReport>
where
    P: Problem + Sync,
{
    if runs == 0 {
        return Err(Error::Config("runs must be at least 1".into()));
    }
    validate_checkpoints(checkpoints)?;
    params.validate()?;
    let unit = match params.budget {
        Budget::Seconds(_) => CheckpointUnit::Seconds,
        Budget::Playouts(_) => CheckpointUnit::Playouts,
        Budget::Unlimited => {
            return Err(Error::Config(
                "benchmarks need a time or playout budget".into(),
            ))
        }
    };
    let one_run = |i: usize| -> Result<RunSummary> {
        let seed = params.seed.wrapping_add(i as u64);
        let run_params = SearchParams {
            seed,
            ..params.clone()
        };
        let mut search = Search::seeded(problem, run_params)?;
        let best = search.run(&Policy::new())?;
        log::debug!("run {i} (seed {seed}): best {}", best.score());
        Ok(RunSummary {
            seed,
            best_score: best.score(),
            playouts: search.stats().playouts,
            elapsed_secs: search.elapsed_secs(),
            trace: search.trace().to_vec(),
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let summaries: Vec<RunSummary> = pool.install(|| {
        (0..runs)
            .into_par_iter()
            .map(one_run)
            .collect::<Result<_>>()
    })?;
    if summaries.iter().all(|s| s.trace.is_empty()) {
        return Err(Error::NoCompletedRuns);
    }
    Ok(BenchmarkReport {
        unit,
        rows: aggregate(&summaries, checkpoints, unit),
        runs: summaries,
    })
}

/// Loads the instance, runs the benchmark and writes the CSV if an output
/// path is configured.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchmarkReport> {
    let mut params = SearchParams {
        adapt: config.setup.variant.adapt_mode(),
        ..config.params.clone()
    };
    let checkpoints = match (params.budget, &config.checkpoints) {
        (_, Some(c)) => c.clone(),
        (Budget::Playouts(n), None) => (0..5).map(|k| (n >> (4 - k)).max(1) as f64).collect(),
        _ => DEFAULT_CHECKPOINTS.to_vec(),
    };
    validate_checkpoints(&checkpoints)?;
    if params.budget == Budget::Unlimited {
        params.budget = Budget::Seconds(*checkpoints.last().expect("validated"));
    }
    let report = match config.setup.kind {
        ProblemKind::Tsptw => run_searches(
            &config.setup.tsptw()?,
            &params,
            config.runs,
            &checkpoints,
            config.jobs,
        )?,
        ProblemKind::SameGame => run_searches(
            &config.setup.samegame()?,
            &params,
            config.runs,
            &checkpoints,
            config.jobs,
        )?,
    };
    if let Some(path) = &config.output {
        report.write_csv(std::fs::File::create(path)?)?;
    }
    Ok(report)
}
