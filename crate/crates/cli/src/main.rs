//! `mcbench`: price options, benchmark execution strategies, analyse the
//! bundled device measurements and plan heterogeneous workloads.

mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mcbench::bundled;
use mcbench::devicelab::{plan_workload, report, FlopSource, LocalExecutor, MeasurementTable, Objective, WorkloadSpec};
use mcbench::engine::{run, ExecutionStrategy, RunResult};
use mcbench::metrics::{integrate_power, parse_power_trace, OpCostTable};
use mcbench::task::{OptionTask, TaskSet, PAPER_SCALE_PATHS, PAPER_SCALE_STEPS};
use mcbench::{Error, Result};

use render::Format;

/// Seed used when `--seed` is not given.
const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(
    name = "mcbench",
    version,
    about = "Monte Carlo option pricing engine and device planner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Price one task and report price, standard error, latency and FLOPs.
    Price(PriceArgs),
    /// Run tasks under several execution strategies and emit one row per run.
    Bench(BenchArgs),
    /// Summarise the measurement tables per platform.
    Analyze(AnalyzeArgs),
    /// Plan a workload across the measured devices.
    Partition(PartitionArgs),
}

#[derive(Args, Debug)]
struct TaskSource {
    /// Task definitions file; the bundled tasks are used otherwise.
    #[arg(long)]
    task_file: Option<PathBuf>,
    /// Operation cost table used for FLOP counts.
    #[arg(long)]
    costs: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Scale {
    /// Override the task's path count.
    #[arg(long, conflicts_with = "paper_scale")]
    paths: Option<u64>,
    /// Override the task's step count.
    #[arg(long, conflicts_with = "paper_scale")]
    steps: Option<u32>,
    /// Run at 10^7 paths x 4096 steps.
    #[arg(long)]
    paper_scale: bool,
}

impl Scale {
    fn apply(&self, task: OptionTask) -> OptionTask {
        if self.paper_scale {
            return task.with_paths(PAPER_SCALE_PATHS).with_steps(PAPER_SCALE_STEPS);
        }
        let task = match self.paths {
            Some(p) => task.with_paths(p),
            None => task,
        };
        match self.steps {
            Some(s) => task.with_steps(s),
            None => task,
        }
    }
}

#[derive(Args, Debug)]
struct PriceArgs {
    /// Task designation.
    #[arg(long)]
    task: String,
    #[command(flatten)]
    source: TaskSource,
    #[command(flatten)]
    scale: Scale,
    /// baseline | tp:P | pp:U | combined:P,U
    #[arg(long, default_value = "baseline")]
    strategy: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Power samples (`seconds,watts` per line) recorded during the run.
    #[arg(long)]
    power_trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Comma-separated task designations.
    #[arg(long, value_delimiter = ',', default_values_t = bundled::BENCHMARK_TASKS.map(String::from))]
    tasks: Vec<String>,
    /// Space-separated strategies, e.g. `baseline tp:4 combined:4,2`.
    #[arg(long, num_args = 1.., default_values_t = ["baseline", "tp:4", "pp:4"].map(String::from))]
    strategies: Vec<String>,
    #[arg(long, default_value_t = 1)]
    repetitions: u32,
    #[command(flatten)]
    source: TaskSource,
    #[command(flatten)]
    scale: Scale,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Flops {
    /// Published per-task complexity column.
    Published,
    /// Static cost model over the task definitions.
    Model,
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Directory holding platforms.csv, tasks.csv, latency.csv, energy.csv
    /// and optionally resources.csv; the bundled tables are used otherwise.
    #[arg(long)]
    data_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Flops::Published)]
    flops: Flops,
    /// Path points per simulation for `--flops model`.
    #[arg(long, default_value_t = PAPER_SCALE_STEPS)]
    model_steps: u32,
    #[command(flatten)]
    source: TaskSource,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct PartitionArgs {
    /// Workload description (TOML).
    #[arg(long)]
    workload: PathBuf,
    /// Override the workload's objective.
    #[arg(long)]
    objective: Option<String>,
    /// Override the workload's device limit per task.
    #[arg(long)]
    max_devices: Option<usize>,
    /// Paths per second of a local executor usable for every task.
    #[arg(long, requires = "local_watts")]
    local_throughput: Option<f64>,
    /// Average power of the local executor.
    #[arg(long, requires = "local_throughput")]
    local_watts: Option<f64>,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_tasks(source: &TaskSource) -> Result<TaskSet> {
    match &source.task_file {
        Some(p) => TaskSet::parse(&read(p)?, &p.display().to_string()),
        None => Ok(bundled::tasks()),
    }
}

fn load_costs(source: &TaskSource) -> Result<OpCostTable> {
    match &source.costs {
        Some(p) => OpCostTable::parse(&read(p)?, &p.display().to_string()),
        None => Ok(bundled::costs()),
    }
}

fn load_table(data: &DataArgs) -> Result<MeasurementTable> {
    match &data.data_dir {
        Some(dir) => MeasurementTable::from_dir(dir),
        None => Ok(bundled::measurements()),
    }
}

fn price_once(task: &OptionTask, strategy: ExecutionStrategy, seed: u64, costs: &OpCostTable) -> Result<RunResult> {
    let mut r = run(task, strategy, seed)?;
    r.recount_flops(task, costs)?;
    Ok(r)
}

fn price(args: PriceArgs) -> Result<String> {
    let tasks = load_tasks(&args.source)?;
    let costs = load_costs(&args.source)?;
    let strategy: ExecutionStrategy = args.strategy.parse()?;
    let task = args.scale.apply(tasks.resolve(&args.task)?.clone());
    let mut r = price_once(&task, strategy, args.seed, &costs)?;
    if let Some(p) = &args.power_trace {
        let trace = parse_power_trace(&read(p)?, &p.display().to_string())?;
        r.energy = Some(integrate_power(&trace)?);
    }
    render::run_result(&r, args.format)
}

fn bench(args: BenchArgs) -> Result<String> {
    let tasks = load_tasks(&args.source)?;
    let costs = load_costs(&args.source)?;
    let strategies = args
        .strategies
        .iter()
        .map(|s| s.parse())
        .collect::<Result<Vec<ExecutionStrategy>>>()?;
    if args.repetitions == 0 {
        return Err(Error::Config("--repetitions must be at least 1".into()));
    }
    let selected = args
        .tasks
        .iter()
        .map(|d| tasks.resolve(d).map(|t| args.scale.apply(t.clone())))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for task in &selected {
        for s in &strategies {
            for rep in 1..=args.repetitions {
                rows.push((rep, price_once(task, *s, args.seed, &costs)?));
            }
        }
    }
    render::bench(&rows, args.format)
}

fn with_flop_source<T>(data: &DataArgs, f: impl FnOnce(FlopSource<'_>) -> Result<T>) -> Result<T> {
    match data.flops {
        Flops::Published => f(FlopSource::Published),
        Flops::Model => {
            let tasks = load_tasks(&data.source)?;
            let costs = load_costs(&data.source)?;
            f(FlopSource::Model {
                tasks: &tasks,
                costs: &costs,
                steps: data.model_steps,
            })
        }
    }
}

fn analyze(args: AnalyzeArgs) -> Result<String> {
    let table = load_table(&args.data)?;
    let r = with_flop_source(&args.data, |src| report(&table, src))?;
    Ok(match args.format {
        Format::Text => r.to_text(),
        Format::Csv => r.to_csv(),
        Format::Json => r.to_json() + "\n",
    })
}

fn partition(args: PartitionArgs) -> Result<String> {
    let mut w = WorkloadSpec::parse(&read(&args.workload)?, &args.workload.display().to_string())?;
    if let Some(o) = &args.objective {
        w.objective = o.parse::<Objective>()?;
    }
    if let Some(m) = args.max_devices {
        w.max_devices = m;
    }
    if let (Some(throughput), Some(watts)) = (args.local_throughput, args.local_watts) {
        w.local = Some(LocalExecutor {
            name: "local".into(),
            throughput,
            watts,
        });
    }
    let table = load_table(&args.data)?;
    let plan = with_flop_source(&args.data, |src| plan_workload(&w, &table, src))?;
    render::plan(&plan, args.format)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Price(a) => price(a),
        Command::Bench(a) => bench(a),
        Command::Analyze(a) => analyze(a),
        Command::Partition(a) => partition(a),
    };
    match out {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
