//! `edge-mta` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::baselines::{solve_exact, ExactBudget};
use crate::domain::{parse_instance, serialize_instance, Instance};
use crate::error::Result;
use crate::harness::config::{resolve_seed, FileConfig, SEED_ENV};
use crate::harness::generator::generate_instance;
use crate::harness::run_solver;
use crate::harness::sweep::{run_sweep, write_rows, write_traces, TraceRow};
use crate::qlearning::LearnConfig;
use crate::round::{Ledger, RoundConfig, SolverChoice};

#[derive(Debug, Parser)]
#[command(name = "edge-mta", version, about = "Edge task allocation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random instance document.
    Gen {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        servers: Option<usize>,
        #[arg(long)]
        tasks: Option<usize>,
    },
    /// Solve one instance and print its total reward.
    Solve {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        learn: LearnArgs,
        #[arg(long, value_enum, default_value = "qlearning")]
        solver: SolverArg,
        /// Instance document; a generated instance is used when omitted.
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Write the per-episode learning trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run a parameter sweep described by the config file.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        learn: LearnArgs,
        /// Write per-episode learning traces as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Simulate one allocation-and-settlement round and append it to a ledger.
    Round {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        learn: LearnArgs,
        #[arg(long, value_enum, default_value = "qlearning")]
        solver: SolverArg,
        #[arg(long)]
        instance: Option<PathBuf>,
    },
    /// Solve exactly by exhaustive search (small instances only).
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        instance: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LearnArgs {
    #[arg(long)]
    episodes: Option<usize>,
    /// Learning rate.
    #[arg(long)]
    alpha: Option<f64>,
    /// Discount factor.
    #[arg(long)]
    gamma: Option<f64>,
    /// Probability of exploiting the Q-table.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverArg {
    Qlearning,
    Greedy,
    Random,
    Exact,
}

impl From<SolverArg> for SolverChoice {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Qlearning => SolverChoice::QLearning,
            SolverArg::Greedy => SolverChoice::Greedy,
            SolverArg::Random => SolverChoice::Random,
            SolverArg::Exact => SolverChoice::Exact,
        }
    }
}

struct Context {
    file: FileConfig,
    seed: u64,
}

impl Context {
    fn new(common: &CommonArgs) -> Result<Self> {
        let file = match &common.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let env = std::env::var(SEED_ENV).ok();
        let seed = resolve_seed(common.seed, file.seed, env.as_deref())?;
        Ok(Context { file, seed })
    }

    fn learn(&self, args: &LearnArgs) -> LearnConfig {
        let mut cfg = self.file.learn(self.seed);
        cfg.episodes = args.episodes.unwrap_or(cfg.episodes);
        cfg.learning_rate = args.alpha.unwrap_or(cfg.learning_rate);
        cfg.discount = args.gamma.unwrap_or(cfg.discount);
        cfg.epsilon = args.epsilon.unwrap_or(cfg.epsilon);
        cfg
    }

    fn budget(&self) -> ExactBudget {
        self.file
            .exact_max_log2
            .map(|max_log2_assignments| ExactBudget { max_log2_assignments })
            .unwrap_or_default()
    }

    fn instance(&self, path: Option<&Path>) -> Result<Instance> {
        match path {
            Some(p) => parse_instance(&std::fs::read_to_string(p)?),
            None => Ok(generate_instance(&self.file.generator(), self.seed)?),
        }
    }
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn write_trace_file(path: &Path, rows: &[TraceRow]) -> Result<()> {
    write_traces(rows, BufWriter::new(File::create(path)?))
}

fn execute(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Gen { common, servers, tasks } => {
            let ctx = Context::new(&common)?;
            let mut params = ctx.file.generator();
            params.num_servers = servers.unwrap_or(params.num_servers);
            params.num_tasks = tasks.unwrap_or(params.num_tasks);
            let inst = generate_instance(&params, ctx.seed)?;
            let text = serialize_instance(&inst);
            match common.out.as_deref() {
                Some(p) => std::fs::write(p, text)?,
                None => stdout.write_all(text.as_bytes())?,
            }
        }
        Command::Solve {
            common,
            learn,
            solver,
            instance,
            trace,
        } => {
            let ctx = Context::new(&common)?;
            let inst = ctx.instance(instance.as_deref())?;
            let learn = ctx.learn(&learn);
            let outcome = run_solver(&inst, solver.into(), &learn, ctx.budget())?;
            if let (Some(path), Some(res)) = (trace.as_deref(), &outcome.learning) {
                write_trace_file(path, &TraceRow::from_result(res, &learn))?;
            }
            if let Some(path) = common.out.as_deref() {
                write_json(path, &outcome.allocation)?;
            }
            writeln!(stdout, "total_reward: {}", outcome.total_reward)?;
            writeln!(stdout, "total_utility: {}", outcome.allocation.total_utility)?;
            writeln!(
                stdout,
                "assigned: {}/{}",
                outcome.allocation.assignment.assigned_count(),
                inst.num_tasks()
            )?;
        }
        Command::Sweep { common, learn, trace } => {
            let ctx = Context::new(&common)?;
            let mut spec = ctx.file.sweep(ctx.seed)?;
            spec.learn = ctx.learn(&learn);
            let out = run_sweep(&spec)?;
            for e in &out.errors {
                writeln!(stderr, "error row: {e}")?;
            }
            match common.out.as_deref() {
                Some(p) => write_rows(&out.rows, BufWriter::new(File::create(p)?))?,
                None => write_rows(&out.rows, &mut *stdout)?,
            }
            if let Some(path) = trace.as_deref() {
                write_trace_file(path, &out.traces)?;
            }
        }
        Command::Round {
            common,
            learn,
            solver,
            instance,
        } => {
            let ctx = Context::new(&common)?;
            let inst = ctx.instance(instance.as_deref())?;
            let cfg = RoundConfig {
                learn: ctx.learn(&learn),
                exact_max_log2: Some(ctx.budget().max_log2_assignments),
            };
            let mut ledger = match common.out.as_deref() {
                Some(p) => Ledger::open(p)?,
                None => Ledger::in_memory(),
            };
            let record = ledger.run_round(&inst, solver.into(), &cfg)?;
            let incomes: Vec<f64> = (0..inst.num_servers())
                .map(|i| crate::round::server_net_income(record, i))
                .collect();
            writeln!(stdout, "round: {}", record.round)?;
            writeln!(stdout, "total_utility: {}", record.allocation.total_utility)?;
            writeln!(stdout, "payments: {}", record.payments.len())?;
            writeln!(stdout, "net_income_total: {}", incomes.iter().sum::<f64>())?;
        }
        Command::Oracle { common, instance } => {
            let ctx = Context::new(&common)?;
            let inst = ctx.instance(instance.as_deref())?;
            let alloc = solve_exact(&inst, ctx.budget())?;
            if let Some(path) = common.out.as_deref() {
                write_json(path, &alloc)?;
            }
            writeln!(stdout, "optimum: {}", alloc.total_utility)?;
            writeln!(stdout, "assignment: {:?}", alloc.assignment.as_slice())?;
        }
    }
    Ok(())
}

/// Parses `argv` (including the program name) and runs the command.
/// Returns the process exit code: 0 on success, 1 on a runtime error, 2 on a
/// usage error.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(stderr, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}
