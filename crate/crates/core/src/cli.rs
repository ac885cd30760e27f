//! The `coopt` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 parse or file error, 3 guard or
//! numeric fault. Every failure prints exactly one `coopt: error: ...` line on
//! standard error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{run_comparison, write_report, BatchItem};
use crate::error::Error;
use crate::format::{fmt_sig17, parse_instance, write_instance, write_solution};
use crate::generator::{generate_instance, GenSpec};
use crate::local_search::mrls_run;
use crate::model::CopInstance;
use crate::rng::derive_seed;
use crate::solver::{run_qoa, Schedule, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_FAULT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "coopt", version, about = "Cooperative optimization and local search for binary COPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random instance
    Generate(GenerateArgs),
    /// Solve an instance with QOA or multi-restart local search
    Solve {
        #[command(subcommand)]
        algorithm: SolveCommand,
    },
    /// Exhaustive optimum of a small instance
    Exact(ExactArgs),
    /// Compare MRLS and QOA on a batch of instances, writing a CSV report
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    vars: usize,
    #[arg(long)]
    vals: usize,
    #[arg(long)]
    avg_degree: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScheduleArg {
    GaussSeidel,
    Jacobi,
}

#[derive(Debug, Args)]
struct QoaParams {
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 20)]
    iters: usize,
}

#[derive(Debug, Subcommand)]
enum SolveCommand {
    Qoa {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        params: QoaParams,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "gauss-seidel")]
        schedule: ScheduleArg,
        /// Also report the best argmax assignment seen over all iterations
        #[arg(long)]
        track_best: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Mrls {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ExactArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Largest joint state space to enumerate
    #[arg(long, default_value_t = 10_000_000)]
    cap: u128,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, required_unless_present = "instance")]
    vars: Option<usize>,
    #[arg(long, required_unless_present = "instance")]
    vals: Option<usize>,
    #[arg(long, required_unless_present = "instance")]
    avg_degree: Option<f64>,
    #[arg(long, default_value_t = 10)]
    instances: usize,
    /// Benchmark existing .cop files instead of generating instances
    #[arg(long, conflicts_with_all = ["vars", "vals", "avg_degree"])]
    instance: Vec<PathBuf>,
    #[arg(long, default_value_t = 100)]
    restarts: usize,
    #[command(flatten)]
    params: QoaParams,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; keep at 1 for clean timings
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::InvalidInstance(_) | Error::Io(_) => EXIT_PARSE,
            Error::Guard(_) | Error::Numeric(_) | Error::Contract(_) => EXIT_FAULT,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn with_path(path: &Path, e: Error) -> Failure {
    let mut f = Failure::from(e);
    f.message = format!("{}: {}", path.display(), f.message);
    f
}

/// Derived seed for generating instance `index` of a bench batch.
pub fn bench_generation_seed(master_seed: u64, index: usize) -> u64 {
    derive_seed(derive_seed(master_seed, index as u64), 2)
}

fn read_instance(path: &Path) -> Result<CopInstance, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| with_path(path, e.into()))?;
    parse_instance(&text).map_err(|e| with_path(path, e))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| with_path(path, e.into()))
}

fn qoa_config(params: &QoaParams, seed: u64) -> Result<SolverConfig, Failure> {
    let cfg = SolverConfig {
        hbar: params.hbar,
        alpha: params.alpha,
        max_iterations: params.iters,
        seed,
        ..SolverConfig::default()
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::from(Error::from(e));
    match cli.command {
        Command::Generate(args) => {
            let spec = GenSpec::new(args.vars, args.vals, args.avg_degree, args.seed);
            let text = write_instance(&generate_instance(&spec)?);
            match args.out {
                Some(path) => write_file(&path, &text)?,
                None => out.write_all(text.as_bytes()).map_err(io)?,
            }
        }
        Command::Solve { algorithm: SolveCommand::Qoa { instance, params, seed, schedule, track_best, out: sol } } => {
            let inst = read_instance(&instance)?;
            let mut cfg = qoa_config(&params, seed)?;
            cfg.schedule = match schedule {
                ScheduleArg::GaussSeidel => Schedule::GaussSeidel,
                ScheduleArg::Jacobi => Schedule::Jacobi,
            };
            cfg.track_best = track_best;
            let report = run_qoa(&inst, &cfg)?;
            if let Some(path) = sol {
                write_file(&path, &write_solution(report.cost, &report.solution))?;
            }
            let mut line = format!("cost={} seconds={:.3}", fmt_sig17(report.cost), report.wall_seconds);
            if let Some(best) = report.best_cost {
                line.push_str(&format!(" best_cost={}", fmt_sig17(best)));
            }
            writeln!(out, "{line}").map_err(io)?;
        }
        Command::Solve { algorithm: SolveCommand::Mrls { instance, restarts, seed, out: sol } } => {
            if restarts == 0 {
                return Err(usage("--restarts must be at least 1"));
            }
            let inst = read_instance(&instance)?;
            let report = mrls_run(&inst, restarts, seed);
            if let Some(path) = sol {
                write_file(&path, &write_solution(report.cost, &report.solution))?;
            }
            writeln!(out, "cost={} seconds={:.3}", fmt_sig17(report.cost), report.wall_seconds).map_err(io)?;
        }
        Command::Exact(args) => {
            let inst = read_instance(&args.instance)?;
            let (solution, cost) = inst.brute_force_optimum(args.cap)?;
            if let Some(path) = args.out {
                write_file(&path, &write_solution(cost, &solution))?;
            }
            writeln!(out, "cost={}", fmt_sig17(cost)).map_err(io)?;
        }
        Command::Bench(args) => {
            if args.restarts == 0 {
                return Err(usage("--restarts must be at least 1"));
            }
            let cfg = qoa_config(&args.params, 0)?;
            let batch: Vec<BatchItem> = if args.instance.is_empty() {
                if args.instances == 0 {
                    return Err(usage("--instances must be at least 1"));
                }
                let (n, d, deg) = (args.vars.unwrap(), args.vals.unwrap(), args.avg_degree.unwrap());
                (0..args.instances)
                    .map(|k| BatchItem::Generated(GenSpec::new(n, d, deg, bench_generation_seed(args.seed, k))))
                    .collect()
            } else {
                args.instance
                    .iter()
                    .map(|path| {
                        let id = path.file_stem().unwrap_or(path.as_os_str()).to_string_lossy().into_owned();
                        Ok(BatchItem::Loaded { id, instance: read_instance(path)? })
                    })
                    .collect::<Result<_, Failure>>()?
            };
            let records = run_comparison(&batch, args.restarts, &cfg, args.seed, args.jobs.max(1))?;
            write_file(&args.out, &write_report(&records))?;
            let failed: Vec<&str> = records
                .iter()
                .filter(|r| r.error.is_some())
                .map(|r| r.instance_id.as_str())
                .collect();
            if let Some(first) = records.iter().find_map(|r| r.error.as_deref()) {
                return Err(Failure {
                    code: EXIT_FAULT,
                    message: format!("{} run(s) failed ({}): {first}", failed.len(), failed.join(" ")),
                });
            }
        }
    }
    Ok(())
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid usage");
            let _ = writeln!(err, "coopt: {first}");
            return EXIT_USAGE;
        }
    };
    match run(cli, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "coopt: error: {}", f.message.replace('\n', "; "));
            f.code
        }
    }
}
