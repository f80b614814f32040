//! `symon`: run, compare and benchmark symbolic stream monitors from the command line.

use clap::{ArgGroup, Parser, Subcommand};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use symon::harness::{
    bench, compare, inject, parse_trace, InjectError, InjectionPlan, TraceError, TraceFile,
};
use symon::interval::run_abs;
use symon::monitor::{run, MonitorConfig, MonitorError, Pruning};
use symon::rational::{parse_rational, Rational};
use symon::spec::{parse_spec, SpecError, Specification};
use thiserror::Error;

#[derive(Parser)]
#[command(
    name = "symon",
    version,
    about = "Online symbolic monitoring of stream specifications"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monitor a trace and print one verdict record per line.
    Run {
        spec: PathBuf,
        trace: PathBuf,
        /// Keep the full constraint history instead of pruning after each step.
        #[arg(long)]
        no_prune: bool,
        /// Instants kept relevant behind the current one.
        #[arg(long, value_name = "L")]
        lookback: Option<usize>,
        /// Use the interval monitor instead of the symbolic one.
        #[arg(long)]
        abs: bool,
        /// Search nodes allowed per solver query.
        #[arg(long, value_name = "N")]
        max_nodes: Option<usize>,
    },
    /// Add uncertainty to a trace and print the result.
    #[command(group(ArgGroup::new("mode").required(true).args(["perturb", "bursts", "unknowns"])))]
    Inject {
        trace: PathBuf,
        /// Replace a fraction X of exact Real cells by ranges of relative width Y.
        #[arg(long, num_args = 2, value_names = ["X", "Y"])]
        perturb: Option<Vec<String>>,
        /// Blank N windows of whole rows, each MIN to MAX rows long.
        #[arg(long, num_args = 3, value_names = ["N", "MIN", "MAX"])]
        bursts: Option<Vec<usize>>,
        /// Replace a fraction X of all cells by `?`.
        #[arg(long, value_name = "X")]
        unknowns: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write to this file instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the symbolic and interval monitors side by side and print a CSV report.
    Compare {
        spec: PathBuf,
        trace: PathBuf,
        #[arg(long)]
        no_prune: bool,
    },
    /// Time the monitor on all-unknown traces of the given lengths and print a CSV table.
    Bench {
        spec: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        lengths: Vec<usize>,
        #[arg(long)]
        no_prune: bool,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Write(#[from] io::Error),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Inject(#[from] InjectError),
    #[error(transparent)]
    Monitor(#[from] MonitorError),
    #[error("not a number: {0:?}")]
    Number(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Monitor(MonitorError::Solver(_) | MonitorError::Invariant(_)) => 2,
            _ => 1,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn load_spec(path: &Path) -> Result<Specification, CliError> {
    Ok(parse_spec(&read(path)?)?)
}

fn load_trace(path: &Path) -> Result<TraceFile, CliError> {
    Ok(parse_trace(&read(path)?)?)
}

fn number(text: &str) -> Result<Rational, CliError> {
    parse_rational(text).ok_or_else(|| CliError::Number(text.to_string()))
}

fn config(no_prune: bool, lookback: Option<usize>) -> MonitorConfig {
    MonitorConfig {
        pruning: if no_prune {
            Pruning::Off
        } else {
            Pruning::EveryStep
        },
        lookback,
        ..Default::default()
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    let mut out = io::BufWriter::new(io::stdout().lock());
    match command {
        Command::Run {
            spec,
            trace,
            no_prune,
            lookback,
            abs,
            max_nodes,
        } => {
            let spec = load_spec(&spec)?;
            let readings = load_trace(&trace)?.readings_for(&spec)?;
            if abs {
                for v in run_abs(&spec, &readings)? {
                    writeln!(out, "{}", v.record())?;
                }
            } else {
                let mut config = config(no_prune, lookback);
                if let Some(n) = max_nodes {
                    config.caps.nodes = n;
                }
                for v in run(&spec, &readings, config)?.verdicts {
                    writeln!(out, "{}", v.record())?;
                }
            }
        }
        Command::Inject {
            trace,
            perturb,
            bursts,
            unknowns,
            seed,
            output,
        } => {
            let plan = match (perturb, bursts, unknowns) {
                (Some(p), _, _) => InjectionPlan::Perturb {
                    fraction: number(&p[0])?,
                    width: number(&p[1])?,
                    seed,
                },
                (_, Some(b), _) => InjectionPlan::Bursts {
                    count: b[0],
                    min_len: b[1],
                    max_len: b[2],
                    seed,
                },
                (_, _, Some(u)) => InjectionPlan::Unknowns {
                    fraction: number(&u)?,
                    seed,
                },
                _ => unreachable!("clap requires one injection mode"),
            };
            let noisy = inject(&load_trace(&trace)?, &plan)?;
            match output {
                Some(path) => noisy.save(path)?,
                None => out.write_all(noisy.render().as_bytes())?,
            }
        }
        Command::Compare {
            spec,
            trace,
            no_prune,
        } => {
            let spec = load_spec(&spec)?;
            let readings = load_trace(&trace)?.readings_for(&spec)?;
            let report = compare(&spec, &readings, config(no_prune, None))?;
            out.write_all(report.to_csv().as_bytes())?;
        }
        Command::Bench {
            spec,
            lengths,
            no_prune,
        } => {
            let spec = load_spec(&spec)?;
            let report = bench(&spec, &lengths, config(no_prune, None))?;
            out.write_all(report.to_csv().as_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("symon: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
