use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use weur::output::{bound_report_table, write_json};
use weur::scenario::ScenarioFile;
use weur::sweep::{parse_orders, qutrit_sweep, random_sweep, steering_sweep, Grid, RandomSweep, SteeringSweep};
use weur::{classify, error_record};
use weur_core::bounds::{bound_report, ReportOptions, StateDescriptor};
use weur_core::ensembles::QutritPhase;
use weur_core::entropy::RenyiOrder;
use weur_core::steering::NoiseSide;

#[derive(Parser, Debug)]
#[command(name = "weur", version, about = "Weighted entropic uncertainty bounds for measurement ensembles")]
struct Cli {
    /// Seed for every randomised step.
    #[arg(long, env = "WEUR_SEED", default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate every applicable bound for a scenario file.
    Bound(BoundArgs),
    /// Bounds for random sets of bases, one row per trial.
    SweepRandom(SweepRandomArgs),
    /// Bounds along the four-basis qutrit family.
    SweepQutrit(SweepQutritArgs),
    /// Steering noise thresholds for the three-observable qubit family.
    Steering(SteeringArgs),
    /// Check a scenario file and list every violated condition.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct BoundArgs {
    scenario: PathBuf,
    /// Rényi orders for the IC bounds (comma list, `inf` allowed).
    #[arg(long, default_value = "2")]
    alpha: String,
    /// Use the pure-state forms instead of the state in the file.
    #[arg(long)]
    state_independent: bool,
    /// Also run the numerical search for the optimal bounds.
    #[arg(long)]
    optimal: bool,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepRandomArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 3)]
    count: usize,
    #[arg(long, default_value_t = 1600)]
    trials: usize,
    #[arg(long, default_value = "1,2")]
    alphas: String,
    /// Restarts of the optimal-bound search per trial and order.
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum PhaseArg {
    Quadratic,
    Linear,
}

#[derive(Args, Debug)]
struct SweepQutritArgs {
    /// `start:stop:count` or a comma list; angles may be written `pi/4`.
    #[arg(long, default_value = "0:pi/4:11", allow_hyphen_values = true)]
    beta_grid: String,
    #[arg(long, value_enum, default_value_t = PhaseArg::Quadratic)]
    phase: PhaseArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum NoiseArg {
    Alice,
    Bob,
}

#[derive(Args, Debug)]
struct SteeringArgs {
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    beta1: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    beta2: String,
    #[arg(long, default_value = "inf")]
    alpha: String,
    #[arg(long)]
    optimize_weights: bool,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Which party's measurements carry the white noise.
    #[arg(long, value_enum, default_value_t = NoiseArg::Alice)]
    noise_on: NoiseArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    scenario: PathBuf,
}

fn sink(out: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn single_order(s: &str) -> anyhow::Result<RenyiOrder> {
    match parse_orders(s)?.as_slice() {
        [o] => Ok(*o),
        _ => anyhow::bail!("expected exactly one order, got `{s}`"),
    }
}

fn run_bound(args: &BoundArgs, seed: u64) -> anyhow::Result<()> {
    let file = ScenarioFile::load(&args.scenario)?;
    let scenario = file.resolve()?;
    let d = scenario.ensemble.dim();
    let (state, fallback) = match (&scenario.state, args.state_independent) {
        (Some(s), false) => (StateDescriptor::from_state(s), false),
        (None, false) => (StateDescriptor::state_independent(d), true),
        (_, true) => (StateDescriptor::state_independent(d), false),
    };
    let opts = ReportOptions {
        orders: parse_orders(&args.alpha)?,
        optimal_restarts: args.optimal.then_some(args.restarts),
        seed,
    };
    let mut report = bound_report(&scenario.ensemble, state, &opts)?;
    if fallback {
        report.notes.push("no state in scenario file; using the state-independent forms".into());
    }
    let w = sink(args.out.as_deref())?;
    if args.csv {
        bound_report_table(&report).write_to(w)?;
    } else {
        write_json(w, &json!({ "scenario": ScenarioFile::from_scenario(&scenario), "report": report }))?;
    }
    Ok(())
}

fn run_validate(args: &ValidateArgs) -> anyhow::Result<bool> {
    let file = ScenarioFile::load(&args.scenario)?;
    let diag = file.diagnostics()?;
    let state_error = match (diag.is_valid(), file.resolve()) {
        (true, Err(e)) => Some(e.to_string()),
        _ => None,
    };
    let valid = diag.is_valid() && state_error.is_none();
    write_json(
        io::stdout().lock(),
        &json!({
            "valid": valid,
            "equal_trace": diag.equal_trace,
            "violations": diag.violations,
            "state_error": state_error,
        }),
    )?;
    Ok(valid)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Bound(args) => run_bound(args, cli.seed)?,
        Command::SweepRandom(args) => {
            let cfg = RandomSweep {
                d: args.d,
                count: args.count,
                trials: args.trials,
                orders: parse_orders(&args.alphas)?,
                restarts: args.restarts,
                seed: cli.seed,
            };
            random_sweep(&cfg)?.write_to(sink(args.out.as_deref())?)?;
        }
        Command::SweepQutrit(args) => {
            let phase = match args.phase {
                PhaseArg::Quadratic => QutritPhase::Quadratic,
                PhaseArg::Linear => QutritPhase::Linear,
            };
            qutrit_sweep(&args.beta_grid.parse::<Grid>()?, phase)?.write_to(sink(args.out.as_deref())?)?;
        }
        Command::Steering(args) => {
            if !(args.tol > 0.0 && args.tol <= 1e-4) {
                return Err(weur_core::Error::InvalidArgument(format!("--tol {} outside (0, 1e-4]", args.tol)).into());
            }
            let cfg = SteeringSweep {
                beta1: args.beta1.parse()?,
                beta2: args.beta2.parse()?,
                order: single_order(&args.alpha)?,
                tol: args.tol,
                optimize_weights: args.optimize_weights,
                restarts: args.restarts,
                noise_side: match args.noise_on {
                    NoiseArg::Alice => NoiseSide::Alice,
                    NoiseArg::Bob => NoiseSide::Bob,
                },
                seed: cli.seed,
            };
            steering_sweep(&cfg).write_to(sink(args.out.as_deref())?)?;
        }
        Command::Validate(args) => {
            if !run_validate(args)? {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("{}", error_record(&err));
            ExitCode::from(classify(&err).exit_code())
        }
    }
}
