//! Command-line driver for two-tier WSN deployment experiments.
//!
//! Exit codes: 0 on success, 2 on configuration/usage errors, 1 on runtime
//! errors.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use ttwsn::harness::{
    load_scenario, parse_beta_spec, preset, run_experiment, sweep_command, ExperimentConfig,
    RunMode,
};
use ttwsn::optimize::OptimOptions;
use ttwsn::{Error, Scenario};

#[derive(Parser)]
#[command(
    name = "ttwsn",
    version,
    about = "Energy-optimal two-tier WSN deployment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a multi-restart deployment experiment and write all artifacts.
    Run(RunArgs),
    /// Sweep β and emit the AP-Sensor trade-off curve.
    Sweep(SweepArgs),
    /// Evaluate closed-form oracles.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Built-in scenario: WSN{1,2}-{uniform,gaussian}[-limited].
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Scenario config file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the scenario's β.
    #[arg(long)]
    beta: Option<f64>,
    /// Grid resolution (cells per axis).
    #[arg(long, default_value_t = 100)]
    res: usize,
    /// Random restarts.
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    /// Base RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Iteration cap per restart.
    #[arg(long, default_value_t = 100)]
    iters: usize,
    /// Relative-improvement stop threshold.
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// β values: comma-separated list or start:end:{log,lin}:count.
    #[arg(long)]
    betas: String,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Closed-form two-AP/one-FC optimum on `[0,1]` with uniform density.
    TwoAp {
        #[arg(long)]
        a1: f64,
        #[arg(long)]
        a2: f64,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long)]
        beta: f64,
    },
}

fn resolve(args: &ScenarioArgs) -> Result<ExperimentConfig, Error> {
    let mut scenario: Scenario = match (&args.preset, &args.config) {
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => load_scenario(path)?,
        _ => {
            return Err(Error::Usage(
                "exactly one of --preset or --config is required".into(),
            ));
        }
    };
    if let Some(beta) = args.beta {
        scenario.beta = beta;
    }
    let mode = if scenario.limited() {
        RunMode::Limited
    } else {
        RunMode::Unconstrained
    };
    Ok(ExperimentConfig {
        scenario,
        mode,
        opts: OptimOptions {
            epsilon: args.eps,
            max_iters: args.iters,
            seed: args.seed,
            restarts: args.restarts,
        },
        resolution: args.res,
        out_dir: args.out.clone(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run(args) => {
            let cfg = resolve(&args.scenario)?;
            let outcome = run_experiment(&cfg)?;
            let r = outcome.best_report;
            println!(
                "best restart {} | sensor {:.6} | ap {:.6} | two-tier {:.6} | coverage {:.4}",
                outcome.best_index, r.sensor_power, r.ap_power, r.two_tier_power, r.coverage
            );
            println!("artifacts in {}", outcome.out_dir.display());
            Ok(())
        }
        Command::Sweep(args) => {
            let cfg = resolve(&args.scenario)?;
            let betas = parse_beta_spec(&args.betas)?;
            let curve = sweep_command(&cfg, &betas)?;
            let on_env = curve.envelope().count();
            println!(
                "{} sweep points ({} on the envelope) written to {}",
                curve.points.len(),
                on_env,
                cfg.out_dir.display()
            );
            Ok(())
        }
        Command::Oracle(OracleCommand::TwoAp {
            a1,
            a2,
            kappa,
            beta,
        }) => {
            let sol = ttwsn::analytic::two_ap_optimum(a1, a2, kappa, beta)?;
            println!("useful: {}", sol.useful);
            println!("power: {}", sol.power);
            println!("boundary r*: {}", sol.r_star);
            println!("fc q*: {}", sol.q_star);
            println!("p1: {}", sol.p1);
            println!("p2: {}", sol.p2);
            for (k, (r, q)) in sol.stationary_pairs.iter().enumerate() {
                println!("stationary pair {}: r = {r}, q = {q}", k + 1);
            }
            Ok(())
        }
    }
}
