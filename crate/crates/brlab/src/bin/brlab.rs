//! Thin command-line front end over the library runner.
//!
//! Exit codes: 0 ok, 1 oracle/acceptance failure, 2 configuration error,
//! 3 solver failure.

use brlab::config::ScenarioConfig;
use brlab::runner;
use brlab::Error;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "brlab",
    version,
    about = "Boundary-reaction laboratory: solve the epsilon-reaction problem on a \
             half-slab, sweep the reaction scale, and run the concentration and \
             varifold analysis suites."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (falls back to the config's output_dir, then
    /// $BRLAB_OUT, then ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the epsilon sweep.
    #[arg(long)]
    workers: Option<usize>,
    /// Override the config's random seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the first epsilon of the scenario and dump the field.
    Solve(CommonArgs),
    /// Solve every epsilon; record convergence and energy tables.
    Sweep(CommonArgs),
    /// Sweep plus the full analysis suite (monotonicity, concentration,
    /// decay, stationarity, decomposition).
    Analyze(CommonArgs),
    /// Run the closed-form oracle battery and print pass/fail per check.
    Validate {
        /// Optional config contributing solver controls (must keep the
        /// Peierls-Nabarro potential).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Print the summary of an existing report, verifying its schema.
    Report {
        /// Directory containing report.json (falls back to $BRLAB_OUT,
        /// then ./out).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code_of(e: &Error) -> i32 {
    match e {
        Error::SolverDiverged { .. } => 3,
        _ => 2,
    }
}

fn load(args: &CommonArgs) -> Result<(ScenarioConfig, PathBuf), Error> {
    let mut config = ScenarioConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let out = runner::resolve_out_dir(args.out.as_deref(), config.output_dir.as_deref());
    Ok((config, out))
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.cmd {
        Cmd::Solve(args) => {
            let (config, out) = load(&args)?;
            let report = runner::run_solve(&config, &out, args.workers)?;
            let r = &report.runs[0];
            println!(
                "solved epsilon = {} in {} sweeps (residual {:.3e}); field and report in {}",
                r.epsilon,
                r.sweeps,
                r.final_residual,
                out.display()
            );
            Ok(if report.partial { 3 } else { 0 })
        }
        Cmd::Sweep(args) => {
            let (config, out) = load(&args)?;
            let report = runner::run_sweep(&config, &out, args.workers)?;
            for r in &report.runs {
                println!(
                    "epsilon = {:<8} converged = {:<5} sweeps = {:<6} total energy = {:.6}",
                    r.epsilon, r.converged, r.sweeps, r.total
                );
            }
            println!("report in {}", out.display());
            Ok(if report.partial { 3 } else { 0 })
        }
        Cmd::Analyze(args) => {
            let (config, out) = load(&args)?;
            let report = runner::run_analyze(&config, &out, args.workers)?;
            if report.partial {
                println!(
                    "partial report in {} (a member failed to converge)",
                    out.display()
                );
                return Ok(3);
            }
            if let Some(eta) = report.eta0 {
                println!("eta0 = {eta}");
            }
            if let Some(c) = &report.concentration {
                println!(
                    "concentration set at r = {}: {} face node(s), nesting violations: {}",
                    c.r,
                    c.sigma_points.len(),
                    c.nesting_violations
                );
            }
            if let Some(d) = &report.potential_decay {
                match d.slope {
                    Some(s) => println!("potential decay slope = {s:.3}"),
                    None => println!("potential decay: all masses zero"),
                }
            }
            for s in &report.stationarity {
                println!(
                    "stationarity at epsilon = {:<8} raw = {:.3e} companion = {:.3e}",
                    s.epsilon, s.raw_max, s.companion_max
                );
            }
            println!("report in {}", out.display());
            Ok(0)
        }
        Cmd::Validate { config, workers } => {
            let cfg = match &config {
                Some(path) => Some(ScenarioConfig::load(path)?),
                None => None,
            };
            let checks = runner::run_validate(cfg.as_ref(), workers)?;
            let mut failed = 0;
            for c in &checks {
                println!(
                    "check {:<24} {}  ({})",
                    c.name,
                    if c.passed { "pass" } else { "FAIL" },
                    c.detail
                );
                if !c.passed {
                    failed += 1;
                }
            }
            Ok(if failed > 0 { 1 } else { 0 })
        }
        Cmd::Report { out } => {
            let dir = runner::resolve_out_dir(out.as_deref(), None);
            let v = runner::read_report(&dir.join("report.json"))?;
            println!("{}", runner::summarize_report(&v));
            Ok(0)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_of(&e)
        }
    };
    std::process::exit(code);
}
