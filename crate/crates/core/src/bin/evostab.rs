use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use evostab::commands::{run, Command, EXIT_USAGE};

const AFTER_HELP: &str = "\
Outputs (written to --out):
  report.json    structured report (deterministic for a given config)
  summary.txt    human-readable summary

CSV files:
  evidence.csv   certify, validate: re,im,inside_ball,herm_min,resolvent_norm
                 (one row per sampled frequency z = re + i·im; herm_min is empty
                 inside the exclusion ball)
  u.csv, du.csv  simulate: t,u0..u{n-1} and t,du0..du{n-1}
  energy.csv     simulate, validate: t,energy with energy = |du|^2 + |Cu|^2
  memory.csv     simulate (memory laws): t,m0..m{n-1}, the convolution term
  windows.csv    simulate, validate: t_mid,norm (windowed L2 norms of sqrt(energy))
  g.csv          kernel-check: rho,g (closed-form lower bound at the chosen delta)
  kernel.csv     kernel-check: t,k (or t,k0..k{m-1} for diagonal kernels)
  sweep.csv      sweep-kappa: kappa,kappa_over_kappa0,certified,rho1,nu_hat,
                 fit_residual,rate_ok,failure (empty cells where not applicable)

Exit codes: 0 success/certified, 1 analysis negative, 2 usage or config error.
Environment: EVOSTAB_THREADS caps the number of worker threads.";

#[derive(Parser)]
#[command(name = "evostab", version, about = "Stability certificates for evolutionary equations with memory and delay", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Issue a frequency-domain stability certificate.
    Certify(Args),
    /// Time-step the scenario and fit the decay rate.
    Simulate(Args),
    /// Certify, simulate and compare the fitted rate with the certified one.
    Validate(Args),
    /// Check the kernel hypotheses and positivity constants.
    KernelCheck(Args),
    /// Certify and simulate a list of delay gains.
    SweepKappa(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    if let Ok(v) = std::env::var("EVOSTAB_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("EVOSTAB_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(EXIT_USAGE as u8);
            }
        }
    }
    let (command, args) = match cli.command {
        Cmd::Certify(a) => (Command::Certify, a),
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Validate(a) => (Command::Validate, a),
        Cmd::KernelCheck(a) => (Command::KernelCheck, a),
        Cmd::SweepKappa(a) => (Command::SweepKappa, a),
    };
    let (code, message) = run(command, &args.config, &args.out);
    if code == EXIT_USAGE {
        eprintln!("{message}");
    } else {
        println!("{message}");
    }
    ExitCode::from(code as u8)
}
