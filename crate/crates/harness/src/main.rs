//! `pwd`: run p-norm weight decay experiments from the command line.

use clap::{Args, Parser, Subcommand};
use pwd_harness::config::{ExperimentConfig, ExperimentKind, ToyVariant};
use pwd_harness::experiments::{run_bridge, run_logreg, run_mlp, run_prune_baseline, run_scan, run_toy};
use pwd_harness::output::{emit_run, emit_scan, emit_toy, write_file};
use pwd_harness::records::TRADEOFF_CONVENTION;
use pwd_harness::{verify, Result};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "pwd", about = "p-norm weight decay experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

/// Flags that override fields of the JSON configuration.
#[derive(Args)]
struct Global {
    /// JSON experiment configuration; defaults depend on the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    p: Option<f64>,
    #[arg(long = "lambda-p", global = true)]
    lambda_p: Option<f64>,
    #[arg(long = "max-lr", global = true)]
    max_lr: Option<f64>,
    #[arg(long, global = true)]
    steps: Option<u64>,
    /// Refresh the decay anchor every N steps.
    #[arg(long, global = true)]
    cadence: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// One-parameter toy problem.
    Toy {
        /// Plain gradient descent on the penalized loss instead of pWD.
        #[arg(long)]
        naive: bool,
    },
    /// Sparse linear regression with known support.
    Bridge,
    /// Logistic regression on two Gaussian blobs.
    Logreg,
    /// MLP classifier on Gaussian blobs.
    Mlp,
    /// Grid over max_lr × lambda_p for each configured p.
    Scan,
    /// Magnitude-pruning baseline with p = 2 decay.
    Prune,
    /// Run the verification suites.
    Verify,
    /// Print the default configuration for an experiment kind.
    Config {
        #[arg(value_parser = parse_kind)]
        kind: ExperimentKind,
    },
}

fn parse_kind(s: &str) -> std::result::Result<ExperimentKind, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).map_err(|_| format!("unknown kind {s}"))
}

fn load(global: &Global, kind: ExperimentKind) -> Result<ExperimentConfig> {
    let mut c = match &global.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::for_kind(kind),
    };
    c.kind = kind;
    if let Some(v) = global.seed {
        c.seed = v;
    }
    if let Some(v) = &global.out {
        c.out_dir = Some(v.clone());
    }
    if let Some(v) = global.p {
        c.pwd.p = v;
        if kind == ExperimentKind::Scan {
            c.scan.p_values = vec![v];
        }
    }
    if let Some(v) = global.lambda_p {
        c.pwd.lambda_p = v;
    }
    if let Some(v) = global.max_lr {
        c.schedule.max_lr = v;
    }
    if let Some(v) = global.steps {
        c.steps = v;
    }
    if let Some(v) = global.cadence {
        c.pwd.s_cadence = v;
    }
    c.validate()?;
    Ok(c)
}

fn out_dir(c: &ExperimentConfig, default: &str) -> PathBuf {
    c.out_dir.clone().unwrap_or_else(|| PathBuf::from("runs").join(default))
}

fn run(cli: Cli) -> Result<bool> {
    let g = &cli.global;
    match cli.command {
        Command::Toy { naive } => {
            let mut c = load(g, ExperimentKind::Toy)?;
            if naive {
                c.toy.variant = ToyVariant::Naive;
            }
            let out = run_toy(&c)?;
            let files = emit_toy(&out_dir(&c, "toy"), &c, &out)?;
            let v = &out.verdict;
            println!(
                "toy {:?}: sign changes {}, min |w| {:e}, first |w|<1e-8 at {:?}, {}",
                c.toy.variant,
                v.sign_changes,
                v.min_abs,
                v.first_below_1e8,
                if v.converged { "converged" } else if v.oscillating { "oscillating" } else { "not converged" }
            );
            report_files(&files);
        }
        Command::Bridge | Command::Logreg | Command::Mlp | Command::Prune => {
            let (kind, name) = match cli.command {
                Command::Bridge => (ExperimentKind::Bridge, "bridge"),
                Command::Logreg => (ExperimentKind::Logreg, "logreg"),
                Command::Mlp => (ExperimentKind::Mlp, "mlp"),
                _ => (ExperimentKind::PruneBaseline, "prune"),
            };
            let c = load(g, kind)?;
            let out = match kind {
                ExperimentKind::Bridge => run_bridge(&c)?,
                ExperimentKind::Logreg => run_logreg(&c)?,
                ExperimentKind::Mlp => run_mlp(&c)?,
                _ => run_prune_baseline(&c)?,
            };
            let files = emit_run(&out_dir(&c, name), &c, &out)?;
            println!("{}", serde_json::to_string(&out.cell).expect("cell serializes"));
            report_files(&files);
        }
        Command::Scan => {
            let c = load(g, ExperimentKind::Scan)?;
            let out = run_scan(&c)?;
            let files = emit_scan(&out_dir(&c, "scan"), &out)?;
            println!("tradeoff = {TRADEOFF_CONVENTION}");
            println!("{:>6} {:>10} {:>10} {:>8} {:>9} {:>9}", "p", "max_lr", "lambda_p", "acc[%]", "sparsity", "tradeoff");
            for cell in &out.result.cells {
                let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.2}"));
                println!(
                    "{:>6} {:>10.3e} {:>10.3e} {:>8} {:>9.4} {:>9}",
                    cell.p,
                    cell.max_lr,
                    cell.lambda_p,
                    fmt(cell.final_acc),
                    cell.final_sparsity,
                    fmt(cell.tradeoff)
                );
            }
            println!("{} files written", files.len());
        }
        Command::Verify => {
            let results = verify::run_all()?;
            let mut all = true;
            for r in &results {
                all &= r.passed;
                println!("[{}] {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
            if let Some(dir) = &g.out {
                let path = dir.join("verify.json");
                write_file(&path, &serde_json::to_string_pretty(&results).expect("results serialize"))?;
            }
            return Ok(all);
        }
        Command::Config { kind } => {
            println!("{}", ExperimentConfig::for_kind(kind).to_json());
        }
    }
    Ok(true)
}

fn report_files(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
