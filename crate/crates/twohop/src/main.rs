use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use twohop::cli::{
    parse_config, run_decide, run_sweep, run_verify_bounds, run_verify_theory, RunConfig,
};

#[derive(Parser)]
#[command(name = "twohop", version, about = "Planner for sparse two-hop reachability ensembles")]
struct Args {
    /// TOML config path; omitted keys take the reference defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the master seed from the config
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check norm and edit-distance bounds on a deterministic instance battery
    VerifyBounds,
    /// Check closed forms against Monte Carlo estimates
    VerifyTheory,
    /// Emit branch and envelope rows over a demand-density grid
    Sweep,
    /// Report the boundary rule decision for the configured costs
    Decide,
}

fn load(args: &Args) -> twohop::Result<RunConfig> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path)?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = args.seed {
        cfg.run.seed = seed;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();

    if let Ok(raw) = std::env::var("TWOHOP_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: TWOHOP_THREADS must be a positive integer, got \"{raw}\"");
                return ExitCode::from(2);
            }
        }
    }

    let cfg = match load(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = match args.command {
        Command::VerifyBounds => run_verify_bounds(&cfg, &mut out),
        Command::VerifyTheory => run_verify_theory(&cfg, &mut out),
        Command::Sweep => run_sweep(&cfg, &mut out),
        Command::Decide => run_decide(&cfg, &mut out),
    };
    if let Err(e) = out.flush() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
