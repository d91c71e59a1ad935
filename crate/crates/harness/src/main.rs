use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use loggas_harness::{replay, run_experiment, schema_text, ExperimentConfig, HarnessError, Kind, OUTPUT_ROOT_ENV};

#[derive(Parser)]
#[command(name = "loggas", version, about = "Log-gas sampling, dynamics and verification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw configurations from a β-ensemble.
    Sample(RunArgs),
    /// Integrate Dyson Brownian motion paths.
    Dbm(RunArgs),
    /// Propagate a delta through a Hessian kernel and check decay.
    Parabolic(RunArgs),
    /// Estimate a spectral statistic.
    Stats(RunArgs),
    /// Run a verification suite.
    Verify(RunArgs),
    /// Re-run a recorded experiment and compare checksums.
    Replay {
        /// Manifest file or the directory holding it.
        manifest: PathBuf,
        #[arg(long, env = OUTPUT_ROOT_ENV, default_value = "loggas-output")]
        output_root: PathBuf,
    },
    /// Print the configuration schema.
    Schema,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's worker count.
    #[arg(long)]
    workers: Option<usize>,
    /// Exit nonzero when the run's acceptance check fails.
    #[arg(long)]
    assert: bool,
    #[arg(long, env = OUTPUT_ROOT_ENV, default_value = "loggas-output")]
    output_root: PathBuf,
}

fn run(kind: Kind, args: RunArgs) -> Result<bool, HarnessError> {
    let text = fs::read_to_string(&args.config).map_err(|e| HarnessError::Io { path: args.config.clone(), source: e })?;
    let mut config = ExperimentConfig::parse(&text, Some(kind))?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(workers) = args.workers {
        config.workers = workers.max(1);
    }
    let record = run_experiment(&config, &args.output_root)?;
    println!("{}", record.dir.display());
    println!("{}", serde_json::to_string_pretty(record.summary())?);
    Ok(!args.assert || record.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => run(Kind::Sample, a),
        Command::Dbm(a) => run(Kind::Dbm, a),
        Command::Parabolic(a) => run(Kind::Parabolic, a),
        Command::Stats(a) => run(Kind::Stats, a),
        Command::Verify(a) => run(Kind::Verify, a),
        Command::Replay { manifest, output_root } => replay(&manifest, &output_root).map(|r| {
            println!("replay matched: {}", r.dir.display());
            true
        }),
        Command::Schema => {
            print!("{}", schema_text());
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("acceptance check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
