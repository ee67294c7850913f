//! `rfveil-lab <experiment> --config <path> [--seed S] [--out DIR]`
//!
//! Exit status: 0 on success, 2 on usage or configuration errors, 3 when an
//! experiment fails at runtime.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rfveil::experiments::{self, Config, Experiment};
use rfveil::Error;

#[derive(Debug, Parser)]
#[command(name = "rfveil-lab", version, about = "Run fingerprinting and obfuscation experiments")]
struct Args {
    /// naive-mae, rfveil-mae, throughput, impersonation, tracking or crb
    experiment: String,

    /// Flat key = value configuration file.
    #[arg(long)]
    config: PathBuf,

    /// Root seed; overrides `seed` from the config file.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory for CSV files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn load(args: &Args) -> Result<(Experiment, Config), Error> {
    let experiment: Experiment = args.experiment.parse()?;
    let text = fs::read_to_string(&args.config).map_err(|e| Error::Config {
        field: "config".into(),
        message: format!("cannot read {}: {e}", args.config.display()),
    })?;
    let mut cfg = Config::parse(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    experiments::validate(experiment, &cfg)?;
    Ok((experiment, cfg))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (experiment, cfg) = match load(&args) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("rfveil-lab: {e}");
            return ExitCode::from(2);
        }
    };
    let result = fs::create_dir_all(&args.out)
        .map_err(Error::from)
        .and_then(|_| experiments::run(experiment, &cfg))
        .and_then(|tables| {
            tables
                .iter()
                .map(|t| t.write_to(&args.out))
                .collect::<Result<Vec<_>, _>>()
        });
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(Error::Config { field, message }) => {
            eprintln!("rfveil-lab: config error in `{field}`: {message}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("rfveil-lab: {experiment} failed: {e}");
            ExitCode::from(3)
        }
    }
}
