use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use noma_mimo::experiment::{run_experiment, Command, ExperimentError, ExperimentSpec, Format, Overrides};
use noma_mimo::PrelogMode;

/// Worker-thread count override.
const WORKERS_ENV: &str = "NOMA_WORKERS";

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Prelog {
    Apply,
    Omit,
}

#[derive(Parser)]
#[command(version, about = "Rate regions and sum rates of NOMA vs orthogonal access in massive MIMO")]
struct Cli {
    /// Experiment to run; defaults to `[experiment] command` in the config.
    command: Option<Command>,
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, value_enum)]
    prelog: Option<Prelog>,
    /// Output formats; repeat or separate with commas. Defaults to csv,json.
    #[arg(long, value_enum, value_delimiter = ',')]
    format: Vec<Format>,
}

fn configure_workers() -> Result<(), ExperimentError> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| ExperimentError::Config(format!("{WORKERS_ENV}={raw} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ExperimentError::Config(format!("{WORKERS_ENV}: {e}")))
}

fn run(cli: &Cli) -> Result<(), ExperimentError> {
    configure_workers()?;
    let overrides = Overrides {
        command: cli.command,
        seed: cli.seed,
        trials: cli.trials,
        prelog: cli.prelog.map(|p| match p {
            Prelog::Apply => PrelogMode::Apply,
            Prelog::Omit => PrelogMode::Omit,
        }),
    };
    let spec = ExperimentSpec::load(&cli.config, cli.out.clone(), cli.format.clone(), &overrides)?;
    let (_, files) = run_experiment(&spec)?;
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = serde_json::to_string_pretty(&e.report()).expect("report serializes");
            eprintln!("{report}");
            if std::fs::create_dir_all(&cli.out).is_ok() {
                let _ = std::fs::write(cli.out.join("error.json"), format!("{report}\n"));
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
