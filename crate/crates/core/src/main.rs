use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use dislac::runner::{run_experiment, ExperimentName, ExperimentSpec, RunnerError};

#[derive(Parser)]
#[command(
    name = "dislac",
    version,
    about = "Cooperative LEO multi-satellite communication and sensing experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a TOML or JSON config (or a run manifest).
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `master_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `threads`.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List experiments and their parameters with defaults.
    List,
}

fn run(
    config: PathBuf,
    seed: Option<u64>,
    out: Option<PathBuf>,
    threads: Option<usize>,
) -> Result<(), RunnerError> {
    let text = fs::read_to_string(&config).map_err(|source| RunnerError::Io {
        path: config.display().to_string(),
        source,
    })?;
    let mut spec = ExperimentSpec::parse(&text)?;
    if let Some(s) = seed {
        spec.master_seed = s;
    }
    if let Some(o) = out {
        spec.output_dir = o;
    }
    if let Some(t) = threads {
        if t == 0 {
            return Err(RunnerError::InvalidParameter {
                path: "threads".into(),
                message: "must be >= 1".into(),
            });
        }
        spec.threads = Some(t);
    }
    let manifest = run_experiment(&spec)?;
    let summary = json!({
        "experiment": spec.name.as_str(),
        "manifest": manifest.path(),
        "artifacts": manifest.artifact_paths(),
        "duration_s": manifest.duration_s,
    });
    println!("{summary}");
    Ok(())
}

fn list() -> io::Result<()> {
    let mut out = io::stdout().lock();
    for e in ExperimentName::ALL {
        writeln!(out, "{}: {}", e.as_str(), e.description())?;
        if let serde_json::Value::Object(params) = e.default_parameters() {
            for (k, v) in params {
                writeln!(out, "  {k} = {v}")?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            seed,
            out,
            threads,
        } => run(config, seed, out, threads),
        Command::List => {
            // A closed pipe (`dislac list | head`) is not an error.
            let _ = list();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.code(), "message": e.to_string() }));
            ExitCode::FAILURE
        }
    }
}
