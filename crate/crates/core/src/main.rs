use clap::{Parser, Subcommand, ValueEnum};
use olp_lab::analysis::FitModel;
use olp_lab::cli::{cmd_fit, cmd_run, cmd_validate, CliError};
use std::path::PathBuf;
use std::process::ExitCode;

/// Online linear programming experiments: single-sample dual re-solving
/// under nonstationary order streams.
#[derive(Parser)]
#[command(name = "olp-lab", version)]
struct Cli {
    /// Worker threads (overrides OLP_LAB_THREADS; default: logical cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a TOML config or a run_manifest.json.
    Run {
        config: PathBuf,
        /// Write artifacts here instead of the configured directory.
        #[arg(long)]
        outputs: Option<PathBuf>,
    },
    /// Check the generator's regularity bounds and cross-check the solvers.
    Validate {
        config: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Fit a scaling law to the mean regret in a regret.csv.
    Fit {
        csv: PathBuf,
        #[arg(long, value_enum)]
        model: Model,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Power,
    Polylog,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<(), CliError> = match cli.command {
        Command::Run { config, outputs } => cmd_run(&config, cli.threads, outputs.as_deref()).map(|s| {
            for f in &s.files {
                println!("wrote {}", f.display());
            }
        }),
        Command::Validate { config, json } => cmd_validate(&config).map(|r| {
            if json {
                println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
            } else {
                print!("{}", r.render());
            }
        }),
        Command::Fit { csv, model } => {
            let model = match model {
                Model::Power => FitModel::PowerLawN,
                Model::Polylog => FitModel::Polylog,
            };
            cmd_fit(&csv, model).map(|json| println!("{json}"))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("olp-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
