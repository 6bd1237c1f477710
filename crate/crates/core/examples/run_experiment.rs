//! Drives a full experiment from a TOML config, the same way the
//! `olp-lab run` subcommand does.
//!
//! `cargo run --release --example run_experiment -- configs/sinusoidal.toml /tmp/olp-out`

use olp_lab::cli::cmd_run;
use std::path::PathBuf;

fn main() {
    let mut args = std::env::args().skip(1);
    let config = PathBuf::from(args.next().unwrap_or_else(|| "configs/quick.toml".into()));
    let outputs = args.next().map(PathBuf::from);
    match cmd_run(&config, None, outputs.as_deref()) {
        Ok(summary) => {
            println!("{} threads", summary.threads);
            for f in summary.files {
                println!("wrote {}", f.display());
            }
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
