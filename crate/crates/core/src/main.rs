//! Thin command-line front end over the library: `run`, `sweep`, `compare`,
//! and `plot`. Exit codes: 0 success, 1 config error, 2 runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ergoswarm::{plot, runner};

#[derive(Parser)]
#[command(
    name = "ergoswarm",
    about = "Decentralized multi-agent ergodic coverage simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the runs described by a config file, one per seed.
    Run {
        /// Experiment config (TOML).
        config: PathBuf,
    },
    /// Run the cross product of one swept parameter and the config's seeds.
    Sweep {
        /// Experiment config (TOML).
        config: PathBuf,
        /// Parameter to sweep: tau_gp, tau_p, tau, r_comm, r_sense, agents, beta.
        #[arg(long)]
        axis: String,
        /// Comma-separated values, e.g. `10,100,500` or `1,5,global`.
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
    },
    /// Run the ergodic and greedy planners on identical worlds and seeds.
    Compare {
        /// Experiment config (TOML).
        config: PathBuf,
    },
    /// Render SVG charts for one run directory.
    Plot {
        /// A directory written by `run`, `sweep`, or `compare`.
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config } => runner::cmd_run(config).map(|dirs| {
            for d in dirs {
                println!("{}", d.display());
            }
        }),
        Command::Sweep {
            config,
            axis,
            values,
        } => runner::cmd_sweep(config, axis, values).map(|p| println!("{}", p.display())),
        Command::Compare { config } => {
            runner::cmd_compare(config).map(|p| println!("{}", p.display()))
        }
        Command::Plot { dir } => plot::cmd_plot(dir).map(|files| {
            for f in files {
                println!("{}", f.display());
            }
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            let kind = if code == 1 { "config" } else { "runtime" };
            eprintln!(
                "{}",
                serde_json::json!({ "error": e.to_string(), "kind": kind })
            );
            ExitCode::from(code as u8)
        }
    }
}
