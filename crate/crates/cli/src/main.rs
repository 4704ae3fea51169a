use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use qrf_core::report::{emit, Format};
use qrf_core::scenario::{list_scenarios, resolve};
use qrf_core::suite::{run, RunConfig};

/// Verify operator-valued integration and relativization properties on
/// finite quantum reference frames.
#[derive(Parser)]
#[command(name = "qrf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check on a scenario.
    Run {
        /// Built-in scenario name, or `file:<path>` for a JSON scenario.
        #[arg(long)]
        scenario: String,
        /// Base tolerance for checks without a pinned tolerance [default: 1e-9].
        #[arg(long)]
        tol: Option<f64>,
        /// RNG seed [default: 0].
        #[arg(long)]
        seed: Option<u64>,
        /// Random trials per property [default: 100].
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value = "text")]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List built-in scenarios.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> anyhow::Result<bool> {
    match command {
        Command::List => {
            for (name, description) in list_scenarios() {
                println!("{name:<24} {description}");
            }
            Ok(true)
        }
        Command::Run {
            scenario,
            tol,
            seed,
            trials,
            format,
            out,
        } => {
            if let Some(t) = tol {
                anyhow::ensure!(t.is_finite() && t > 0.0, "--tol must be a positive number");
            }
            let s = resolve(&scenario).with_context(|| format!("loading scenario `{scenario}`"))?;
            let cfg = RunConfig::resolve(&s, seed, trials, tol);
            let report = run(&s, &cfg);
            let text = emit(&report, format)?;
            match out {
                Some(path) => {
                    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?
                }
                None => std::io::stdout().write_all(text.as_bytes())?,
            }
            Ok(report.pass)
        }
    }
}
