use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ks_collapse::scenario::{self, RunOptions, DEFAULT_MAX_DIM};

/// Run collapse-semantics scenario files.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Also write the JSON report here.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Override every scenario's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the equality tolerance `eq_tol`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Reject matrices larger than this.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_DIM)]
    max_dim: usize,
    /// Only run scenarios whose id contains this string.
    #[arg(long, global = true)]
    cases: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single scenario file.
    Run { path: PathBuf },
    /// Run every scenario in a directory.
    Suite { dir: PathBuf },
}

fn write_json(path: Option<&PathBuf>, body: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| format!("{}: {e}", p.display())),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = RunOptions {
        seed: cli.seed,
        eq_tol: cli.tol,
        max_dim: cli.max_dim,
        cases: cli.cases.clone(),
    };
    let (code, json) = match &cli.command {
        Command::Run { path } => {
            let result = scenario::run_scenario(path, &opts);
            let code = scenario::exit_code(&result);
            match result {
                Ok(report) => {
                    print!("{}", report.render_text());
                    (code, Some(report.to_json()))
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    (code, None)
                }
            }
        }
        Command::Suite { dir } => match scenario::run_suite(dir, &opts) {
            Ok(report) => {
                print!("{}", report.render_text());
                (report.status().exit_code(), Some(report.to_json()))
            }
            Err(e) => {
                eprintln!("error: {e}");
                (2, None)
            }
        },
    };
    if let Some(body) = json {
        if let Err(e) = write_json(cli.json.as_ref(), &body) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code as u8)
}
