//! Command-line driver: `run`, `list` and `alpha`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::{NevError, Result};
use crate::quadrature::init_thread_pool;
use crate::scenario::{registry_table, run_scenario, write_outputs, Scenario, SetSpec};

#[derive(Debug, Parser)]
#[command(name = "nevlab", version, about = "Numerical checks of weighted Blaschke-type conditions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every check of a scenario file and write reports.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Double the grids this many times and extend the s window.
        #[arg(long, default_value_t = 0)]
        refine: u32,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print every registered id with the statement it checks.
    List,
    /// Estimate the Ahern–Clark type of a boundary set.
    Alpha {
        arcset: PathBuf,
        #[arg(long, default_value_t = 3)]
        nmin: i32,
        #[arg(long, default_value_t = 12)]
        nmax: i32,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| NevError::InvalidInput(format!("{}: {e}", path.display())))
}

/// Prefixes serde errors with the file so that `file:line:col` is clickable.
fn anchored(path: &Path, err: NevError) -> String {
    match &err {
        NevError::Json(j) => format!("{}:{}:{}: {j}", path.display(), j.line(), j.column()),
        _ => format!("{}: {err}", path.display()),
    }
}

/// Loads and validates a scenario file.
pub fn load_scenario(path: &Path) -> std::result::Result<Scenario, String> {
    let text = read(path).map_err(|e| e.to_string())?;
    Scenario::from_json(&text).map_err(|e| anchored(path, e))
}

/// Runs the parsed command and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    init_thread_pool();
    match cli.command {
        Command::List => {
            print!("{}", registry_table());
            0
        }
        Command::Alpha { arcset, nmin, nmax } => {
            let res = read(&arcset)
                .and_then(|t| Ok(serde_json::from_str::<SetSpec>(&t)?))
                .map_err(|e| anchored(&arcset, e))
                .and_then(|spec| spec.build().map_err(|e| anchored(&arcset, e)))
                .and_then(|e| e.estimate_alpha(nmin, nmax).map_err(|e| e.to_string()));
            match res {
                Ok(profile) => {
                    print!("{}", profile.to_csv());
                    println!("alpha_hat,{:.6}", profile.alpha_hat);
                    if profile.is_degenerate() {
                        println!("fit,degenerate");
                    }
                    0
                }
                Err(msg) => {
                    eprintln!("error: {msg}");
                    1
                }
            }
        }
        Command::Run { scenario, out, refine, seed } => {
            let mut sc = match load_scenario(&scenario) {
                Ok(sc) => sc.refined(refine),
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return 1;
                }
            };
            if let Some(s) = seed {
                sc.seed = s;
            }
            let summary = match run_scenario(&sc) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {}", anchored(&scenario, e));
                    return 1;
                }
            };
            if let Err(e) = write_outputs(&summary, &out) {
                eprintln!("error: {}: {e}", out.display());
                return 1;
            }
            for o in &summary.outcomes {
                match &o.error {
                    Some(msg) => println!("{:<11} {} ({msg})", o.check_id, o.status),
                    None => println!("{:<11} {}", o.check_id, o.status),
                }
            }
            summary.exit_code()
        }
    }
}

pub fn main() -> i32 {
    execute(Cli::parse())
}
