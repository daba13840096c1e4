//! Loads a scenario file and prints the summary CSV without writing files.
//!
//! `cargo run --release --example run_scenario -- scenarios/self_test.json`

use nevlab::scenario::{run_scenario, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "scenarios/self_test.json".into());
    let sc = Scenario::from_json(&std::fs::read_to_string(&path)?)?;
    let summary = run_scenario(&sc)?;
    print!("{}", summary.to_csv());
    println!("status {}", summary.status());
    Ok(())
}
