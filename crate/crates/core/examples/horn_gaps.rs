//! Relative gaps of the four relaxations on the extended Horn matrix (n = 21), whose copositive
//! program has value 0.
//!
//! cargo run --release --example horn_gaps -- [max_order] [time_limit_seconds]

use rpop::harness::{render_table, reproduce_table, OutputFormat, TableConfig, TableName};
use rpop::solver::SolverConfig;

fn main() -> rpop::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let max_order = args.first().and_then(|a| a.parse().ok()).unwrap_or(1);
    let time_limit = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(1800.0);
    let cfg = TableConfig {
        solver: SolverConfig {
            time_limit,
            ..SolverConfig::default()
        },
        max_order,
        ..TableConfig::default()
    };
    let table = reproduce_table(TableName::HornGaps, &cfg)?;
    print!("{}", render_table(&table, OutputFormat::Csv)?);
    println!("all rows within tolerance: {}", table.pass);
    Ok(())
}
