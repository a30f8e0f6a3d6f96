//! First-order Poly-SDP-RLT relaxation of random standard quadratic programs, checked against
//! support enumeration.
//!
//! cargo run --release --example stqp_dnn -- [n] [seeds]

use rpop::instances::{gen_stqp_gaussian, oracle_solve, relative_gap, DEFAULT_BUDGET};
use rpop::relax::build_polyhedral_sdp;
use rpop::solver::{solve, SolverConfig};

fn main() -> rpop::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let n = args.first().copied().unwrap_or(10);
    let seeds = args.get(1).copied().unwrap_or(5) as u64;

    println!(
        "{:>4} {:>12} {:>12} {:>9} {:>4} {:>9} {:>7}",
        "seed", "relaxation", "oracle", "gap %", "rank", "Rmax", "time"
    );
    for seed in 0..seeds {
        let pop = gen_stqp_gaussian(n, seed)?;
        let relax = build_polyhedral_sdp(&pop, 1, true)?;
        let r = solve(
            &relax,
            &SolverConfig {
                seed,
                ..SolverConfig::default()
            },
        )?
        .report;
        let oracle = oracle_solve(&pop, DEFAULT_BUDGET).map(|o| o.vstar).ok();
        let gap = oracle.map(|v| relative_gap(v, r.objective));
        println!(
            "{seed:>4} {:>12.6} {:>12} {:>9} {:>4} {:>9.2e} {:>6.2}s",
            r.objective,
            oracle.map_or("-".into(), |v| format!("{v:.6}")),
            gap.map_or("-".into(), |g| format!("{g:.4}")),
            r.rank,
            r.residuals.rmax,
            r.time_s
        );
    }
    Ok(())
}
