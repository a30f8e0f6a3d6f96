//! Second-order Poly-SDP-RLT relaxation of a binary quadratic program. When the relaxation is
//! tight the solution has rank one and its first column recovers the binary minimizer.
//!
//! cargo run --release --example binary_quadratic -- [n] [seed]

use rpop::instances::{gen_biq, oracle_solve, DEFAULT_BUDGET};
use rpop::relax::build_polyhedral_sdp;
use rpop::solver::{solve, SolverConfig};

fn main() -> rpop::Result<()> {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let n = args.first().copied().unwrap_or(8) as usize;
    let seed = args.get(1).copied().unwrap_or(0);

    let pop = gen_biq(n, seed)?;
    let relax = build_polyhedral_sdp(&pop, 2, true)?;
    println!(
        "N = {}, facial rows = {}, general equalities = {}",
        relax.dim(),
        relax.num_facial_rows(),
        relax.qeq.len()
    );
    let res = solve(&relax, &SolverConfig::default())?;
    let r = &res.report;
    println!(
        "{}: objective {:.6}, rank {}, Rmax {:.2e}",
        r.reason.as_str(),
        r.objective,
        r.rank,
        r.residuals.rmax
    );

    // X[0, 1..=n] holds the first moments E[w_i]
    let e1 = relax.basis.e1_index();
    let w: Vec<f64> = (0..n)
        .map(|i| res.solution.x[(e1, e1 + 1 + i)] / res.solution.x[(e1, e1)])
        .collect();
    let rounded: Vec<f64> = w.iter().map(|v| v.round()).collect();
    println!("first moments: {:.4?}", w);
    println!(
        "rounded point value: {:.6}",
        pop.objective.evaluate(&rounded)
    );

    let oracle = oracle_solve(&pop, DEFAULT_BUDGET)?;
    println!(
        "enumeration: v* = {:.6} at {:?}",
        oracle.vstar, oracle.argmin
    );
    Ok(())
}
