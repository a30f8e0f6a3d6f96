//! Lift a three-variable program by hand-checkable steps, then solve its first-order relaxation.
//!
//! min w1^2 + 4 w1 - w3^2  s.t.  (w2 + w3 - 1)^2 = 0,  4 - 4 w1 - 3 w2 + w1^2 + 2 w1 w2 = 0,  w >= 0

use rpop::monomial::Polynomial;
use rpop::relax::{build_polyhedral_sdp, Domain, PolynomialProgram};
use rpop::solver::{solve, SolverConfig};

fn main() -> rpop::Result<()> {
    let p = |t: Vec<(Vec<u32>, f64)>| Polynomial::from_terms(3, t);
    let objective = p(vec![
        (vec![2, 0, 0], 1.0),
        (vec![1, 0, 0], 4.0),
        (vec![0, 0, 2], -1.0),
    ])?;
    let line = p(vec![
        (vec![0, 1, 0], 1.0),
        (vec![0, 0, 1], 1.0),
        (vec![0, 0, 0], -1.0),
    ])?;
    let curve = p(vec![
        (vec![0, 0, 0], 4.0),
        (vec![1, 0, 0], -4.0),
        (vec![0, 1, 0], -3.0),
        (vec![2, 0, 0], 1.0),
        (vec![1, 1, 0], 2.0),
    ])?;
    let pop = PolynomialProgram::new(objective, Domain::Nonnegative)
        .with_equality(line.pow(2))
        .with_equality(curve);

    let relax = build_polyhedral_sdp(&pop, 1, true)?;
    println!("basis (x0, w1, w2, w3), N = {}", relax.dim());
    println!("Q0 = {}", relax.q0.to_dense());
    println!("facial row A = {}", relax.a);
    println!("general equality Q2 = {}", relax.qeq[0].to_dense());

    // the squared line constraint became the facial row, so only one general equality remains
    let res = solve(&relax, &SolverConfig::default())?;
    let r = &res.report;
    println!(
        "{}: objective {:.6}, Rp {:.2e}, Rd {:.2e}, Rc {:.2e}, rank {}",
        r.reason.as_str(),
        r.objective,
        r.residuals.rp,
        r.residuals.rd,
        r.residuals.rc,
        r.rank
    );
    println!(
        "iterations (ALM, PG, lift) = ({}, {}, {})",
        r.alm_iters, r.pg_iters, r.lift_iters
    );

    let x = relax.rank_one_point(&[1.0, 1.0, 0.0]);
    println!("value at the lift of w = (1, 1, 0): {}", relax.q0.inner(&x));
    Ok(())
}
