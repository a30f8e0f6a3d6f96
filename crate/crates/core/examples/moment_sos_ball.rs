//! Moment-SOS relaxation of a random quartic on the unit disk. The inequality keeps its own
//! localizing psd block instead of being turned into a slack variable.
//!
//! cargo run --release --example moment_sos_ball -- [seed]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rpop::monomial::{exponents_up_to, Polynomial};
use rpop::relax::{build_moment_sos, Domain, PolynomialProgram};
use rpop::rng::standard_normal;
use rpop::solver::{solve_moment, SolverConfig};

fn main() -> rpop::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(1);
    let n = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = Polynomial::zero(n);
    for e in exponents_up_to(n, 4) {
        f.add_term(e.0, standard_normal(&mut rng));
    }
    let mut ball = Polynomial::constant(n, 1.0);
    for i in 0..n {
        ball = ball.sub(&Polynomial::var(n, i).pow(2));
    }
    let pop = PolynomialProgram::new(f, Domain::Free).with_inequality(ball);

    for order in [2, 3] {
        let relax = build_moment_sos(&pop, order, false)?;
        let res = solve_moment(&relax, &SolverConfig::default())?;
        let r = &res.report;
        println!(
            "order {order}: N = {}, localizer block {}x{}, {} objective {:.6}, Rmax {:.2e}, rank {}",
            relax.relax.dim(),
            relax.localizers[0].out_dim(),
            relax.localizers[0].out_dim(),
            r.reason.as_str(),
            r.objective,
            r.residuals.rmax,
            r.rank
        );
    }

    // a polar grid over the disk gives an upper bound on the true minimum
    let mut best = f64::INFINITY;
    for i in 0..=400 {
        for j in 0..720 {
            let (r, t) = (i as f64 / 400.0, j as f64 * std::f64::consts::PI / 360.0);
            best = best.min(pop.objective.evaluate(&[r * t.cos(), r * t.sin()]));
        }
    }
    println!("grid upper bound {best:.6}");
    Ok(())
}
