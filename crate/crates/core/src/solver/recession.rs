use nalgebra::{DMatrix, DVector};

use super::alm::run;
use super::{SolverConfig, TerminationReason};
use crate::relax::builder::independent_rows;
use crate::relax::{Localizer, RelaxationProblem};
use crate::sparse::SymSparse;
use crate::Result;

/// Recession cone of the relaxation, cut by `tr(D) = 1`.
///
/// `D` keeps every homogeneous constraint of the original (face, consistency, sign, `Q(D) = 0`,
/// localizers) and loses the normalization; a psd `D` with `D_{e1,e1} = 0` has a zero `e1` row,
/// which becomes one more facial row.
pub fn recession_problem(problem: &RelaxationProblem) -> RelaxationProblem {
    let n = problem.dim();
    let mut rows: Vec<DVector<f64>> = problem.a.row_iter().map(|r| r.transpose()).collect();
    let mut e1 = DVector::zeros(n);
    e1[problem.basis.e1_index()] = 1.0;
    rows.push(e1);
    let mut qeq = problem.qeq.clone();
    qeq.push(SymSparse::from_triplets(n, (0..n).map(|i| (i, i, 1.0))));
    let mut b = vec![0.0; problem.qeq.len()];
    b.push(1.0);
    RelaxationProblem {
        basis: problem.basis.clone(),
        q0: problem.q0.clone(),
        a: independent_rows(rows, n),
        qeq,
        b,
        blocks: problem.blocks.clone(),
        nonneg: problem.nonneg,
        normalize: false,
    }
}

/// Optimal value of the recession problem when it is solved and negative enough to certify that the
/// relaxation is unbounded below (given that it is feasible).
pub fn certify_unbounded(
    problem: &RelaxationProblem,
    localizers: &[Localizer],
    config: &SolverConfig,
) -> Result<Option<f64>> {
    let ray = recession_problem(problem);
    let cfg = SolverConfig {
        trace: false,
        ..config.clone()
    };
    let res = run(&ray, localizers, &cfg, false)?;
    let scale = 1.0 + DMatrix::norm(&problem.q0.to_dense());
    let value = res.report.objective;
    let certified =
        res.report.reason == TerminationReason::Converged && value < -config.ray_tol * scale;
    Ok(certified.then_some(value))
}
