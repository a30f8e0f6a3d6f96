use nalgebra::{DMatrix, DVector};

use super::phi::{Multipliers, PenaltyModel, PhiEval};
use super::SolverConfig;
use crate::projection::{project_psd_full, FaceProjector};
use crate::Result;

pub struct LiftOutcome {
    pub x: DMatrix<f64>,
    pub r: DMatrix<f64>,
    /// `phi` at the lifted point, with its gradient and auxiliary blocks.
    pub eval: PhiEval,
    /// `phi(R R^T)` before the step.
    pub value_before: f64,
    pub t: f64,
    /// False when the step size fell below `t_min` without passing the acceptance test; `x` is then the input point.
    pub accepted: bool,
    /// `||X_new - X_hat|| / t`.
    pub step_norm: f64,
    /// Eigenvalues of `J G J`, i.e. of `x` before clamping.
    pub eigenvalues: DVector<f64>,
}

/// One projected-gradient step on the convex subproblem from `X_hat = R R^T`, then refactorization.
pub fn lifting_step(
    r: &DMatrix<f64>,
    model: &PenaltyModel,
    m: &Multipliers,
    sigma: f64,
    fp: &FaceProjector,
    config: &SolverConfig,
) -> Result<LiftOutcome> {
    let xhat = r * r.transpose();
    let ehat = model.eval(&xhat, m, sigma)?;
    let mut t = 1.0 / sigma;
    loop {
        let g = &xhat - &ehat.grad * t;
        let jgj = fp.apply_sym(&g);
        let p = project_psd_full(&jgj, config.keep_threshold)?;
        let diff = &p.x - &xhat;
        let e = model.eval(&p.x, m, sigma)?;
        let bound = ehat.value + ehat.grad.dot(&diff) + config.delta / t * diff.norm_squared();
        let slack = 1e-12 * (1.0 + ehat.value.abs());
        if e.value <= bound + slack {
            let step_norm = diff.norm() / t;
            let rn = fp.apply(&p.factor);
            return Ok(LiftOutcome {
                x: p.x,
                r: rn,
                eval: e,
                value_before: ehat.value,
                t,
                accepted: true,
                step_norm,
                eigenvalues: p.eigenvalues,
            });
        }
        t *= 0.5;
        if t < config.t_min {
            return Ok(LiftOutcome {
                x: xhat,
                r: r.clone(),
                value_before: ehat.value,
                eval: ehat,
                t,
                accepted: false,
                step_norm: 0.0,
                eigenvalues: DVector::zeros(0),
            });
        }
    }
}
