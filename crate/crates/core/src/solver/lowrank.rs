use std::collections::VecDeque;

use nalgebra::DMatrix;

use super::phi::{Multipliers, PenaltyModel};
use super::SolverConfig;
use crate::projection::FaceProjector;
use crate::{Error, Result};

/// Barzilai-Borwein state carried across low-rank phases.
#[derive(Clone, Debug, Default)]
pub struct StepMemory {
    pub t: Option<f64>,
    pub parity: usize,
}

pub struct LowRankOutcome {
    pub r: DMatrix<f64>,
    pub value: f64,
    pub initial_value: f64,
    /// `||J grad f_r(R)||` at the returned factor.
    pub grad_norm: f64,
    /// `grad_norm / (1 + |L_sigma|)`, the quantity compared against `stop_tol`.
    pub rel_grad_norm: f64,
    pub steps: usize,
    pub stationary: bool,
}

/// Relative violation `||A R|| / (1 + ||A|| ||R||)`.
pub fn ar_violation(fp: &FaceProjector, r: &DMatrix<f64>) -> f64 {
    if fp.rows() == 0 {
        return 0.0;
    }
    (fp.a() * r).norm() / (1.0 + fp.a().norm() * r.norm())
}

fn factor_gradient(
    model: &PenaltyModel,
    m: &Multipliers,
    sigma: f64,
    fp: &FaceProjector,
    r: &DMatrix<f64>,
) -> Result<(f64, DMatrix<f64>)> {
    let x = r * r.transpose();
    let e = model.eval(&x, m, sigma)?;
    if !e.value.is_finite() {
        return Err(Error::Numerical(
            "augmented Lagrangian became non-finite in the low-rank phase".into(),
        ));
    }
    let g = fp.apply(&(e.grad * r * 2.0));
    Ok((e.value, g))
}

/// Projected gradient on `min { phi(R R^T) : A R = 0 }` with BB steps and a nonmonotone line search.
///
/// Stops when `||J grad f_r|| / (1 + |L_sigma|) <= stop_tol` or after the configured step budget, and
/// returns the best factor visited, so the output value never exceeds the input value.
#[allow(clippy::too_many_arguments)]
pub fn lowrank_phase(
    r0: &DMatrix<f64>,
    model: &PenaltyModel,
    m: &Multipliers,
    sigma: f64,
    fp: &FaceProjector,
    config: &SolverConfig,
    mem: &mut StepMemory,
    stop_tol: f64,
) -> Result<LowRankOutcome> {
    if ar_violation(fp, r0) > 1e-10 {
        return Err(Error::Precondition(format!(
            "low-rank phase started off the face: relative ||AR|| = {:.3e}",
            ar_violation(fp, r0)
        )));
    }
    let mut r = r0.clone();
    let (mut f, mut d) = factor_gradient(model, m, sigma, fp, &r)?;
    let initial_value = f;
    // phi carries the constant (|y|^2 + |W|^2 + sum |W_j|^2) / (2 sigma); the stopping test is
    // relative to the augmented Lagrangian value without it
    let offset = m.constant_term(sigma);
    let mut history: VecDeque<f64> = VecDeque::from([f]);
    let mut best = (r.clone(), f, d.norm());
    let mut steps = 0;
    let mut stationary = false;
    while steps < config.max_pg_per_subproblem {
        let gn = d.norm();
        if gn / (1.0 + (f - offset).abs()) <= stop_tol {
            stationary = true;
            break;
        }
        if f < config.unbounded_threshold * 1e4 {
            break;
        }
        let mut t = mem
            .t
            .unwrap_or_else(|| 0.1 * r.norm().max(1e-3) / gn)
            .clamp(config.bb_min, config.bb_max);
        let fref = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gn2 = gn * gn;
        let mut accepted = None;
        for _ in 0..60 {
            let rn = &r - &d * t;
            let (fnew, dn) = factor_gradient(model, m, sigma, fp, &rn)?;
            if fnew <= fref - 1e-4 * t * gn2 {
                accepted = Some((rn, fnew, dn));
                break;
            }
            t *= config.ls_shrink;
            if t < 1e-300 {
                break;
            }
        }
        let Some((rn, fnew, dn)) = accepted else {
            // no decrease available along the projected gradient at machine precision
            stationary = true;
            break;
        };
        steps += 1;
        let s = &rn - &r;
        let yv = &dn - &d;
        let sy = s.dot(&yv);
        let next = if sy > 0.0 {
            if mem.parity % 2 == 0 {
                s.norm_squared() / sy
            } else {
                sy / yv.norm_squared()
            }
        } else {
            2.0 * t
        };
        mem.parity += 1;
        mem.t = Some(next.clamp(config.bb_min, config.bb_max));
        r = rn;
        f = fnew;
        d = dn;
        history.push_back(f);
        if history.len() > config.ls_window {
            history.pop_front();
        }
        if f < best.1 {
            best = (r.clone(), f, d.norm());
        }
    }
    if stationary && f <= best.1 {
        best = (r, f, d.norm());
    }
    Ok(LowRankOutcome {
        r: best.0,
        value: best.1,
        initial_value,
        grad_norm: best.2,
        rel_grad_norm: best.2 / (1.0 + (best.1 - offset).abs()),
        steps,
        stationary,
    })
}
