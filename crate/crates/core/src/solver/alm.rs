use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dual::{dual_recovery, kkt_residuals, KktResiduals};
use super::lifting::lifting_step;
use super::lowrank::{ar_violation, lowrank_phase, StepMemory};
use super::phi::{Multipliers, PenaltyModel};
use super::recession::certify_unbounded;
use super::{SolveReport, SolverConfig, TerminationReason, Trace};
use crate::projection::{project_psd, symmetric_eigen, FaceProjector};
use crate::relax::{Localizer, MomentProblem, RelaxationProblem};
use crate::rng::standard_normal_matrix;
use crate::Result;

/// Final iterate and multipliers.
#[derive(Clone, Debug)]
pub struct Solution {
    pub x: DMatrix<f64>,
    pub r: DMatrix<f64>,
    /// Polyhedral copy `Y = Π_P(X - W / sigma)`.
    pub y_block: DMatrix<f64>,
    pub y: DVector<f64>,
    pub w: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub u: DMatrix<f64>,
    pub localizer_blocks: Vec<DMatrix<f64>>,
    pub localizer_multipliers: Vec<DMatrix<f64>>,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub report: SolveReport,
    pub solution: Solution,
    pub trace: Option<Trace>,
}

/// Solve a polyhedral-SDP relaxation.
pub fn solve(problem: &RelaxationProblem, config: &SolverConfig) -> Result<SolveResult> {
    solve_with(problem, &[], config)
}

/// Solve a moment-SOS relaxation, keeping each localizing block as its own psd variable.
pub fn solve_moment(problem: &MomentProblem, config: &SolverConfig) -> Result<SolveResult> {
    solve_with(&problem.relax, &problem.localizers, config)
}

/// Count of eigenvalues above `rel * λ_max`.
pub fn numerical_rank(eigenvalues: &DVector<f64>, rel: f64) -> usize {
    let top = eigenvalues.iter().copied().fold(0.0, f64::max);
    if top <= 0.0 {
        return 0;
    }
    eigenvalues.iter().filter(|&&v| v > rel * top).count()
}

fn initial_factor(
    problem: &RelaxationProblem,
    fp: &FaceProjector,
    config: &SolverConfig,
) -> DMatrix<f64> {
    let n = problem.dim();
    let free = (n - fp.rows()).max(1);
    let r0 = config.initial_rank(n).min(free);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let r = fp.apply(&standard_normal_matrix(&mut rng, n, r0));
    let e = problem.basis.e1_index();
    let h = r.row(e).norm_squared();
    if h > 1e-12 {
        r / h.sqrt()
    } else {
        let nrm = r.norm();
        r / nrm
    }
}

pub fn solve_with(
    problem: &RelaxationProblem,
    localizers: &[Localizer],
    config: &SolverConfig,
) -> Result<SolveResult> {
    run(problem, localizers, config, true)
}

pub(crate) fn run(
    problem: &RelaxationProblem,
    localizers: &[Localizer],
    config: &SolverConfig,
    ray_check: bool,
) -> Result<SolveResult> {
    config.validate()?;
    let start = Instant::now();
    let fp = FaceProjector::new(&problem.a)?;
    let model = PenaltyModel::new(problem, localizers);
    let mut trace = config.trace.then(Trace::default);

    let mut r = initial_factor(problem, &fp, config);
    let mut m = Multipliers::zeros(&model);
    let mut sigma = config.sigma0;
    let mut mem = StepMemory::default();
    let (mut pg_iters, mut lift_iters, mut outer) = (0usize, 0usize, 0usize);
    let mut rmax_hist: Vec<f64> = Vec::new();

    let mut x = &r * r.transpose();
    let mut eig = DVector::zeros(0);
    let mut y_block = x.clone();
    let mut s = DMatrix::zeros(problem.dim(), problem.dim());
    let mut u = DMatrix::zeros(fp.rows(), problem.dim());
    let mut yloc: Vec<DMatrix<f64>> = Vec::new();
    let mut res = KktResiduals::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut reason = TerminationReason::IterationLimit;
    let mut ray_pending = ray_check;
    let mut recession_value = None;

    'outer: while outer < config.max_outer {
        if start.elapsed().as_secs_f64() > config.time_limit {
            reason = TerminationReason::TimeLimit;
            break;
        }
        outer += 1;
        let inner_tol = (0.1 * config.tol).max((1e-2 / outer as f64).min(0.1 * res.rmax));

        let mut last = None;
        let mut last_gfr = 0.0;
        for _ in 0..config.max_lifts_per_subproblem {
            let lr = lowrank_phase(&r, &model, &m, sigma, &fp, config, &mut mem, inner_tol)?;
            pg_iters += lr.steps;
            last_gfr = lr.rel_grad_norm;
            if let Some(t) = trace.as_mut() {
                t.max_ar = t.max_ar.max(ar_violation(&fp, &lr.r));
                if lr.value > lr.initial_value {
                    t.lowrank_violations += 1;
                }
            }
            let lift = lifting_step(&lr.r, &model, &m, sigma, &fp, config)?;
            lift_iters += 1;
            if !lift.accepted {
                reason = TerminationReason::Stagnation;
                x = lift.x;
                break 'outer;
            }
            if let Some(t) = trace.as_mut() {
                if lift.eval.value > lift.value_before + 1e-12 * (1.0 + lift.value_before.abs()) {
                    t.lift_violations += 1;
                }
            }
            let lag = lift.eval.value - m.constant_term(sigma);
            let done = lr.stationary && lift.step_norm / (1.0 + lag.abs()) <= inner_tol;
            r = lift.r;
            x = lift.x;
            eig = lift.eigenvalues;
            last = Some(lift.eval);
            if done || start.elapsed().as_secs_f64() > config.time_limit {
                break;
            }
        }
        let ev = last.expect("at least one lift per outer iteration");

        // multiplier updates; the gradient at the old multipliers equals C - Q*(y+) - W+ - sum M*(W_j+)
        let inv = 1.0 / sigma;
        y_block = ev.y;
        m.y -= &ev.qres * sigma;
        m.w -= (&x - &y_block) * sigma;
        yloc.clear();
        for (mx, wj) in ev.mx.iter().zip(m.wloc.iter_mut()) {
            let yj = project_psd(&(mx - &*wj * inv))?;
            *wj -= (mx - &yj) * sigma;
            yloc.push(yj);
        }
        let grad = ev.grad;
        (s, u) = dual_recovery(&grad, &fp);
        let localized: Vec<_> = ev.mx.iter().cloned().zip(yloc.iter().cloned()).collect();
        res = kkt_residuals(&x, &y_block, &s, problem, &localized)?;
        let objective = model.c.dot(&x);

        if let Some(t) = trace.as_mut() {
            let mut id = &grad - &s;
            if fp.rows() > 0 {
                let au = fp.a().transpose() * &u;
                id -= &au + au.transpose();
            }
            t.dual_identity.push(id.norm() / (1.0 + grad.norm()));
            t.rmax.push(res.rmax);
            t.objective.push(objective);
            t.sigma.push(sigma);
            t.rank.push(numerical_rank(&eig, config.rank_threshold));
        }

        if res.rmax < config.tol {
            reason = TerminationReason::Converged;
            break;
        }
        if objective < config.unbounded_threshold && res.rp < 1e-4 {
            reason = TerminationReason::Unbounded;
            break;
        }
        if ray_pending && objective < config.ray_trigger {
            ray_pending = false;
            recession_value = certify_unbounded(problem, localizers, config)?;
            if recession_value.is_some() {
                reason = TerminationReason::Unbounded;
                break;
            }
        }
        rmax_hist.push(res.rmax);
        let w = config.stagnation_window;
        if rmax_hist.len() > w {
            let split = rmax_hist.len() - w;
            let before = rmax_hist[..split]
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            let recent = rmax_hist[split..]
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            if recent > 0.9 * before {
                reason = TerminationReason::Stagnation;
                break;
            }
        }

        sigma = if res.rp >= 10.0 * last_gfr {
            sigma * 2.0
        } else {
            sigma * 0.5
        };
        sigma = sigma.clamp(config.sigma_min, config.sigma_max);
    }

    if eig.is_empty() {
        eig = symmetric_eigen(&x)?.0;
    }
    let report = SolveReport {
        objective: model.c.dot(&x),
        residuals: res,
        rank: numerical_rank(&eig, config.rank_threshold),
        alm_iters: outer,
        pg_iters,
        lift_iters,
        time_s: start.elapsed().as_secs_f64(),
        sigma,
        reason,
        recession_value,
    };
    Ok(SolveResult {
        report,
        solution: Solution {
            x,
            r,
            y_block,
            y: m.y,
            w: m.w,
            s,
            u,
            localizer_blocks: yloc,
            localizer_multipliers: m.wloc,
        },
        trace,
    })
}
