//! Two-phase low-rank augmented Lagrangian solver.

mod alm;
mod dual;
mod lifting;
mod lowrank;
mod phi;
mod recession;

use serde::{Deserialize, Serialize};

pub use alm::{solve, solve_moment, solve_with, Solution, SolveResult};
pub use dual::{dual_recovery, kkt_residuals, KktResiduals};
pub use lifting::{lifting_step, LiftOutcome};
pub use lowrank::{lowrank_phase, LowRankOutcome, StepMemory};
pub use phi::{eval_phi, eval_phi_moment, Multipliers, PenaltyModel, PhiEval};
pub use recession::{certify_unbounded, recession_problem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol: f64,
    /// Seconds.
    pub time_limit: f64,
    pub sigma0: f64,
    /// Initial rank; `None` uses `min(200, ceil(N / 5))`.
    pub rank0: Option<usize>,
    pub max_pg_per_subproblem: usize,
    /// Upper bound on low-rank/lift rounds per ALM iteration.
    pub max_lifts_per_subproblem: usize,
    pub max_outer: usize,
    /// Sufficient-decrease constant of the lifting acceptance test.
    pub delta: f64,
    pub bb_min: f64,
    pub bb_max: f64,
    pub ls_window: usize,
    pub ls_shrink: f64,
    /// Relative eigenvalue threshold for the reported rank.
    pub rank_threshold: f64,
    /// Relative eigenvalue threshold for keeping columns when refactoring after a lift.
    pub keep_threshold: f64,
    pub t_min: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub stagnation_window: usize,
    pub unbounded_threshold: f64,
    /// Objective level below which the recession problem is solved once to test for unboundedness.
    pub ray_trigger: f64,
    /// The recession value must fall below `-ray_tol * (1 + ||Q0||)` to certify unboundedness.
    pub ray_tol: f64,
    pub seed: u64,
    /// Record per-iteration diagnostics.
    pub trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-6,
            time_limit: 3600.0,
            sigma0: 1.0,
            rank0: None,
            max_pg_per_subproblem: 50,
            max_lifts_per_subproblem: 20,
            max_outer: 100_000,
            delta: 0.5,
            bb_min: 1e-10,
            bb_max: 1e10,
            ls_window: 5,
            ls_shrink: 0.5,
            rank_threshold: 1e-6,
            keep_threshold: 1e-12,
            t_min: 1e-8,
            sigma_min: 1e-4,
            sigma_max: 1e8,
            stagnation_window: 50,
            unbounded_threshold: -1e8,
            ray_trigger: -1e3,
            ray_tol: 1e-5,
            seed: 0,
            trace: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> crate::Result<()> {
        let bad = |m: &str| Err(crate::Error::Parameter(m.to_string()));
        if !(self.tol > 0.0) {
            return bad("tol must be positive");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)");
        }
        if !(self.sigma0 > 0.0) {
            return bad("sigma0 must be positive");
        }
        if !(self.ls_shrink > 0.0 && self.ls_shrink < 1.0) {
            return bad("ls_shrink must lie in (0, 1)");
        }
        if self.rank0 == Some(0) {
            return bad("rank0 must be at least 1");
        }
        if self.max_pg_per_subproblem == 0 || self.ls_window == 0 {
            return bad("iteration budgets must be positive");
        }
        Ok(())
    }

    pub fn initial_rank(&self, n: usize) -> usize {
        self.rank0
            .unwrap_or_else(|| n.div_ceil(5).clamp(1, 200))
            .min(n.max(1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    Converged,
    TimeLimit,
    Stagnation,
    Unbounded,
    IterationLimit,
}

impl TerminationReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminationReason::Converged => "converged",
            TerminationReason::TimeLimit => "time_limit",
            TerminationReason::Stagnation => "stagnation",
            TerminationReason::Unbounded => "unbounded",
            TerminationReason::IterationLimit => "iteration_limit",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub objective: f64,
    pub residuals: KktResiduals,
    pub rank: usize,
    pub alm_iters: usize,
    pub pg_iters: usize,
    pub lift_iters: usize,
    pub time_s: f64,
    pub sigma: f64,
    pub reason: TerminationReason,
    /// Value of the recession problem when it certified unboundedness.
    pub recession_value: Option<f64>,
}

/// Per-iteration diagnostics, recorded when `SolverConfig::trace` is set.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Trace {
    /// Largest relative `||A R|| / (1 + ||A|| ||R||)` seen in the low-rank phase.
    pub max_ar: f64,
    /// Low-rank phases whose output value exceeded the input value.
    pub lowrank_violations: usize,
    /// Accepted lifts that violated the sufficient-decrease test or increased `phi`.
    pub lift_violations: usize,
    /// Relative residual of `grad phi - A^T U - U^T A - S` at each outer iteration.
    pub dual_identity: Vec<f64>,
    pub rmax: Vec<f64>,
    pub objective: Vec<f64>,
    pub sigma: Vec<f64>,
    pub rank: Vec<usize>,
}
