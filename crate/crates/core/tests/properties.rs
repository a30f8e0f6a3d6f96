mod common;

use proptest::prelude::*;
use rpop::relax::build_moment_sos;
use rpop::solver::{solve_moment, SolverConfig, TerminationReason};

use common::{ball_quartic, gradient_errors, traced_runs};

#[test]
fn gradients_match_central_differences() {
    for seed in 0..5 {
        let (plain, moment) = gradient_errors(seed);
        assert!(plain <= 1e-5, "seed {seed}: phi gradient error {plain:.3e}");
        assert!(
            moment <= 1e-5,
            "seed {seed}: moment gradient error {moment:.3e}"
        );
    }
}

#[test]
fn ball_quartic_moment_relaxation_converges() {
    let p = build_moment_sos(&ball_quartic(2, 4), 2, false).unwrap();
    let res = solve_moment(&p, &SolverConfig::default()).unwrap();
    assert_eq!(res.report.reason, TerminationReason::Converged);
    assert_eq!(res.solution.localizer_blocks.len(), 1);
    let lmin = res.solution.localizer_blocks[0]
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .min();
    assert!(lmin >= -1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn solver_invariants_hold_along_every_run(seed in 0u64..1_000_000) {
        let s = traced_runs(seed..seed + 1);
        prop_assert!(s.max_ar <= 1e-10, "AR = {:.3e}", s.max_ar);
        prop_assert_eq!(s.lowrank_violations, 0);
        prop_assert_eq!(s.lift_violations, 0);
        prop_assert!(s.max_dual_identity <= 1e-10, "dual identity {:.3e}", s.max_dual_identity);
    }
}
