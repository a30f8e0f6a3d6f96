//! Relaxation builders.

pub mod blocks;
pub mod builder;
pub mod moment;
pub mod program;

pub use blocks::ConsistencyBlocks;
pub use builder::{
    build_facial_rows, build_polyhedral_sdp, generate_redundant_equalities, lift_polynomial,
    problem_to_json, ProblemJson, RelaxationProblem,
};
pub use moment::{adjoint_localizer, apply_localizer, build_moment_sos, Localizer, MomentProblem};
pub use program::{
    eliminate_inequalities, reformulate_slack, reformulate_squared_slack, Domain, InstanceFile,
    PolynomialProgram,
};
