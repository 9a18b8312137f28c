//! Linear and mixed-binary linear programming.
//!
//! LPs are solved with a bounded-variable simplex on a sparse LU basis;
//! MILPs with best-bound branch and bound. A brute-force enumerator is
//! provided as a reference oracle for small instances.

mod bnb;
mod brute;
mod lp;
mod lpformat;
mod lu;
mod problem;
pub mod random;
mod simplex;
mod solution;
mod solver;

pub use bnb::solve_milp;
pub use brute::{brute_force_milp, BruteForceError, BRUTE_FORCE_MAX_BINARIES};
pub use lp::{solve_lp, solve_lp_with_duals, LpDuals};
pub use lpformat::write_lp;
pub use problem::{
    build_problem, ConstraintSense, LinearConstraint, MilpProblem, ObjectiveSense, ProblemBuilder,
    ProblemError, VarId, VarKind, Variable,
};
pub use solution::{
    MilpOptions, MilpSolution, SolveStatus, DEFAULT_GAP_TOL, DEFAULT_INTEGRALITY_TOL,
    FEASIBILITY_TOL,
};
pub use solver::{BranchAndBound, MilpSolver};
