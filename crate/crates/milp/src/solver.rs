//! Pluggable solver interface.

use crate::bnb::solve_milp;
use crate::problem::MilpProblem;
use crate::solution::{MilpOptions, MilpSolution};

/// Anything able to solve a [`MilpProblem`]. The restoration model is
/// written against this trait so a different backend can be swapped in.
pub trait MilpSolver {
    fn name(&self) -> &str;
    fn solve(&self, problem: &MilpProblem, options: &MilpOptions) -> MilpSolution;
}

/// The built-in best-bound branch and bound.
#[derive(Debug, Default, Clone, Copy)]
pub struct BranchAndBound;

impl MilpSolver for BranchAndBound {
    fn name(&self) -> &str {
        "branch-and-bound"
    }

    fn solve(&self, problem: &MilpProblem, options: &MilpOptions) -> MilpSolution {
        solve_milp(problem, options)
    }
}
