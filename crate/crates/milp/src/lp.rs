//! Public LP entry points.

use crate::problem::MilpProblem;
use crate::simplex::{self, LpModel, LpResult, LpStatus};
use crate::solution::{MilpSolution, SolveStatus};

/// Dual information of an optimal LP, in the convention of the internal
/// minimization (a maximization is solved as `min -c.x`).
#[derive(Debug, Clone, PartialEq)]
pub struct LpDuals {
    pub row_duals: Vec<f64>,
    /// Reduced costs of structural variables followed by row logicals.
    pub reduced_costs: Vec<f64>,
    /// Weak-duality bound in the sense of the problem: an upper bound on
    /// the optimum of a maximization, a lower bound for a minimization.
    pub dual_bound: f64,
}

pub(crate) fn to_status(s: LpStatus) -> SolveStatus {
    match s {
        LpStatus::Optimal => SolveStatus::Optimal,
        LpStatus::Infeasible => SolveStatus::Infeasible,
        LpStatus::Unbounded => SolveStatus::Unbounded,
        LpStatus::NumericalFailure => SolveStatus::NumericalFailure,
    }
}

pub(crate) fn lp_solution(n: usize, r: &LpResult) -> MilpSolution {
    match r.status {
        LpStatus::Optimal => MilpSolution {
            status: SolveStatus::Optimal,
            values: r.x[..n].to_vec(),
            objective: r.objective,
            gap: 0.0,
            nodes_explored: 1,
            incumbent_history: vec![r.objective],
        },
        other => MilpSolution::without_point(to_status(other), 1),
    }
}

/// Solve the continuous relaxation of `p` (binaries treated as `[0, 1]`).
pub fn solve_lp(p: &MilpProblem) -> MilpSolution {
    solve_lp_with_duals(p).0
}

pub fn solve_lp_with_duals(p: &MilpProblem) -> (MilpSolution, Option<LpDuals>) {
    let model = LpModel::from_problem(p);
    let r = simplex::solve(&model);
    log::trace!("lp finished {:?} after {} iterations", r.status, r.iterations);
    let sol = lp_solution(model.n, &r);
    if r.status != LpStatus::Optimal {
        return (sol, None);
    }
    let g = simplex::dual_bound(&model, &model.lower, &model.upper, &r.d);
    let sign = match p.sense {
        crate::ObjectiveSense::Minimize => 1.0,
        crate::ObjectiveSense::Maximize => -1.0,
    };
    let duals = LpDuals {
        row_duals: r.y.clone(),
        reduced_costs: r.d.clone(),
        dual_bound: sign * g,
    };
    (sol, Some(duals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::*;

    #[test]
    fn max_x_with_cap() {
        let p = build_problem(
            vec![Variable::continuous(0, 0.0, 10.0, "x")],
            vec![LinearConstraint::new(vec![(0, 1.0)], ConstraintSense::Le, 3.0, "cap")],
            vec![(0, 1.0)],
            ObjectiveSense::Maximize,
        )
        .unwrap();
        let s = solve_lp(&p);
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.values[0] - 3.0).abs() < 1e-9);
        assert!((s.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn max_x_plus_y_any_vertex() {
        let p = build_problem(
            vec![
                Variable::continuous(0, 0.0, 1.0, "x"),
                Variable::continuous(1, 0.0, 1.0, "y"),
            ],
            vec![LinearConstraint::new(
                vec![(0, 1.0), (1, 1.0)],
                ConstraintSense::Le,
                1.0,
                "sum",
            )],
            vec![(0, 1.0), (1, 1.0)],
            ObjectiveSense::Maximize,
        )
        .unwrap();
        let s = solve_lp(&p);
        assert!((s.objective - 1.0).abs() < 1e-9);
        assert!(p.max_violation(&s.values) < 1e-9);
    }

    #[test]
    fn dual_bound_is_tight_at_optimum() {
        let p = build_problem(
            vec![
                Variable::continuous(0, 0.0, 4.0, "x"),
                Variable::continuous(1, 0.0, f64::INFINITY, "y"),
            ],
            vec![
                LinearConstraint::new(vec![(0, 1.0), (1, 2.0)], ConstraintSense::Le, 6.0, "a"),
                LinearConstraint::new(vec![(0, 3.0), (1, 1.0)], ConstraintSense::Le, 9.0, "b"),
            ],
            vec![(0, 2.0), (1, 3.0)],
            ObjectiveSense::Maximize,
        )
        .unwrap();
        let (s, d) = solve_lp_with_duals(&p);
        let d = d.unwrap();
        assert!(s.objective <= d.dual_bound + 1e-9);
        assert!((s.objective - d.dual_bound).abs() < 1e-7);
    }
}
