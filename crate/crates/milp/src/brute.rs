//! Exhaustive enumeration of binary assignments, used as a reference oracle.

use thiserror::Error;

use crate::problem::MilpProblem;
use crate::simplex::{LpModel, LpStatus, Simplex};
use crate::solution::{MilpSolution, SolveStatus};

/// Largest binary count accepted by [`brute_force_milp`].
pub const BRUTE_FORCE_MAX_BINARIES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BruteForceError {
    #[error("{found} binaries exceed the enumeration limit of {limit}")]
    TooManyBinaries { found: usize, limit: usize },
}

/// Solve `p` by fixing every combination of binaries and solving the
/// remaining LP. Ties keep the assignment enumerated first, counting in
/// binary with the lowest binary id as the least significant bit.
pub fn brute_force_milp(p: &MilpProblem) -> Result<MilpSolution, BruteForceError> {
    let bins = p.binary_ids();
    if bins.len() > BRUTE_FORCE_MAX_BINARIES {
        return Err(BruteForceError::TooManyBinaries {
            found: bins.len(),
            limit: BRUTE_FORCE_MAX_BINARIES,
        });
    }
    let model = LpModel::from_problem(p);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut unbounded = false;
    let mut numerical = false;
    let combos = 1u64 << bins.len();
    for mask in 0..combos {
        let mut s = Simplex::new(&model);
        let mut skip = false;
        for (k, &j) in bins.iter().enumerate() {
            let v = ((mask >> k) & 1) as f64;
            let var = &p.variables[j];
            if v < var.lower || v > var.upper {
                skip = true;
                break;
            }
            s.set_bounds(j, v, v);
        }
        if skip {
            continue;
        }
        let status = s.primal();
        match status {
            LpStatus::Optimal => {
                let r = s.result(status);
                let mut x = r.x[..p.num_vars()].to_vec();
                for &j in &bins {
                    x[j] = x[j].round();
                }
                let obj = p.objective_value(&x);
                let better = match &best {
                    None => true,
                    Some((b, _)) => p.is_better(obj, *b),
                };
                if better {
                    best = Some((obj, x));
                }
            }
            LpStatus::Infeasible => {}
            LpStatus::Unbounded => unbounded = true,
            LpStatus::NumericalFailure => numerical = true,
        }
    }
    let combos = combos as usize;
    if unbounded {
        return Ok(MilpSolution::without_point(SolveStatus::Unbounded, combos));
    }
    Ok(match best {
        Some((obj, x)) => MilpSolution {
            status: if numerical {
                SolveStatus::NumericalFailure
            } else {
                SolveStatus::Optimal
            },
            values: x,
            objective: obj,
            gap: 0.0,
            nodes_explored: combos,
            incumbent_history: vec![obj],
        },
        None if numerical => MilpSolution::without_point(SolveStatus::NumericalFailure, combos),
        None => MilpSolution::without_point(SolveStatus::Infeasible, combos),
    })
}
