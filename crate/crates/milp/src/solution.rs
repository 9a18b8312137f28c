use serde::{Deserialize, Serialize};
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Search finished, but optimality is proven only within a caller-supplied
    /// gap tolerance looser than the default.
    GapLimit,
    NodeLimit,
    TimeLimit,
    /// The simplex engine lost numerical control (singular basis, iteration
    /// cap); no result is trustworthy.
    NumericalFailure,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::GapLimit => "gap-limit",
            SolveStatus::NodeLimit => "node-limit",
            SolveStatus::TimeLimit => "time-limit",
            SolveStatus::NumericalFailure => "numerical-failure",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of an LP or MILP solve. `values` is indexed by variable id and is
/// empty when no feasible point is known; `objective` is then NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilpSolution {
    pub status: SolveStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    /// `(bound - incumbent) / max(1, |incumbent|)` in the improving direction.
    pub gap: f64,
    pub nodes_explored: usize,
    /// Objective of each successive incumbent, in order of discovery.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub incumbent_history: Vec<f64>,
}

impl MilpSolution {
    pub(crate) fn without_point(status: SolveStatus, nodes: usize) -> Self {
        MilpSolution {
            status,
            values: Vec::new(),
            objective: f64::NAN,
            gap: f64::INFINITY,
            nodes_explored: nodes,
            incumbent_history: Vec::new(),
        }
    }

    pub fn has_point(&self) -> bool {
        !self.values.is_empty()
    }

    pub fn value(&self, id: usize) -> f64 {
        self.values[id]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpOptions {
    pub gap_tol: f64,
    pub integrality_tol: f64,
    pub node_limit: Option<usize>,
    pub time_limit: Option<Duration>,
}

pub const DEFAULT_GAP_TOL: f64 = 1e-6;
pub const DEFAULT_INTEGRALITY_TOL: f64 = 1e-6;
pub const FEASIBILITY_TOL: f64 = 1e-7;

impl Default for MilpOptions {
    fn default() -> Self {
        MilpOptions {
            gap_tol: DEFAULT_GAP_TOL,
            integrality_tol: DEFAULT_INTEGRALITY_TOL,
            node_limit: None,
            time_limit: None,
        }
    }
}
