//! Problem representation and validation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub id: VarId,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub name: String,
}

impl Variable {
    pub fn continuous(id: VarId, lower: f64, upper: f64, name: impl Into<String>) -> Self {
        Variable {
            id,
            kind: VarKind::Continuous,
            lower,
            upper,
            name: name.into(),
        }
    }

    pub fn binary(id: VarId, name: impl Into<String>) -> Self {
        Variable {
            id,
            kind: VarKind::Binary,
            lower: 0.0,
            upper: 1.0,
            name: name.into(),
        }
    }

    pub fn is_binary(&self) -> bool {
        self.kind == VarKind::Binary
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstraintSense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub coeffs: Vec<(VarId, f64)>,
    pub sense: ConstraintSense,
    pub rhs: f64,
    pub name: String,
}

impl LinearConstraint {
    pub fn new(
        coeffs: Vec<(VarId, f64)>,
        sense: ConstraintSense,
        rhs: f64,
        name: impl Into<String>,
    ) -> Self {
        LinearConstraint {
            coeffs,
            sense,
            rhs,
            name: name.into(),
        }
    }

    /// Left-hand side evaluated at `x`.
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates this row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.sense {
            ConstraintSense::Le => (lhs - self.rhs).max(0.0),
            ConstraintSense::Ge => (self.rhs - lhs).max(0.0),
            ConstraintSense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveSense {
    Maximize,
    Minimize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("variable at position {position} has id {id}; ids must be 0..n in declaration order")]
    NonContiguousId { position: usize, id: VarId },
    #[error("{context} references undeclared variable {id}")]
    DanglingReference { context: String, id: VarId },
    #[error("non-finite coefficient in {context}")]
    NonFinite { context: String },
    #[error("variable {name} has invalid bounds [{lower}, {upper}]")]
    InvalidBounds { name: String, lower: f64, upper: f64 },
}

/// A validated mixed-integer linear program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilpProblem {
    pub variables: Vec<Variable>,
    pub constraints: Vec<LinearConstraint>,
    pub objective: Vec<(VarId, f64)>,
    pub sense: ObjectiveSense,
}

impl MilpProblem {
    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn binary_ids(&self) -> Vec<VarId> {
        self.variables
            .iter()
            .filter(|v| v.is_binary())
            .map(|v| v.id)
            .collect()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|&(j, c)| c * x[j]).sum()
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for v in &self.variables {
            let xv = x[v.id];
            worst = worst.max(v.lower - xv).max(xv - v.upper);
        }
        for c in &self.constraints {
            worst = worst.max(c.violation(x));
        }
        worst
    }

    /// Largest distance of a binary variable from {0, 1}.
    pub fn max_integrality_violation(&self, x: &[f64]) -> f64 {
        self.variables
            .iter()
            .filter(|v| v.is_binary())
            .map(|v| {
                let xv = x[v.id];
                (xv - xv.round()).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Copy with every binary relaxed to a continuous variable on its bounds.
    pub fn relaxed(&self) -> MilpProblem {
        let mut p = self.clone();
        for v in &mut p.variables {
            v.kind = VarKind::Continuous;
        }
        p
    }

    pub fn is_better(&self, a: f64, b: f64) -> bool {
        match self.sense {
            ObjectiveSense::Maximize => a > b,
            ObjectiveSense::Minimize => a < b,
        }
    }
}

fn merge_coeffs(raw: Vec<(VarId, f64)>) -> Vec<(VarId, f64)> {
    let mut sorted = raw;
    sorted.sort_by_key(|&(j, _)| j);
    let mut out: Vec<(VarId, f64)> = Vec::with_capacity(sorted.len());
    for (j, a) in sorted {
        match out.last_mut() {
            Some(last) if last.0 == j => last.1 += a,
            _ => out.push((j, a)),
        }
    }
    out
}

fn check_refs(
    coeffs: &[(VarId, f64)],
    n: usize,
    context: &str,
) -> Result<(), ProblemError> {
    for &(j, a) in coeffs {
        if j >= n {
            return Err(ProblemError::DanglingReference {
                context: context.to_string(),
                id: j,
            });
        }
        if !a.is_finite() {
            return Err(ProblemError::NonFinite {
                context: context.to_string(),
            });
        }
    }
    Ok(())
}

/// Validate and normalize a problem. Duplicate entries within one row (or in
/// the objective) are merged by summation and rows are sorted by variable id.
pub fn build_problem(
    variables: Vec<Variable>,
    constraints: Vec<LinearConstraint>,
    objective: Vec<(VarId, f64)>,
    sense: ObjectiveSense,
) -> Result<MilpProblem, ProblemError> {
    let n = variables.len();
    for (pos, v) in variables.iter().enumerate() {
        if v.id != pos {
            return Err(ProblemError::NonContiguousId {
                position: pos,
                id: v.id,
            });
        }
        let bad = v.lower.is_nan()
            || v.upper.is_nan()
            || v.lower > v.upper
            || v.lower == f64::INFINITY
            || v.upper == f64::NEG_INFINITY
            || (v.is_binary() && (v.lower < 0.0 || v.upper > 1.0));
        if bad {
            return Err(ProblemError::InvalidBounds {
                name: v.name.clone(),
                lower: v.lower,
                upper: v.upper,
            });
        }
    }
    check_refs(&objective, n, "objective")?;
    let mut rows = Vec::with_capacity(constraints.len());
    for c in constraints {
        let context = if c.name.is_empty() {
            "constraint".to_string()
        } else {
            format!("constraint {}", c.name)
        };
        check_refs(&c.coeffs, n, &context)?;
        if !c.rhs.is_finite() {
            return Err(ProblemError::NonFinite { context });
        }
        rows.push(LinearConstraint {
            coeffs: merge_coeffs(c.coeffs),
            ..c
        });
    }
    Ok(MilpProblem {
        variables,
        constraints: rows,
        objective: merge_coeffs(objective),
        sense,
    })
}

/// Incremental construction helper that assigns ids in order.
#[derive(Debug, Default, Clone)]
pub struct ProblemBuilder {
    variables: Vec<Variable>,
    constraints: Vec<LinearConstraint>,
    objective: Vec<(VarId, f64)>,
}

impl ProblemBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_continuous(&mut self, lower: f64, upper: f64, name: impl Into<String>) -> VarId {
        let id = self.variables.len();
        self.variables
            .push(Variable::continuous(id, lower, upper, name));
        id
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        let id = self.variables.len();
        self.variables.push(Variable::binary(id, name));
        id
    }

    pub fn set_bounds(&mut self, id: VarId, lower: f64, upper: f64) {
        self.variables[id].lower = lower;
        self.variables[id].upper = upper;
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id]
    }

    pub fn add_constraint(
        &mut self,
        coeffs: Vec<(VarId, f64)>,
        sense: ConstraintSense,
        rhs: f64,
        name: impl Into<String>,
    ) {
        self.constraints
            .push(LinearConstraint::new(coeffs, sense, rhs, name));
    }

    pub fn add_objective(&mut self, id: VarId, coeff: f64) {
        self.objective.push((id, coeff));
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn build(self, sense: ObjectiveSense) -> Result<MilpProblem, ProblemError> {
        build_problem(self.variables, self.constraints, self.objective, sense)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_for_small_problem() {
        let vars = vec![Variable::binary(0, "a"), Variable::binary(1, "b")];
        let rows = vec![LinearConstraint::new(
            vec![(0, 1.0), (1, 1.0)],
            ConstraintSense::Le,
            1.0,
            "cap",
        )];
        let p = build_problem(vars, rows, vec![(0, 1.0), (1, 2.0)], ObjectiveSense::Maximize)
            .unwrap();
        assert_eq!((p.num_vars(), p.num_constraints()), (2, 1));
    }

    #[test]
    fn dangling_reference_rejected() {
        let vars = vec![Variable::binary(0, "a")];
        let rows = vec![LinearConstraint::new(
            vec![(3, 1.0)],
            ConstraintSense::Le,
            1.0,
            "bad",
        )];
        let err = build_problem(vars, rows, vec![], ObjectiveSense::Maximize).unwrap_err();
        assert!(matches!(err, ProblemError::DanglingReference { id: 3, .. }));
    }

    #[test]
    fn duplicates_merge_by_sum() {
        let vars = vec![Variable::continuous(0, 0.0, 1.0, "x")];
        let rows = vec![LinearConstraint::new(
            vec![(0, 1.5), (0, 2.25)],
            ConstraintSense::Le,
            1.0,
            "dup",
        )];
        let p = build_problem(vars, rows, vec![], ObjectiveSense::Maximize).unwrap();
        assert_eq!(p.constraints[0].coeffs, vec![(0, 3.75)]);
    }

    #[test]
    fn non_finite_rejected() {
        let vars = vec![Variable::continuous(0, 0.0, 1.0, "x")];
        let err = build_problem(vars.clone(), vec![], vec![(0, f64::NAN)], ObjectiveSense::Minimize)
            .unwrap_err();
        assert!(matches!(err, ProblemError::NonFinite { .. }));
        let rows = vec![LinearConstraint::new(
            vec![(0, f64::INFINITY)],
            ConstraintSense::Ge,
            0.0,
            "inf",
        )];
        assert!(build_problem(vars, rows, vec![], ObjectiveSense::Minimize).is_err());
    }

    #[test]
    fn bad_bounds_rejected() {
        let vars = vec![Variable::continuous(0, 2.0, 1.0, "x")];
        assert!(matches!(
            build_problem(vars, vec![], vec![], ObjectiveSense::Minimize),
            Err(ProblemError::InvalidBounds { .. })
        ));
        let mut b = Variable::binary(0, "y");
        b.upper = 2.0;
        assert!(build_problem(vec![b], vec![], vec![], ObjectiveSense::Minimize).is_err());
    }
}
