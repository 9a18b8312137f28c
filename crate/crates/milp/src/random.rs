//! Seeded generators of small random instances for oracle comparisons.

use rand::Rng;

use crate::problem::{ConstraintSense, MilpProblem, ObjectiveSense, ProblemBuilder};

/// Size limits of a generated mixed-binary instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceLimits {
    pub max_binaries: usize,
    pub max_continuous: usize,
    pub max_constraints: usize,
}

impl Default for InstanceLimits {
    fn default() -> Self {
        InstanceLimits {
            max_binaries: 12,
            max_continuous: 6,
            max_constraints: 15,
        }
    }
}

fn coeff<R: Rng>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.3) {
        0.0
    } else {
        (rng.gen_range(-50..=50) as f64) / 10.0
    }
}

/// Random mixed-binary maximization. Most rows are built around a hidden
/// reference point so the instance is usually feasible; roughly one in ten
/// rows is drawn without it, which makes some instances infeasible.
pub fn random_milp<R: Rng>(rng: &mut R, limits: InstanceLimits) -> MilpProblem {
    let nb = rng.gen_range(1..=limits.max_binaries.max(1));
    let nc = rng.gen_range(0..=limits.max_continuous);
    let m = rng.gen_range(1..=limits.max_constraints.max(1));
    let mut b = ProblemBuilder::new();
    let mut reference = Vec::with_capacity(nb + nc);
    for i in 0..nb {
        b.add_binary(format!("b{i}"));
        reference.push(if rng.gen_bool(0.5) { 1.0 } else { 0.0 });
    }
    for i in 0..nc {
        let ub = rng.gen_range(1..=10) as f64;
        b.add_continuous(0.0, ub, format!("y{i}"));
        reference.push(rng.gen_range(0.0..ub));
    }
    let n = nb + nc;
    for r in 0..m {
        let coeffs: Vec<(usize, f64)> = (0..n)
            .map(|j| (j, coeff(rng)))
            .filter(|&(_, a)| a != 0.0)
            .collect();
        let act: f64 = coeffs.iter().map(|&(j, a)| a * reference[j]).sum();
        let anchored = rng.gen_bool(0.9);
        let slack = rng.gen_range(0.0..3.0);
        let (sense, rhs) = match rng.gen_range(0..10) {
            0..=6 => (
                ConstraintSense::Le,
                if anchored { act + slack } else { rng.gen_range(-5.0..5.0) },
            ),
            7..=8 => (
                ConstraintSense::Ge,
                if anchored { act - slack } else { rng.gen_range(-5.0..5.0) },
            ),
            _ => (ConstraintSense::Eq, if anchored { act } else { rng.gen_range(-5.0..5.0) }),
        };
        b.add_constraint(coeffs, sense, rhs, format!("r{r}"));
    }
    for j in 0..n {
        b.add_objective(j, (rng.gen_range(-100..=100) as f64) / 10.0);
    }
    b.build(ObjectiveSense::Maximize)
        .expect("generated instance is well formed")
}

/// Random bounded, feasible LP with `n` variables in `[0, u_j]` and `m`
/// inequality rows that hold at a hidden interior point.
pub fn random_lp<R: Rng>(rng: &mut R, n: usize, m: usize) -> MilpProblem {
    let mut b = ProblemBuilder::new();
    let mut reference = Vec::with_capacity(n);
    for j in 0..n {
        let ub = rng.gen_range(1..=10) as f64;
        b.add_continuous(0.0, ub, format!("x{j}"));
        reference.push(rng.gen_range(0.0..ub));
    }
    for r in 0..m {
        let coeffs: Vec<(usize, f64)> = (0..n)
            .map(|j| (j, coeff(rng)))
            .filter(|&(_, a)| a != 0.0)
            .collect();
        let act: f64 = coeffs.iter().map(|&(j, a)| a * reference[j]).sum();
        let slack = rng.gen_range(0.1..3.0);
        if rng.gen_bool(0.75) {
            b.add_constraint(coeffs, ConstraintSense::Le, act + slack, format!("r{r}"));
        } else {
            b.add_constraint(coeffs, ConstraintSense::Ge, act - slack, format!("r{r}"));
        }
    }
    for j in 0..n {
        b.add_objective(j, (rng.gen_range(-100..=100) as f64) / 10.0);
    }
    b.build(ObjectiveSense::Maximize)
        .expect("generated instance is well formed")
}
