//! Vertex-enumeration LP oracle. Every choice of `n` hyperplanes among the
//! rows and variable bounds is intersected; feasible intersections are the
//! basic feasible points, and the best one is the LP optimum of a bounded
//! problem. Only meant for a handful of variables.

use mgrestore_milp::{ConstraintSense, MilpProblem, ObjectiveSense};

const FEAS: f64 = 1e-7;

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-10 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f != 0.0 {
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

fn next_combination(c: &mut [usize], total: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < total - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Optimal objective of the continuous relaxation of `p`, or `None` when no
/// vertex is feasible. All variable bounds must be finite.
pub fn vertex_optimum(p: &MilpProblem) -> Option<f64> {
    let n = p.num_vars();
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for c in &p.constraints {
        let mut row = vec![0.0; n];
        for &(j, a) in &c.coeffs {
            row[j] += a;
        }
        planes.push((row, c.rhs));
    }
    for v in &p.variables {
        assert!(v.lower.is_finite() && v.upper.is_finite());
        let mut e = vec![0.0; n];
        e[v.id] = 1.0;
        planes.push((e.clone(), v.lower));
        planes.push((e, v.upper));
    }
    let total = planes.len();
    let feasible = |x: &[f64]| -> bool {
        p.variables
            .iter()
            .all(|v| x[v.id] >= v.lower - FEAS && x[v.id] <= v.upper + FEAS)
            && p.constraints.iter().all(|c| {
                let act = c.activity(x);
                let tol = FEAS * (1.0 + c.rhs.abs());
                match c.sense {
                    ConstraintSense::Le => act <= c.rhs + tol,
                    ConstraintSense::Ge => act >= c.rhs - tol,
                    ConstraintSense::Eq => (act - c.rhs).abs() <= tol,
                }
            })
    };
    let mut best: Option<f64> = None;
    let mut comb: Vec<usize> = (0..n).collect();
    loop {
        let a: Vec<Vec<f64>> = comb.iter().map(|&k| planes[k].0.clone()).collect();
        let b: Vec<f64> = comb.iter().map(|&k| planes[k].1).collect();
        if let Some(x) = solve_dense(a, b) {
            if feasible(&x) {
                let obj = p.objective_value(&x);
                best = Some(match (best, p.sense) {
                    (None, _) => obj,
                    (Some(o), ObjectiveSense::Maximize) => o.max(obj),
                    (Some(o), ObjectiveSense::Minimize) => o.min(obj),
                });
            }
        }
        if !next_combination(&mut comb, total) {
            break;
        }
    }
    best
}
