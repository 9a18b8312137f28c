//! Best-bound branch and bound over binary variables.
//!
//! Nodes are ordered by LP bound, ties resolved first-in-first-out. The
//! branching variable is the most fractional binary (lowest id on ties).
//! Children re-solve from the parent's basis with the dual simplex. The only
//! primal heuristic is rounding the root relaxation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::Instant;

use crate::problem::{MilpProblem, VarKind};
use crate::simplex::{LpModel, LpStatus, Simplex, WarmStart};
use crate::solution::{MilpOptions, MilpSolution, SolveStatus, DEFAULT_GAP_TOL};

struct Node {
    /// LP bound of the parent in the internal minimization.
    bound: f64,
    seq: u64,
    fixes: Vec<(usize, f64)>,
    warm: Rc<WarmStart>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap pops the greatest: smallest bound first, then oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct NodeLp {
    status: LpStatus,
    internal: f64,
    x: Vec<f64>,
    warm: Option<WarmStart>,
}

fn solve_node(
    model: &LpModel,
    sign: f64,
    warm: Option<&WarmStart>,
    fixes: &[(usize, f64)],
) -> NodeLp {
    let mut s = match warm {
        Some(w) => Simplex::with_warm_start(model, w),
        None => Simplex::new(model),
    };
    for &(j, v) in fixes {
        s.set_bounds(j, v, v);
    }
    let status = if warm.is_some() { s.dual() } else { s.primal() };
    let r = s.result(status);
    NodeLp {
        status,
        internal: sign * r.objective,
        x: r.x,
        warm: r.warm,
    }
}

struct Search<'a> {
    p: &'a MilpProblem,
    model: LpModel,
    sign: f64,
    opts: &'a MilpOptions,
    incumbent: Option<(f64, Vec<f64>)>,
    history: Vec<f64>,
}

impl<'a> Search<'a> {
    fn prune_tol(&self) -> f64 {
        match &self.incumbent {
            Some((u, _)) => self.opts.gap_tol * u.abs().max(1.0),
            None => 0.0,
        }
    }

    fn dominated(&self, internal_bound: f64) -> bool {
        match &self.incumbent {
            Some((u, _)) => internal_bound >= u - self.prune_tol(),
            None => false,
        }
    }

    fn most_fractional(&self, x: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for v in &self.p.variables {
            if v.kind != VarKind::Binary {
                continue;
            }
            let f = x[v.id] - x[v.id].floor();
            let dist = f.min(1.0 - f);
            if dist <= self.opts.integrality_tol {
                continue;
            }
            match best {
                Some((_, d)) if d >= dist => {}
                _ => best = Some((v.id, dist)),
            }
        }
        best.map(|(j, _)| j)
    }

    fn offer(&mut self, internal: f64, x: &[f64]) {
        let better = match &self.incumbent {
            None => true,
            Some((u, _)) => internal < *u,
        };
        if better {
            let mut vals = x[..self.p.num_vars()].to_vec();
            for v in &self.p.variables {
                if v.kind == VarKind::Binary {
                    vals[v.id] = vals[v.id].round();
                }
            }
            self.history.push(self.sign * internal);
            self.incumbent = Some((internal, vals));
        }
    }
}

/// Solve `p` to proven optimality (within `opts.gap_tol`) or until a limit.
pub fn solve_milp(p: &MilpProblem, opts: &MilpOptions) -> MilpSolution {
    let start = Instant::now();
    let model = LpModel::from_problem(p);
    let sign = match p.sense {
        crate::ObjectiveSense::Minimize => 1.0,
        crate::ObjectiveSense::Maximize => -1.0,
    };
    let mut search = Search {
        p,
        model,
        sign,
        opts,
        incumbent: None,
        history: Vec::new(),
    };

    let root = solve_node(&search.model, sign, None, &[]);
    let mut nodes = 1usize;
    match root.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return MilpSolution::without_point(SolveStatus::Infeasible, nodes),
        LpStatus::Unbounded => return MilpSolution::without_point(SolveStatus::Unbounded, nodes),
        LpStatus::NumericalFailure => {
            return MilpSolution::without_point(SolveStatus::NumericalFailure, nodes)
        }
    }
    let root_warm = Rc::new(root.warm.clone().expect("optimal root has a basis"));

    if search.most_fractional(&root.x).is_none() {
        search.offer(root.internal, &root.x);
    } else {
        // Rounding heuristic: fix every binary at its rounded root value.
        let fixes: Vec<(usize, f64)> = p
            .variables
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .map(|v| (v.id, root.x[v.id].round().clamp(v.lower, v.upper)))
            .collect();
        let r = solve_node(&search.model, sign, Some(&root_warm), &fixes);
        if r.status == LpStatus::Optimal {
            search.offer(r.internal, &r.x);
        }
    }

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut pruned_bound = f64::INFINITY;
    let mut limit_status: Option<SolveStatus> = None;
    if search.most_fractional(&root.x).is_some() {
        heap.push(Node {
            bound: root.internal,
            seq,
            fixes: Vec::new(),
            warm: root_warm.clone(),
        });
        seq += 1;
    }
    let mut first = true;

    while let Some(node) = heap.pop() {
        if search.dominated(node.bound) {
            pruned_bound = pruned_bound.min(node.bound);
            continue;
        }
        if let Some(limit) = opts.node_limit {
            if nodes >= limit {
                heap.push(node);
                limit_status = Some(SolveStatus::NodeLimit);
                break;
            }
        }
        if let Some(limit) = opts.time_limit {
            if start.elapsed() >= limit {
                heap.push(node);
                limit_status = Some(SolveStatus::TimeLimit);
                break;
            }
        }
        let lp = if first {
            first = false;
            NodeLp {
                status: root.status,
                internal: root.internal,
                x: root.x.clone(),
                warm: root.warm.clone(),
            }
        } else {
            nodes += 1;
            solve_node(&search.model, sign, Some(&node.warm), &node.fixes)
        };
        match lp.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded | LpStatus::NumericalFailure => {
                log::warn!("node LP ended with {:?}; node discarded", lp.status);
                continue;
            }
        }
        if search.dominated(lp.internal) {
            pruned_bound = pruned_bound.min(lp.internal);
            continue;
        }
        match search.most_fractional(&lp.x) {
            None => search.offer(lp.internal, &lp.x),
            Some(j) => {
                let warm = Rc::new(lp.warm.expect("optimal node has a basis"));
                for v in [0.0, 1.0] {
                    let mut fixes = node.fixes.clone();
                    fixes.push((j, v));
                    heap.push(Node {
                        bound: lp.internal,
                        seq,
                        fixes,
                        warm: warm.clone(),
                    });
                    seq += 1;
                }
            }
        }
    }

    let open_bound = heap
        .iter()
        .map(|n| n.bound)
        .fold(f64::INFINITY, f64::min);
    match search.incumbent.take() {
        None => {
            let status = limit_status.unwrap_or(SolveStatus::Infeasible);
            let mut s = MilpSolution::without_point(status, nodes);
            s.incumbent_history = search.history;
            s
        }
        Some((u, vals)) => {
            let best_bound = open_bound.min(pruned_bound).min(u);
            let gap = (u - best_bound).max(0.0) / u.abs().max(1.0);
            let status = match limit_status {
                Some(s) => s,
                None if gap > DEFAULT_GAP_TOL => SolveStatus::GapLimit,
                None => SolveStatus::Optimal,
            };
            MilpSolution {
                status,
                objective: p.objective_value(&vals),
                values: vals,
                gap,
                nodes_explored: nodes,
                incumbent_history: search.history,
            }
        }
    }
}
