//! Bounded-variable primal and dual simplex on a sparse LU basis.
//!
//! Every row `a_i x (<=|=|>=) b_i` gets a logical variable `s_i = a_i x` whose
//! bounds encode the sense, so the working system is `A x - s = 0` with all
//! structure carried by variable bounds. Pricing is Dantzig's rule with
//! lowest-index tie-breaking; after a run of degenerate pivots the solver
//! switches to Bland's rule until progress resumes.

use crate::lu::{BasisFactor, SparseColumn};
use crate::problem::{ConstraintSense, MilpProblem, ObjectiveSense};

pub(crate) const FEAS_TOL: f64 = 1e-7;
pub(crate) const OPT_TOL: f64 = 1e-7;
const PIVOT_TOL: f64 = 1e-7;
const REFACTOR_EVERY: usize = 100;
const DEGENERATE_SWITCH: usize = 30;
/// Long degenerate runs refactorize to shed accumulated drift.
const STALL_REFACTOR: usize = 500;
const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NonBasic {
    Lower,
    Upper,
    /// Free variable resting at zero.
    Zero,
}

/// Basis snapshot used to warm-start a related LP.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct WarmStart {
    basic: Vec<u32>,
    at_upper: Vec<bool>,
}

/// Standard-form view of a problem: minimize `cost . x` over structural and
/// logical variables.
#[derive(Debug, Clone)]
pub(crate) struct LpModel {
    pub n: usize,
    pub m: usize,
    cols: Vec<SparseColumn>,
    rows: Vec<Vec<(usize, f64)>>,
    cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// +1 when the source problem minimizes, -1 when it maximizes.
    sign: f64,
}

impl LpModel {
    pub fn from_problem(p: &MilpProblem) -> LpModel {
        let n = p.num_vars();
        let m = p.num_constraints();
        let mut cols = vec![
            SparseColumn {
                idx: Vec::new(),
                val: Vec::new(),
            };
            n
        ];
        let mut rows = Vec::with_capacity(m);
        let mut lower = Vec::with_capacity(n + m);
        let mut upper = Vec::with_capacity(n + m);
        for v in &p.variables {
            lower.push(v.lower);
            upper.push(v.upper);
        }
        for (i, c) in p.constraints.iter().enumerate() {
            let mut row = Vec::with_capacity(c.coeffs.len());
            for &(j, a) in &c.coeffs {
                if a != 0.0 {
                    cols[j].idx.push(i);
                    cols[j].val.push(a);
                    row.push((j, a));
                }
            }
            rows.push(row);
            let (lo, hi) = match c.sense {
                ConstraintSense::Le => (f64::NEG_INFINITY, c.rhs),
                ConstraintSense::Ge => (c.rhs, f64::INFINITY),
                ConstraintSense::Eq => (c.rhs, c.rhs),
            };
            lower.push(lo);
            upper.push(hi);
        }
        let sign = match p.sense {
            ObjectiveSense::Minimize => 1.0,
            ObjectiveSense::Maximize => -1.0,
        };
        let mut cost = vec![0.0; n + m];
        for &(j, c) in &p.objective {
            cost[j] += sign * c;
        }
        LpModel {
            n,
            m,
            cols,
            rows,
            cost,
            lower,
            upper,
            sign,
        }
    }

    /// Objective in the sense of the source problem.
    pub fn source_objective(&self, x: &[f64]) -> f64 {
        let internal: f64 = (0..self.n).map(|j| self.cost[j] * x[j]).sum();
        self.sign * internal
    }

    fn column_dot(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            let c = &self.cols[j];
            c.idx.iter().zip(&c.val).map(|(&i, &a)| a * y[i]).sum()
        } else {
            -y[j - self.n]
        }
    }

    fn scatter_column(&self, j: usize, out: &mut [f64]) {
        if j < self.n {
            let c = &self.cols[j];
            for (&i, &a) in c.idx.iter().zip(&c.val) {
                out[i] = a;
            }
        } else {
            out[j - self.n] = -1.0;
        }
    }

    fn sparse_column(&self, j: usize) -> SparseColumn {
        if j < self.n {
            self.cols[j].clone()
        } else {
            SparseColumn {
                idx: vec![j - self.n],
                val: vec![-1.0],
            }
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct LpResult {
    pub status: LpStatus,
    /// Values of structural then logical variables.
    pub x: Vec<f64>,
    /// Objective in the sense of the source problem.
    pub objective: f64,
    /// Row duals of the internal minimization.
    pub y: Vec<f64>,
    /// Reduced costs of the internal minimization.
    pub d: Vec<f64>,
    pub iterations: usize,
    pub warm: Option<WarmStart>,
}

pub(crate) struct Simplex<'a> {
    model: &'a LpModel,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    basic: Vec<usize>,
    pos_of: Vec<usize>,
    nb: Vec<NonBasic>,
    x: Vec<f64>,
    factor: Option<BasisFactor>,
    iterations: usize,
    max_iterations: usize,
}

enum Step {
    Continue,
    Done(LpStatus),
}

impl<'a> Simplex<'a> {
    pub fn new(model: &'a LpModel) -> Self {
        let n = model.n;
        let m = model.m;
        let total = n + m;
        let mut s = Simplex {
            model,
            lower: model.lower.clone(),
            upper: model.upper.clone(),
            basic: (n..total).collect(),
            pos_of: vec![NONE; total],
            nb: vec![NonBasic::Lower; total],
            x: vec![0.0; total],
            factor: None,
            iterations: 0,
            max_iterations: 20_000 + 50 * total,
        };
        for r in 0..m {
            s.pos_of[n + r] = r;
        }
        for j in 0..n {
            s.place_nonbasic(j, None);
        }
        s
    }

    /// Restore a previously saved basis. Falls back to the slack basis when
    /// the snapshot does not match the model dimensions.
    pub fn with_warm_start(model: &'a LpModel, warm: &WarmStart) -> Self {
        let mut s = Simplex::new(model);
        let total = model.n + model.m;
        if warm.basic.len() != model.m || warm.at_upper.len() != total {
            return s;
        }
        s.pos_of = vec![NONE; total];
        s.basic = warm.basic.iter().map(|&b| b as usize).collect();
        for (r, &b) in s.basic.iter().enumerate() {
            s.pos_of[b] = r;
        }
        for j in 0..total {
            if s.pos_of[j] == NONE {
                let hint = if warm.at_upper[j] {
                    Some(NonBasic::Upper)
                } else {
                    Some(NonBasic::Lower)
                };
                s.place_nonbasic(j, hint);
            }
        }
        s
    }

    pub fn snapshot(&self) -> WarmStart {
        let total = self.model.n + self.model.m;
        WarmStart {
            basic: self.basic.iter().map(|&b| b as u32).collect(),
            at_upper: (0..total)
                .map(|j| self.pos_of[j] == NONE && self.nb[j] == NonBasic::Upper)
                .collect(),
        }
    }

    /// Put nonbasic `j` on a finite bound (preferring `hint`) or at zero if
    /// free.
    fn place_nonbasic(&mut self, j: usize, hint: Option<NonBasic>) {
        let (l, u) = (self.lower[j], self.upper[j]);
        let state = match hint {
            Some(NonBasic::Upper) if u.is_finite() => NonBasic::Upper,
            Some(NonBasic::Lower) if l.is_finite() => NonBasic::Lower,
            _ => {
                if l.is_finite() {
                    NonBasic::Lower
                } else if u.is_finite() {
                    NonBasic::Upper
                } else {
                    NonBasic::Zero
                }
            }
        };
        self.nb[j] = state;
        self.x[j] = match state {
            NonBasic::Lower => l,
            NonBasic::Upper => u,
            NonBasic::Zero => 0.0,
        };
    }

    /// Change bounds of variable `j`; nonbasic variables follow their bound.
    pub fn set_bounds(&mut self, j: usize, l: f64, u: f64) {
        self.lower[j] = l;
        self.upper[j] = u;
        if self.pos_of[j] == NONE {
            let hint = Some(self.nb[j]);
            self.place_nonbasic(j, hint);
            if self.factor.is_some() {
                self.compute_basic_values();
            }
        }
    }

    fn refactor(&mut self) -> bool {
        let m = self.model.m;
        let n = self.model.n;
        for _attempt in 0..3 {
            let cols: Vec<SparseColumn> = self
                .basic
                .iter()
                .map(|&j| self.model.sparse_column(j))
                .collect();
            match BasisFactor::factorize(m, &cols) {
                Ok(f) => {
                    self.factor = Some(f);
                    self.compute_basic_values();
                    return true;
                }
                Err(sing) => {
                    for (&pos, &row) in sing.positions.iter().zip(&sing.rows) {
                        let out = self.basic[pos];
                        let slack = n + row;
                        self.pos_of[out] = NONE;
                        let near = if (self.x[out] - self.lower[out]).abs()
                            <= (self.upper[out] - self.x[out]).abs()
                        {
                            NonBasic::Lower
                        } else {
                            NonBasic::Upper
                        };
                        self.place_nonbasic(out, Some(near));
                        self.basic[pos] = slack;
                        self.pos_of[slack] = pos;
                    }
                }
            }
        }
        false
    }

    fn compute_basic_values(&mut self) {
        let m = self.model.m;
        let mut rhs = vec![0.0; m];
        for j in 0..self.model.n {
            if self.pos_of[j] == NONE && self.x[j] != 0.0 {
                let c = &self.model.cols[j];
                for (&i, &a) in c.idx.iter().zip(&c.val) {
                    rhs[i] -= a * self.x[j];
                }
            }
        }
        for r in 0..m {
            let j = self.model.n + r;
            if self.pos_of[j] == NONE {
                rhs[r] += self.x[j];
            }
        }
        self.factor.as_ref().expect("factorized").ftran(&mut rhs);
        for r in 0..m {
            self.x[self.basic[r]] = rhs[r];
        }
    }

    fn infeasibility(&self, j: usize) -> f64 {
        let v = self.x[j];
        if v < self.lower[j] - FEAS_TOL {
            self.lower[j] - v
        } else if v > self.upper[j] + FEAS_TOL {
            v - self.upper[j]
        } else {
            0.0
        }
    }

    fn duals(&self, phase_one: bool) -> Vec<f64> {
        let m = self.model.m;
        let mut c: Vec<f64> = (0..m)
            .map(|r| {
                let j = self.basic[r];
                if phase_one {
                    if self.x[j] < self.lower[j] - FEAS_TOL {
                        -1.0
                    } else if self.x[j] > self.upper[j] + FEAS_TOL {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    self.model.cost[j]
                }
            })
            .collect();
        self.factor.as_ref().expect("factorized").btran(&mut c);
        c
    }

    fn reduced_cost(&self, j: usize, y: &[f64], phase_one: bool) -> f64 {
        let c = if phase_one { 0.0 } else { self.model.cost[j] };
        c - self.model.column_dot(j, y)
    }

    fn ftran_column(&self, j: usize) -> Vec<f64> {
        let mut w = vec![0.0; self.model.m];
        self.model.scatter_column(j, &mut w);
        self.factor.as_ref().expect("factorized").ftran(&mut w);
        w
    }

    fn pivot_in(&mut self, q: usize, r: usize, w: &[f64], leave_state: NonBasic) {
        let out = self.basic[r];
        self.pos_of[out] = NONE;
        self.nb[out] = leave_state;
        self.x[out] = match leave_state {
            NonBasic::Lower => self.lower[out],
            NonBasic::Upper => self.upper[out],
            NonBasic::Zero => 0.0,
        };
        self.basic[r] = q;
        self.pos_of[q] = r;
        let f = self.factor.as_mut().expect("factorized");
        f.update(r, w);
        if f.num_updates() >= REFACTOR_EVERY {
            self.refactor();
        }
    }

    fn has_infeasible_basic(&self) -> bool {
        self.basic.iter().any(|&j| self.infeasibility(j) > 0.0)
    }

    /// Primal simplex: phase one on the sum of infeasibilities, then phase
    /// two on the true cost.
    pub fn primal(&mut self) -> LpStatus {
        if self.factor.is_none() && !self.refactor() {
            return LpStatus::NumericalFailure;
        }
        let mut degenerate_run = 0usize;
        let mut rejected: Vec<usize> = Vec::new();
        let mut cleaned = false;
        loop {
            if self.iterations >= self.max_iterations {
                return LpStatus::NumericalFailure;
            }
            if degenerate_run > 0 && degenerate_run % STALL_REFACTOR == 0 && !self.refactor() {
                return LpStatus::NumericalFailure;
            }
            let phase_one = self.has_infeasible_basic();
            let bland = degenerate_run >= DEGENERATE_SWITCH;
            match self.primal_iteration(phase_one, bland, &mut degenerate_run, &mut rejected) {
                Step::Continue => {}
                Step::Done(status) => {
                    if status == LpStatus::Optimal && !cleaned {
                        // Confirm on a fresh factorization before declaring
                        // optimality; drift can hide small infeasibilities.
                        cleaned = true;
                        if !self.refactor() {
                            return LpStatus::NumericalFailure;
                        }
                        rejected.clear();
                        continue;
                    }
                    return status;
                }
            }
        }
    }

    fn primal_iteration(
        &mut self,
        phase_one: bool,
        bland: bool,
        degenerate_run: &mut usize,
        rejected: &mut Vec<usize>,
    ) -> Step {
        let total = self.model.n + self.model.m;
        let y = self.duals(phase_one);
        let mut entering = NONE;
        let mut best = 0.0f64;
        let mut entering_d = 0.0;
        for j in 0..total {
            if self.pos_of[j] != NONE || self.lower[j] == self.upper[j] {
                continue;
            }
            if rejected.contains(&j) {
                continue;
            }
            let d = self.reduced_cost(j, &y, phase_one);
            let eligible = match self.nb[j] {
                NonBasic::Lower => d < -OPT_TOL,
                NonBasic::Upper => d > OPT_TOL,
                NonBasic::Zero => d.abs() > OPT_TOL,
            };
            if !eligible {
                continue;
            }
            if bland {
                entering = j;
                entering_d = d;
                break;
            }
            if d.abs() > best {
                best = d.abs();
                entering = j;
                entering_d = d;
            }
        }
        if entering == NONE {
            if phase_one {
                return Step::Done(LpStatus::Infeasible);
            }
            return Step::Done(LpStatus::Optimal);
        }
        let q = entering;
        let dir = if entering_d < 0.0 { 1.0 } else { -1.0 };
        let w = self.ftran_column(q);

        // Ratio test. Infeasible basics moving toward feasibility stop at the
        // bound they reach first; those moving away are not blocking.
        let mut limits: Vec<(usize, f64, f64, NonBasic)> = Vec::new();
        for (r, &wr) in w.iter().enumerate() {
            if wr.abs() <= PIVOT_TOL {
                continue;
            }
            let j = self.basic[r];
            let rate = -dir * wr;
            let (v, l, u) = (self.x[j], self.lower[j], self.upper[j]);
            let (room, state) = if rate > 0.0 {
                if v < l - FEAS_TOL {
                    (l - v, NonBasic::Lower)
                } else if v > u + FEAS_TOL || u == f64::INFINITY {
                    continue;
                } else {
                    ((u - v).max(0.0), NonBasic::Upper)
                }
            } else if v > u + FEAS_TOL {
                (v - u, NonBasic::Upper)
            } else if v < l - FEAS_TOL || l == f64::NEG_INFINITY {
                continue;
            } else {
                ((v - l).max(0.0), NonBasic::Lower)
            };
            limits.push((r, room, rate.abs(), state));
        }
        let flip_range = self.upper[q] - self.lower[q];
        let mut choice: Option<(usize, f64, NonBasic)> = None;
        if !limits.is_empty() {
            if bland {
                let theta_min = limits
                    .iter()
                    .map(|&(_, room, rate, _)| room / rate)
                    .fold(f64::INFINITY, f64::min);
                let mut pick: Option<(usize, f64, NonBasic)> = None;
                for &(r, room, rate, st) in &limits {
                    let t = room / rate;
                    if t <= theta_min + 1e-12 {
                        let better = match pick {
                            None => true,
                            Some((pr, _, _)) => self.basic[r] < self.basic[pr],
                        };
                        if better {
                            pick = Some((r, t, st));
                        }
                    }
                }
                choice = pick;
            } else {
                let theta_max = limits
                    .iter()
                    .map(|&(_, room, rate, _)| (room + FEAS_TOL) / rate)
                    .fold(f64::INFINITY, f64::min);
                let mut pick: Option<(usize, f64, NonBasic, f64)> = None;
                for &(r, room, rate, st) in &limits {
                    let t = room / rate;
                    if t <= theta_max {
                        let better = match pick {
                            None => true,
                            Some((pr, _, _, prate)) => {
                                rate > prate || (rate == prate && self.basic[r] < self.basic[pr])
                            }
                        };
                        if better {
                            pick = Some((r, t, st, rate));
                        }
                    }
                }
                choice = pick.map(|(r, t, st, _)| (r, t, st));
            }
        }
        let bound_flip = match choice {
            Some((_, t, _)) => flip_range.is_finite() && flip_range <= t,
            None => flip_range.is_finite(),
        };
        if bound_flip {
            let theta = flip_range;
            self.x[q] += dir * theta;
            for (r, &wr) in w.iter().enumerate() {
                if wr != 0.0 {
                    let j = self.basic[r];
                    self.x[j] -= dir * theta * wr;
                }
            }
            self.nb[q] = if dir > 0.0 {
                NonBasic::Upper
            } else {
                NonBasic::Lower
            };
            self.x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
            self.iterations += 1;
            *degenerate_run = 0;
            rejected.clear();
            return Step::Continue;
        }
        let (r, theta, leave_state) = match choice {
            Some(c) => c,
            None => {
                if phase_one {
                    // An improving phase-one direction must be blocked; treat
                    // this candidate as numerically unreliable.
                    rejected.push(q);
                    return Step::Continue;
                }
                return Step::Done(LpStatus::Unbounded);
            }
        };
        let theta = theta.max(0.0);
        if theta <= 1e-12 {
            *degenerate_run += 1;
        } else {
            *degenerate_run = 0;
        }
        self.x[q] += dir * theta;
        for (rr, &wr) in w.iter().enumerate() {
            if wr != 0.0 {
                let j = self.basic[rr];
                self.x[j] -= dir * theta * wr;
            }
        }
        if w[r].abs() < 1e-7 {
            // Tiny pivots are accepted but trigger a refactorization.
            self.pivot_in(q, r, &w, leave_state);
            self.refactor();
        } else {
            self.pivot_in(q, r, &w, leave_state);
        }
        self.iterations += 1;
        rejected.clear();
        Step::Continue
    }

    fn dual_feasible(&self, y: &[f64]) -> bool {
        let total = self.model.n + self.model.m;
        (0..total).all(|j| {
            if self.pos_of[j] != NONE || self.lower[j] == self.upper[j] {
                return true;
            }
            let d = self.reduced_cost(j, y, false);
            match self.nb[j] {
                NonBasic::Lower => d >= -OPT_TOL,
                NonBasic::Upper => d <= OPT_TOL,
                NonBasic::Zero => d.abs() <= OPT_TOL,
            }
        })
    }

    /// Dual simplex from a dual-feasible basis; falls back to the primal
    /// method when dual feasibility does not hold.
    pub fn dual(&mut self) -> LpStatus {
        if self.factor.is_none() && !self.refactor() {
            return LpStatus::NumericalFailure;
        }
        let y = self.duals(false);
        if !self.dual_feasible(&y) {
            return self.primal();
        }
        let m = self.model.m;
        let n = self.model.n;
        let total = n + m;
        loop {
            if self.iterations >= self.max_iterations {
                return LpStatus::NumericalFailure;
            }
            // Leaving row: largest primal infeasibility, lowest index on ties.
            let mut r_out = NONE;
            let mut worst = 0.0;
            for r in 0..m {
                let j = self.basic[r];
                let inf = self.infeasibility(j);
                if inf > worst || (inf > 0.0 && inf == worst && j < self.basic[r_out]) {
                    worst = inf;
                    r_out = r;
                }
            }
            if r_out == NONE {
                return self.primal();
            }
            let leaving = self.basic[r_out];
            let below = self.x[leaving] < self.lower[leaving];
            let target = if below {
                self.lower[leaving]
            } else {
                self.upper[leaving]
            };
            let y = self.duals(false);
            let mut rho = vec![0.0; m];
            rho[r_out] = 1.0;
            self.factor.as_ref().expect("factorized").btran(&mut rho);
            let mut alpha = vec![0.0; total];
            for (i, &ri) in rho.iter().enumerate() {
                if ri != 0.0 {
                    for &(j, a) in &self.model.rows[i] {
                        alpha[j] += ri * a;
                    }
                    alpha[n + i] = -ri;
                }
            }
            // Dual ratio test with a Harris-style tolerance pass.
            let mut cands: Vec<(usize, f64, f64)> = Vec::new();
            for j in 0..total {
                if self.pos_of[j] != NONE || self.lower[j] == self.upper[j] {
                    continue;
                }
                let a = alpha[j];
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                // x_leaving moves by -a per unit increase of x_j.
                let ok = match (self.nb[j], below) {
                    (NonBasic::Lower, true) => a < 0.0,
                    (NonBasic::Upper, true) => a > 0.0,
                    (NonBasic::Lower, false) => a > 0.0,
                    (NonBasic::Upper, false) => a < 0.0,
                    (NonBasic::Zero, _) => true,
                };
                if !ok {
                    continue;
                }
                let d = self.reduced_cost(j, &y, false);
                cands.push((j, d.abs(), a.abs()));
            }
            if cands.is_empty() {
                return LpStatus::Infeasible;
            }
            let t_max = cands
                .iter()
                .map(|&(_, d, a)| (d + OPT_TOL) / a)
                .fold(f64::INFINITY, f64::min);
            let mut q = NONE;
            let mut q_alpha = 0.0;
            for &(j, d, a) in &cands {
                if d / a <= t_max && (a > q_alpha || (a == q_alpha && j < q)) {
                    q = j;
                    q_alpha = a;
                }
            }
            let w = self.ftran_column(q);
            let wr = w[r_out];
            if (wr - alpha[q]).abs() > 1e-6 * (1.0 + wr.abs()) || wr.abs() <= PIVOT_TOL {
                if !self.refactor() {
                    return LpStatus::NumericalFailure;
                }
                self.iterations += 1;
                continue;
            }
            let step = (self.x[leaving] - target) / wr;
            self.x[q] += step;
            for (rr, &wv) in w.iter().enumerate() {
                if wv != 0.0 {
                    let j = self.basic[rr];
                    self.x[j] -= step * wv;
                }
            }
            let state = if below {
                NonBasic::Lower
            } else {
                NonBasic::Upper
            };
            self.pivot_in(q, r_out, &w, state);
            self.iterations += 1;
        }
    }

    pub fn result(&self, status: LpStatus) -> LpResult {
        let total = self.model.n + self.model.m;
        let (y, d) = if status == LpStatus::Optimal {
            let y = self.duals(false);
            let d = (0..total)
                .map(|j| {
                    if self.pos_of[j] != NONE {
                        0.0
                    } else {
                        self.reduced_cost(j, &y, false)
                    }
                })
                .collect();
            (y, d)
        } else {
            (Vec::new(), Vec::new())
        };
        LpResult {
            status,
            objective: self.model.source_objective(&self.x),
            x: self.x.clone(),
            y,
            d,
            iterations: self.iterations,
            warm: if status == LpStatus::Optimal {
                Some(self.snapshot())
            } else {
                None
            },
        }
    }
}

/// Lagrangian lower bound of the internal minimization implied by row duals
/// `y` (weak duality): `min_{l <= x <= u} (c - A^T y) . x` over all columns.
pub(crate) fn dual_bound(model: &LpModel, lower: &[f64], upper: &[f64], d: &[f64]) -> f64 {
    let mut g = 0.0;
    for j in 0..model.n + model.m {
        let dj = d[j];
        if dj.abs() <= 1e-12 {
            continue;
        }
        let bound = if dj > 0.0 { lower[j] } else { upper[j] };
        if !bound.is_finite() {
            return f64::NEG_INFINITY;
        }
        g += dj * bound;
    }
    g
}

pub(crate) fn solve(model: &LpModel) -> LpResult {
    let mut s = Simplex::new(model);
    let status = s.primal();
    s.result(status)
}
