use std::collections::{BTreeMap, BTreeSet};

use mgrestore_milp::{ConstraintSense, MilpProblem, ObjectiveSense, ProblemBuilder, ProblemError, VarId};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::index::{Element, ModelIndex, VarClass, VarKey};
use super::inputs::{InputError, StageInputs};
use crate::network::{
    equivalent_impedance, BusBlock, BusId, Generator, Line, Load, MicrogridPartition,
    NetworkModel, Phase,
};

/// How the load-step limit of grid-forming units evolves between stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrequencyMode {
    /// The bound moves by `alpha * (delta_f_max - delta_f_meas)` each stage.
    Adaptive,
    /// The bound stays at the ramp realized in the first stage.
    ConstantRamp,
    /// No ramp limit at all.
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RestorationSettings {
    /// Big-M of the voltage rows is this factor times `U^M - U^m`, raised to
    /// at least the largest squared voltage limit of the line's ends.
    pub big_m_factor: f64,
    /// Objective weight on the load-step variables (pu objective per pu).
    pub mls_penalty: f64,
    /// Objective weight on each newly closed switch at the horizon end.
    pub switch_penalty: f64,
    /// Objective weight on grid-following active output (per pu), which
    /// makes grid-forming units carry load first.
    pub following_penalty: f64,
    pub frequency_mode: FrequencyMode,
}

impl Default for RestorationSettings {
    fn default() -> Self {
        RestorationSettings {
            big_m_factor: 10.0,
            mls_penalty: 1e-5,
            switch_penalty: 1e-5,
            following_penalty: 2e-4,
            frequency_mode: FrequencyMode::Adaptive,
        }
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("no microgrid with id {0}")]
    UnknownMicrogrid(usize),
    #[error("invalid settings: {0}")]
    Settings(String),
    #[error("problem assembly failed: {0}")]
    Problem(#[from] ProblemError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LineRole {
    /// Faulted, or a switch with both ends in one block: held open.
    Open,
    Switch,
    Solid,
}

/// Elements of one microgrid with the lookups the builder needs.
pub(crate) struct MgView<'a> {
    pub buses: Vec<BusId>,
    pub blocks: Vec<&'a BusBlock>,
    pub block_of: BTreeMap<BusId, usize>,
    pub forming_blocks: BTreeSet<usize>,
    pub lines: Vec<(&'a Line, LineRole)>,
    pub loads: Vec<&'a Load>,
    pub gens: Vec<&'a Generator>,
}

impl<'a> MgView<'a> {
    pub fn new(net: &'a NetworkModel, partition: &'a MicrogridPartition, mg_id: usize) -> Option<Self> {
        let mg = partition.microgrids.iter().find(|m| m.id == mg_id)?;
        let in_mg: BTreeSet<BusId> = mg.buses.iter().copied().collect();
        let blocks: Vec<&BusBlock> = mg.blocks.iter().map(|&b| &partition.blocks[b]).collect();
        let mut block_of = BTreeMap::new();
        for b in &blocks {
            for &bus in &b.buses {
                block_of.insert(bus, b.id);
            }
        }
        let gens: Vec<&Generator> = net.generators.iter().filter(|g| in_mg.contains(&g.bus)).collect();
        let forming_blocks = gens
            .iter()
            .filter(|g| g.is_forming())
            .map(|g| block_of[&g.bus])
            .collect();
        let lines = net
            .lines
            .iter()
            .filter(|l| in_mg.contains(&l.from) && in_mg.contains(&l.to))
            .map(|l| {
                let role = if l.faulted || (l.switchable && block_of[&l.from] == block_of[&l.to]) {
                    LineRole::Open
                } else if l.switchable {
                    LineRole::Switch
                } else {
                    LineRole::Solid
                };
                (l, role)
            })
            .collect();
        let loads = net.loads.iter().filter(|l| in_mg.contains(&l.bus)).collect();
        Some(MgView {
            buses: mg.buses.clone(),
            blocks,
            block_of,
            forming_blocks,
            lines,
            loads,
            gens,
        })
    }

    pub fn switch_lines_of(&self, block: usize) -> impl Iterator<Item = &'a Line> + '_ {
        self.lines.iter().filter_map(move |&(l, role)| {
            (role == LineRole::Switch && (self.block_of[&l.from] == block || self.block_of[&l.to] == block))
                .then_some(l)
        })
    }
}

/// Per-step variable ids, keyed the same way as `ModelIndex` but cheap to
/// look up while writing rows.
struct StepVars {
    bus: BTreeMap<BusId, VarId>,
    line: BTreeMap<String, VarId>,
    gen_on: BTreeMap<String, VarId>,
    load: BTreeMap<String, VarId>,
    block: BTreeMap<usize, VarId>,
    gen_p: BTreeMap<(String, Phase), VarId>,
    gen_q: BTreeMap<(String, Phase), VarId>,
    line_p: BTreeMap<(String, Phase), VarId>,
    line_q: BTreeMap<(String, Phase), VarId>,
    volt: BTreeMap<(BusId, Phase), VarId>,
}

struct Builder {
    b: ProblemBuilder,
    index: ModelIndex,
}

impl Builder {
    fn var(&mut self, class: VarClass, element: Element, phase: Option<Phase>, step: usize, lo: f64, hi: f64) -> VarId {
        let key = VarKey {
            class,
            element,
            phase,
            step,
        };
        let name = key.to_string();
        let binary = matches!(
            class,
            VarClass::BusOn | VarClass::LineOn | VarClass::GenOn | VarClass::LoadOn | VarClass::BlockOn
        );
        let id = if binary {
            let id = self.b.add_binary(name);
            self.b.set_bounds(id, lo, hi);
            id
        } else {
            self.b.add_continuous(lo, hi, name)
        };
        let j = self.index.push(key);
        debug_assert_eq!(id, j);
        id
    }

    fn row(&mut self, coeffs: Vec<(VarId, f64)>, sense: ConstraintSense, rhs: f64, name: String) {
        self.b.add_constraint(coeffs, sense, rhs, name);
    }
}

fn voltage_big_m(net: &NetworkModel, l: &Line, factor: f64) -> f64 {
    let a = net.bus(l.from).expect("validated");
    let b = net.bus(l.to).expect("validated");
    let span = (a.v_max_sq - a.v_min_sq).max(b.v_max_sq - b.v_min_sq);
    (factor * span).max(a.v_max_sq.max(b.v_max_sq))
}

/// Assemble the multi-step restoration problem of microgrid `mg_id`.
///
/// The load-step rows are left to `add_frequency_constraints`; without them
/// the load-step variables only carry their capacity bound.
pub fn build_stage_problem(
    net: &NetworkModel,
    partition: &MicrogridPartition,
    mg_id: usize,
    inputs: &StageInputs,
    settings: &RestorationSettings,
) -> Result<(MilpProblem, ModelIndex), BuildError> {
    inputs.validate(net)?;
    if !(settings.big_m_factor.is_finite() && settings.big_m_factor > 0.0) {
        return Err(BuildError::Settings("big_m_factor must be positive".into()));
    }
    if !(settings.mls_penalty >= 0.0 && settings.switch_penalty >= 0.0 && settings.following_penalty >= 0.0) {
        return Err(BuildError::Settings("penalties must be non-negative".into()));
    }
    let v = MgView::new(net, partition, mg_id).ok_or(BuildError::UnknownMicrogrid(mg_id))?;
    let t_max = inputs.horizon;
    let prev = &inputs.status;
    let prev_block: BTreeMap<usize, bool> = v
        .blocks
        .iter()
        .map(|b| (b.id, b.buses.iter().any(|&bus| prev.bus(bus))))
        .collect();

    let mut bld = Builder {
        b: ProblemBuilder::new(),
        index: ModelIndex::default(),
    };
    bld.index.microgrid = mg_id;
    bld.index.horizon = t_max;

    let mut steps: Vec<StepVars> = Vec::with_capacity(t_max);
    for t in 1..=t_max {
        let mut s = StepVars {
            bus: BTreeMap::new(),
            line: BTreeMap::new(),
            gen_on: BTreeMap::new(),
            load: BTreeMap::new(),
            block: BTreeMap::new(),
            gen_p: BTreeMap::new(),
            gen_q: BTreeMap::new(),
            line_p: BTreeMap::new(),
            line_q: BTreeMap::new(),
            volt: BTreeMap::new(),
        };
        for &bus in &v.buses {
            s.bus.insert(bus, bld.var(VarClass::BusOn, Element::Bus(bus), None, t, 0.0, 1.0));
        }
        for &(l, role) in &v.lines {
            let hi = if role == LineRole::Open { 0.0 } else { 1.0 };
            s.line.insert(l.id.clone(), bld.var(VarClass::LineOn, Element::Line(l.id.clone()), None, t, 0.0, hi));
        }
        for g in v.gens.iter().filter(|g| !g.is_forming()) {
            s.gen_on.insert(g.id.clone(), bld.var(VarClass::GenOn, Element::Generator(g.id.clone()), None, t, 0.0, 1.0));
        }
        for l in &v.loads {
            s.load.insert(l.id.clone(), bld.var(VarClass::LoadOn, Element::Load(l.id.clone()), None, t, 0.0, 1.0));
        }
        for b in &v.blocks {
            let lo = if v.forming_blocks.contains(&b.id) { 1.0 } else { 0.0 };
            s.block.insert(b.id, bld.var(VarClass::BlockOn, Element::Block(b.id), None, t, lo, 1.0));
        }
        for g in &v.gens {
            for ph in g.phases.iter() {
                let k = ph.index();
                let e = Element::Generator(g.id.clone());
                s.gen_p.insert((g.id.clone(), ph), bld.var(VarClass::GenP, e.clone(), Some(ph), t, 0.0, g.p_max[k]));
                s.gen_q.insert((g.id.clone(), ph), bld.var(VarClass::GenQ, e, Some(ph), t, 0.0, g.q_max[k]));
            }
        }
        for &(l, _) in &v.lines {
            for ph in l.phases.iter() {
                let e = Element::Line(l.id.clone());
                s.line_p.insert((l.id.clone(), ph), bld.var(VarClass::LineP, e.clone(), Some(ph), t, -l.p_max, l.p_max));
                s.line_q.insert((l.id.clone(), ph), bld.var(VarClass::LineQ, e, Some(ph), t, -l.q_max, l.q_max));
            }
        }
        for &bus in &v.buses {
            let b = net.bus(bus).expect("validated");
            for ph in b.phases.iter() {
                s.volt.insert((bus, ph), bld.var(VarClass::Voltage, Element::Bus(bus), Some(ph), t, 0.0, b.v_max_sq));
            }
        }
        for g in v.gens.iter().filter(|g| g.is_forming()) {
            let cap = g.p_max.iter().copied().fold(0.0, f64::max);
            bld.var(VarClass::MaxLoadStep, Element::Generator(g.id.clone()), None, t, 0.0, cap);
        }
        steps.push(s);
    }

    for t in 1..=t_max {
        let s = &steps[t - 1];
        let p = if t >= 2 { Some(&steps[t - 2]) } else { None };

        // Nodal balance: outflow - inflow = generation - picked-up load.
        for &bus in &v.buses {
            let b = net.bus(bus).expect("validated");
            for ph in b.phases.iter() {
                for reactive in [false, true] {
                    let (flows, gens) = if reactive { (&s.line_q, &s.gen_q) } else { (&s.line_p, &s.gen_p) };
                    let mut c = Vec::new();
                    for &(l, _) in &v.lines {
                        if let Some(&id) = flows.get(&(l.id.clone(), ph)) {
                            if l.from == bus {
                                c.push((id, 1.0));
                            } else if l.to == bus {
                                c.push((id, -1.0));
                            }
                        }
                    }
                    for g in v.gens.iter().filter(|g| g.bus == bus) {
                        if let Some(&id) = gens.get(&(g.id.clone(), ph)) {
                            c.push((id, -1.0));
                        }
                    }
                    for l in v.loads.iter().filter(|l| l.bus == bus) {
                        let d = if reactive { l.q[ph.index()] } else { l.p[ph.index()] };
                        if d != 0.0 {
                            c.push((s.load[&l.id], d));
                        }
                    }
                    let tag = if reactive { "balQ" } else { "balP" };
                    bld.row(c, ConstraintSense::Eq, 0.0, format!("{tag}[{bus},{},{t}]", ph.letter()));
                }
            }
        }

        // Line capacity gated by the line status.
        for &(l, _) in &v.lines {
            let xk = s.line[&l.id];
            for ph in l.phases.iter() {
                for (flows, cap, tag) in [(&s.line_p, l.p_max, "capP"), (&s.line_q, l.q_max, "capQ")] {
                    let f = flows[&(l.id.clone(), ph)];
                    bld.row(vec![(f, 1.0), (xk, -cap)], ConstraintSense::Le, 0.0, format!("{tag}+[{},{},{t}]", l.id, ph.letter()));
                    bld.row(vec![(f, 1.0), (xk, cap)], ConstraintSense::Ge, 0.0, format!("{tag}-[{},{},{t}]", l.id, ph.letter()));
                }
            }
        }

        // Grid-following output gated by the unit status.
        for g in v.gens.iter().filter(|g| !g.is_forming()) {
            let xg = s.gen_on[&g.id];
            for ph in g.phases.iter() {
                let k = ph.index();
                bld.row(vec![(s.gen_p[&(g.id.clone(), ph)], 1.0), (xg, -g.p_max[k])], ConstraintSense::Le, 0.0, format!("genP[{},{},{t}]", g.id, ph.letter()));
                bld.row(vec![(s.gen_q[&(g.id.clone(), ph)], 1.0), (xg, -g.q_max[k])], ConstraintSense::Le, 0.0, format!("genQ[{},{},{t}]", g.id, ph.letter()));
            }
        }

        // Linearized voltage drop, relaxed by big-M when the line is open.
        for &(l, _) in &v.lines {
            let (r, x) = equivalent_impedance(&l.z);
            let m = voltage_big_m(net, l, settings.big_m_factor);
            let xk = s.line[&l.id];
            for ph in l.phases.iter() {
                let i = ph.index();
                let mut c = vec![(s.volt[&(l.from, ph)], 1.0), (s.volt[&(l.to, ph)], -1.0)];
                for ps in l.phases.iter() {
                    let j = ps.index();
                    if r[i][j] != 0.0 {
                        c.push((s.line_p[&(l.id.clone(), ps)], -2.0 * r[i][j]));
                    }
                    if x[i][j] != 0.0 {
                        c.push((s.line_q[&(l.id.clone(), ps)], -2.0 * x[i][j]));
                    }
                }
                let mut up = c.clone();
                up.push((xk, m));
                bld.row(up, ConstraintSense::Le, m, format!("vdrop+[{},{},{t}]", l.id, ph.letter()));
                c.push((xk, -m));
                bld.row(c, ConstraintSense::Ge, -m, format!("vdrop-[{},{},{t}]", l.id, ph.letter()));
            }
        }

        // Voltage box, zero when de-energized.
        for &bus in &v.buses {
            let b = net.bus(bus).expect("validated");
            let xb = s.bus[&bus];
            for ph in b.phases.iter() {
                let u = s.volt[&(bus, ph)];
                bld.row(vec![(u, 1.0), (xb, -b.v_min_sq)], ConstraintSense::Ge, 0.0, format!("vmin[{bus},{},{t}]", ph.letter()));
                bld.row(vec![(u, 1.0), (xb, -b.v_max_sq)], ConstraintSense::Le, 0.0, format!("vmax[{bus},{},{t}]", ph.letter()));
            }
        }

        // Device-to-bus coupling.
        for g in v.gens.iter().filter(|g| !g.is_forming()) {
            bld.row(vec![(s.gen_on[&g.id], 1.0), (s.bus[&g.bus], -1.0)], ConstraintSense::Le, 0.0, format!("genbus[{},{t}]", g.id));
        }
        for &(l, role) in &v.lines {
            let xk = s.line[&l.id];
            let (sense, tag) = match role {
                LineRole::Open => continue,
                LineRole::Switch => (ConstraintSense::Le, "swbus"),
                LineRole::Solid => (ConstraintSense::Eq, "linebus"),
            };
            for end in [l.from, l.to] {
                bld.row(vec![(xk, 1.0), (s.bus[&end], -1.0)], sense, 0.0, format!("{tag}[{},{end},{t}]", l.id));
            }
        }
        for l in &v.loads {
            let sense = if l.switchable { ConstraintSense::Le } else { ConstraintSense::Eq };
            bld.row(vec![(s.load[&l.id], 1.0), (s.bus[&l.bus], -1.0)], sense, 0.0, format!("loadbus[{},{t}]", l.id));
        }

        // No tripping once energized.
        let no_trip = |bld: &mut Builder, cur: VarId, before: Option<VarId>, was_on: bool, name: String| match before {
            Some(pv) => bld.row(vec![(cur, 1.0), (pv, -1.0)], ConstraintSense::Ge, 0.0, name),
            None => bld.row(vec![(cur, 1.0)], ConstraintSense::Ge, if was_on { 1.0 } else { 0.0 }, name),
        };
        for g in v.gens.iter().filter(|g| !g.is_forming()) {
            no_trip(&mut bld, s.gen_on[&g.id], p.map(|p| p.gen_on[&g.id]), prev.generator(&g.id), format!("keepG[{},{t}]", g.id));
        }
        for &(l, role) in &v.lines {
            if role == LineRole::Switch {
                no_trip(&mut bld, s.line[&l.id], p.map(|p| p.line[&l.id]), prev.line(&l.id), format!("keepK[{},{t}]", l.id));
            }
        }
        for l in v.loads.iter().filter(|l| l.switchable) {
            no_trip(&mut bld, s.load[&l.id], p.map(|p| p.load[&l.id]), prev.load(&l.id), format!("keepL[{},{t}]", l.id));
        }

        // Buses share their block's status.
        for b in &v.blocks {
            for &bus in &b.buses {
                bld.row(vec![(s.bus[&bus], 1.0), (s.block[&b.id], -1.0)], ConstraintSense::Eq, 0.0, format!("blk[{bus},{t}]"));
            }
        }

        // Terms at t-1 are either variables of the previous step or
        // constants from the stage inputs.
        let block_prev = |b: usize| -> (Option<VarId>, f64) {
            match p {
                Some(p) => (Some(p.block[&b]), 0.0),
                None => (None, if prev_block[&b] { 1.0 } else { 0.0 }),
            }
        };
        let line_prev = |id: &str| -> (Option<VarId>, f64) {
            match p {
                Some(p) => (Some(p.line[id]), 0.0),
                None => (None, if prev.line(id) { 1.0 } else { 0.0 }),
            }
        };

        for &(l, role) in &v.lines {
            if role != LineRole::Switch {
                continue;
            }
            let (bi, bj) = (v.block_of[&l.from], v.block_of[&l.to]);
            let xk = s.line[&l.id];
            // A switch may only close onto a block that is being energized.
            let mut c = vec![(s.block[&bi], 1.0), (s.block[&bj], 1.0), (xk, -1.0)];
            let mut rhs = 0.0;
            for (var, coef) in [(block_prev(bi), -1.0), (block_prev(bj), -1.0), (line_prev(&l.id), 1.0)] {
                match var {
                    (Some(id), _) => c.push((id, coef)),
                    (None, val) => rhs -= coef * val,
                }
            }
            bld.row(c, ConstraintSense::Ge, rhs, format!("noloop[{},{t}]", l.id));

            // A switch closes only next to a block energized a step earlier.
            let mut c = vec![(xk, 1.0)];
            let mut rhs = 0.0;
            for b in [bi, bj] {
                match block_prev(b) {
                    (Some(id), _) => c.push((id, -1.0)),
                    (None, val) => rhs += val,
                }
            }
            bld.row(c, ConstraintSense::Le, rhs, format!("seq[{},{t}]", l.id));
        }

        for b in &v.blocks {
            let sw: Vec<&Line> = v.switch_lines_of(b.id).collect();
            if !sw.is_empty() {
                // A dead block is picked up through at most one switch.
                let big = sw.len() as f64;
                let mut c = Vec::new();
                let mut rhs = 1.0;
                for l in &sw {
                    c.push((s.line[&l.id], 1.0));
                    match line_prev(&l.id) {
                        (Some(id), _) => c.push((id, -1.0)),
                        (None, val) => rhs += val,
                    }
                }
                match block_prev(b.id) {
                    (Some(id), _) => c.push((id, -big)),
                    (None, val) => rhs += big * val,
                }
                bld.row(c, ConstraintSense::Le, rhs, format!("onefeed[{},{t}]", b.id));
            }
            if !v.forming_blocks.contains(&b.id) {
                // An energized block needs a closed switch to a source.
                let mut c = vec![(s.block[&b.id], 1.0)];
                for l in &sw {
                    c.push((s.line[&l.id], -1.0));
                }
                bld.row(c, ConstraintSense::Le, 0.0, format!("fed[{},{t}]", b.id));
            }
        }
    }

    for s in &steps {
        for l in &v.loads {
            let w = l.priority * l.total_p();
            if w != 0.0 {
                bld.b.add_objective(s.load[&l.id], w);
            }
        }
    }
    if settings.mls_penalty > 0.0 {
        for (id, key) in bld.index.keys() {
            if key.class == VarClass::MaxLoadStep {
                bld.b.add_objective(id, -settings.mls_penalty);
            }
        }
    }
    if settings.following_penalty > 0.0 {
        for s in &steps {
            for g in v.gens.iter().filter(|g| !g.is_forming()) {
                for ph in g.phases.iter() {
                    bld.b.add_objective(s.gen_p[&(g.id.clone(), ph)], -settings.following_penalty);
                }
            }
        }
    }
    if settings.switch_penalty > 0.0 {
        let last = &steps[t_max - 1];
        for &(l, role) in &v.lines {
            if role == LineRole::Switch && !prev.line(&l.id) {
                bld.b.add_objective(last.line[&l.id], -settings.switch_penalty);
            }
        }
    }
    let problem = bld.b.build(ObjectiveSense::Maximize)?;
    Ok((problem, bld.index))
}
