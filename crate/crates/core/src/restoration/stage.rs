use std::collections::BTreeMap;

use mgrestore_milp::{MilpProblem, MilpSolution, SolveStatus, DEFAULT_INTEGRALITY_TOL};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::index::{Element, ModelIndex, VarClass};
use super::inputs::{ElementStatus, StageInputs};
use crate::network::{BusId, NetworkModel};

/// First-step solution of one microgrid's stage problem. Powers in pu,
/// voltages as squared pu magnitudes, indexed by phase a, b, c.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestorationStage {
    pub stage: usize,
    pub microgrid: usize,
    pub status: ElementStatus,
    pub blocks: BTreeMap<usize, bool>,
    pub gen_p: BTreeMap<String, [f64; 3]>,
    pub gen_q: BTreeMap<String, [f64; 3]>,
    pub line_p: BTreeMap<String, [f64; 3]>,
    pub line_q: BTreeMap<String, [f64; 3]>,
    pub voltage: BTreeMap<BusId, [f64; 3]>,
    /// Picked-up load in this microgrid (kW).
    pub restored_kw: f64,
    /// Load-step variable of each grid-forming unit at the first step (pu).
    pub max_load_step: BTreeMap<String, f64>,
    /// Solver objective over the whole horizon.
    pub objective: f64,
    /// Picked-up load at every lookahead step (kW).
    pub horizon_restored_kw: Vec<f64>,
    pub solver_status: SolveStatus,
    pub nodes: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum ExtractError {
    #[error("solver returned {0} without a usable point")]
    NoSolution(SolveStatus),
    #[error("binary {name} = {value} is not integral")]
    Fractional { name: String, value: f64 },
    #[error("constraint {name} violated by {amount:.3e}")]
    Violated { name: String, amount: f64 },
    #[error("solution has {found} values, problem has {expected} variables")]
    Length { found: usize, expected: usize },
}

/// Tolerance on the retained solution's constraint residuals.
pub const STAGE_TOL: f64 = 1e-6;

/// Keep the first lookahead step of `solution` and discard the rest.
pub fn extract_stage(
    net: &NetworkModel,
    problem: &MilpProblem,
    solution: &MilpSolution,
    index: &ModelIndex,
    inputs: &StageInputs,
) -> Result<RestorationStage, ExtractError> {
    let usable = matches!(
        solution.status,
        SolveStatus::Optimal | SolveStatus::GapLimit | SolveStatus::NodeLimit | SolveStatus::TimeLimit
    ) && solution.has_point();
    if !usable {
        return Err(ExtractError::NoSolution(solution.status));
    }
    if solution.values.len() != problem.num_vars() {
        return Err(ExtractError::Length {
            found: solution.values.len(),
            expected: problem.num_vars(),
        });
    }
    let mut x = solution.values.clone();
    for v in problem.variables.iter().filter(|v| v.is_binary()) {
        let r = x[v.id].round();
        if (x[v.id] - r).abs() > DEFAULT_INTEGRALITY_TOL {
            return Err(ExtractError::Fractional {
                name: v.name.clone(),
                value: x[v.id],
            });
        }
        x[v.id] = r;
    }
    for c in &problem.constraints {
        let amount = c.violation(&x);
        if amount > STAGE_TOL {
            return Err(ExtractError::Violated {
                name: c.name.clone(),
                amount,
            });
        }
    }

    let mut st = RestorationStage {
        stage: inputs.stage,
        microgrid: index.microgrid,
        status: ElementStatus::default(),
        blocks: BTreeMap::new(),
        gen_p: BTreeMap::new(),
        gen_q: BTreeMap::new(),
        line_p: BTreeMap::new(),
        line_q: BTreeMap::new(),
        voltage: BTreeMap::new(),
        restored_kw: 0.0,
        max_load_step: BTreeMap::new(),
        objective: solution.objective,
        horizon_restored_kw: vec![0.0; index.horizon],
        solver_status: solution.status,
        nodes: solution.nodes_explored,
    };
    let base = net.base_kw();
    for (id, key) in index.keys() {
        if key.class == VarClass::LoadOn && x[id] == 1.0 {
            if let Element::Load(l) = &key.element {
                let load = net.loads.iter().find(|d| &d.id == l).expect("indexed load exists");
                st.horizon_restored_kw[key.step - 1] += load.total_p() * base;
            }
        }
        if key.step != 1 {
            continue;
        }
        let val = x[id] + 0.0;
        let on = val == 1.0;
        let ph = key.phase.map(|p| p.index());
        match (&key.class, &key.element) {
            (VarClass::BusOn, Element::Bus(b)) => {
                st.status.buses.insert(*b, on);
            }
            (VarClass::LineOn, Element::Line(l)) => {
                st.status.lines.insert(l.clone(), on);
            }
            (VarClass::GenOn, Element::Generator(g)) => {
                st.status.generators.insert(g.clone(), on);
            }
            (VarClass::LoadOn, Element::Load(l)) => {
                st.status.loads.insert(l.clone(), on);
            }
            (VarClass::BlockOn, Element::Block(b)) => {
                st.blocks.insert(*b, on);
            }
            (VarClass::GenP, Element::Generator(g)) => {
                st.gen_p.entry(g.clone()).or_insert([0.0; 3])[ph.expect("phased")] = val;
            }
            (VarClass::GenQ, Element::Generator(g)) => {
                st.gen_q.entry(g.clone()).or_insert([0.0; 3])[ph.expect("phased")] = val;
            }
            (VarClass::LineP, Element::Line(l)) => {
                st.line_p.entry(l.clone()).or_insert([0.0; 3])[ph.expect("phased")] = val;
            }
            (VarClass::LineQ, Element::Line(l)) => {
                st.line_q.entry(l.clone()).or_insert([0.0; 3])[ph.expect("phased")] = val;
            }
            (VarClass::Voltage, Element::Bus(b)) => {
                st.voltage.entry(*b).or_insert([0.0; 3])[ph.expect("phased")] = val;
            }
            (VarClass::MaxLoadStep, Element::Generator(g)) => {
                st.max_load_step.insert(g.clone(), val);
            }
            _ => unreachable!("index keys pair classes with matching elements"),
        }
    }
    // Grid-forming units have no status variable and are always on.
    for g in st.gen_p.keys().cloned().collect::<Vec<_>>() {
        st.status.generators.entry(g).or_insert(true);
    }
    st.restored_kw = st.horizon_restored_kw[0];
    Ok(st)
}
