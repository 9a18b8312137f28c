use mgrestore_milp::{ConstraintSense, LinearConstraint, MilpProblem};
use thiserror::Error;

use super::build::FrequencyMode;
use super::index::{Element, ModelIndex, VarClass};
use super::inputs::StageInputs;
use crate::network::Phase;

#[derive(Debug, Error, PartialEq)]
pub enum FrequencyError {
    #[error("alpha must be finite and non-negative, got {0}")]
    Alpha(f64),
    #[error("maximum frequency drop must be positive, got {0}")]
    DeltaFMax(f64),
    #[error("no previous load step bound for generator {0}")]
    MissingBound(String),
    #[error("no measured frequency drop for microgrid {0}")]
    MissingNadir(usize),
}

/// `max(0, prev + alpha * (delta_f_max - delta_f_meas))`, all in pu and Hz.
pub fn update_max_load_step(prev: f64, alpha: f64, delta_f_max: f64, delta_f_meas: f64) -> f64 {
    (prev + alpha * (delta_f_max - delta_f_meas)).max(0.0)
}

/// Step-to-step bound increment and the bound at the first step for one
/// grid-forming unit, or `None` while no bound applies (first stage).
pub fn step_one_bound(
    inputs: &StageInputs,
    mode: FrequencyMode,
    microgrid: usize,
    generator: &str,
) -> Result<Option<(f64, f64)>, FrequencyError> {
    let prev = match inputs.max_load_step.get(generator) {
        Some(&v) => v,
        None => return Ok(None),
    };
    match mode {
        FrequencyMode::Off => Ok(None),
        FrequencyMode::ConstantRamp => Ok(Some((prev, 0.0))),
        FrequencyMode::Adaptive => {
            let meas = *inputs
                .delta_f_meas
                .get(&microgrid)
                .ok_or(FrequencyError::MissingNadir(microgrid))?;
            let inc = inputs.alpha * (inputs.delta_f_max - meas);
            Ok(Some((update_max_load_step(prev, inputs.alpha, inputs.delta_f_max, meas), inc)))
        }
    }
}

/// Add the load-step recursion and the ramp limits of grid-forming units.
///
/// In the first stage only the ramp limits are added and each load-step
/// variable keeps its capacity bound. Afterwards the first step is capped
/// by the carried bound and later steps may grow by the nadir-driven
/// increment. A negative increment holds the bound over the lookahead.
pub fn add_frequency_constraints(
    problem: &mut MilpProblem,
    index: &ModelIndex,
    inputs: &StageInputs,
    mode: FrequencyMode,
) -> Result<(), FrequencyError> {
    if !(inputs.alpha.is_finite() && inputs.alpha >= 0.0) {
        return Err(FrequencyError::Alpha(inputs.alpha));
    }
    if !(inputs.delta_f_max.is_finite() && inputs.delta_f_max > 0.0) {
        return Err(FrequencyError::DeltaFMax(inputs.delta_f_max));
    }
    if mode == FrequencyMode::Off {
        return Ok(());
    }
    let mg = index.microgrid;
    let forming: Vec<String> = index
        .keys()
        .filter(|(_, k)| k.class == VarClass::MaxLoadStep && k.step == 1)
        .map(|(_, k)| match &k.element {
            Element::Generator(g) => g.clone(),
            _ => unreachable!("load-step variables belong to generators"),
        })
        .collect();
    for g in &forming {
        let mls = |t: usize| {
            index
                .get(VarClass::MaxLoadStep, Element::Generator(g.clone()), None, t)
                .expect("one load-step variable per step")
        };
        if let Some((first, inc)) = step_one_bound(inputs, mode, mg, g)? {
            let v = &mut problem.variables[mls(1)];
            v.upper = v.upper.min(first);
            for t in 2..=index.horizon {
                problem.constraints.push(LinearConstraint::new(
                    vec![(mls(t), 1.0), (mls(t - 1), -1.0)],
                    ConstraintSense::Le,
                    inc.max(0.0),
                    format!("mls[{g},{t}]"),
                ));
            }
        }
        let prev = inputs.dispatch.get(g).copied().unwrap_or([0.0; 3]);
        for ph in Phase::ALL {
            for t in 1..=index.horizon {
                let Some(p) = index.get(VarClass::GenP, Element::Generator(g.clone()), Some(ph), t) else {
                    continue;
                };
                let (mut up, mut down) = (vec![(p, 1.0), (mls(t), -1.0)], vec![(p, -1.0), (mls(t), -1.0)]);
                let (mut rhs_up, mut rhs_down) = (0.0, 0.0);
                if t == 1 {
                    rhs_up += prev[ph.index()];
                    rhs_down -= prev[ph.index()];
                } else {
                    let q = index
                        .get(VarClass::GenP, Element::Generator(g.clone()), Some(ph), t - 1)
                        .expect("same phases every step");
                    up.push((q, -1.0));
                    down.push((q, 1.0));
                }
                problem.constraints.push(LinearConstraint::new(
                    up,
                    ConstraintSense::Le,
                    rhs_up,
                    format!("ramp+[{g},{},{t}]", ph.letter()),
                ));
                problem.constraints.push(LinearConstraint::new(
                    down,
                    ConstraintSense::Le,
                    rhs_down,
                    format!("ramp-[{g},{},{t}]", ph.letter()),
                ));
            }
        }
    }
    Ok(())
}
