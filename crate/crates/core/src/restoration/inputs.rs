use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::stage::RestorationStage;
use crate::network::{BusId, MicrogridPartition, NetworkModel};

/// Energization status of every element, as retained from the first step
/// of the previous stage. Absent entries read as de-energized.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ElementStatus {
    pub buses: BTreeMap<BusId, bool>,
    pub lines: BTreeMap<String, bool>,
    pub loads: BTreeMap<String, bool>,
    pub generators: BTreeMap<String, bool>,
}

impl ElementStatus {
    pub fn bus(&self, id: BusId) -> bool {
        self.buses.get(&id).copied().unwrap_or(false)
    }
    pub fn line(&self, id: &str) -> bool {
        self.lines.get(id).copied().unwrap_or(false)
    }
    pub fn load(&self, id: &str) -> bool {
        self.loads.get(id).copied().unwrap_or(false)
    }
    pub fn generator(&self, id: &str) -> bool {
        self.generators.get(id).copied().unwrap_or(false)
    }

    /// Elements energized in `self` but not in `next`.
    pub fn lost_in(&self, next: &ElementStatus) -> Vec<String> {
        let mut out = Vec::new();
        for (b, &on) in &self.buses {
            if on && !next.bus(*b) {
                out.push(format!("bus {b}"));
            }
        }
        for (kind, map, other) in [
            ("line", &self.lines, &next.lines),
            ("load", &self.loads, &next.loads),
            ("generator", &self.generators, &next.generators),
        ] {
            for (id, &on) in map {
                if on && !other.get(id).copied().unwrap_or(false) {
                    out.push(format!("{kind} {id}"));
                }
            }
        }
        out
    }
}

/// State handed from one restoration stage to the next.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageInputs {
    /// 1-based stage counter.
    pub stage: usize,
    /// Lookahead steps solved per stage.
    pub horizon: usize,
    pub status: ElementStatus,
    /// Active output per generator and phase (pu).
    pub dispatch: BTreeMap<String, [f64; 3]>,
    /// Maximum load step bound per grid-forming generator (pu per phase).
    pub max_load_step: BTreeMap<String, f64>,
    /// Measured frequency drop of the previous stage per microgrid (Hz).
    /// A microgrid without an entry has no nadir yet.
    pub delta_f_meas: BTreeMap<usize, f64>,
    pub delta_f_max: f64,
    /// Load-step gain (pu per Hz).
    pub alpha: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum InputError {
    #[error("horizon must be at least 1")]
    Horizon,
    #[error("stage index must start at 1")]
    Stage,
    #[error("alpha must be finite and non-negative, got {0}")]
    Alpha(f64),
    #[error("maximum frequency drop must be positive, got {0}")]
    DeltaFMax(f64),
    #[error("measured frequency drop for microgrid {mg} must be finite and non-negative, got {value}")]
    DeltaFMeas { mg: usize, value: f64 },
    #[error("{0}")]
    Inconsistent(String),
}

impl StageInputs {
    /// State before the first stage: only the blocks holding a grid-forming
    /// generator are energized, and nothing is dispatched.
    pub fn initial(
        net: &NetworkModel,
        partition: &MicrogridPartition,
        horizon: usize,
        alpha: f64,
        delta_f_max: f64,
    ) -> Self {
        let mut status = ElementStatus::default();
        for b in &net.buses {
            status.buses.insert(b.id, false);
        }
        for l in &net.lines {
            status.lines.insert(l.id.clone(), false);
        }
        for l in &net.loads {
            status.loads.insert(l.id.clone(), false);
        }
        for g in &net.generators {
            status.generators.insert(g.id.clone(), false);
        }
        for mg in &partition.microgrids {
            for gid in &mg.forming_generators {
                status.generators.insert(gid.clone(), true);
                let bus = net.generators.iter().find(|g| &g.id == gid).expect("known").bus;
                let block = partition
                    .blocks
                    .iter()
                    .find(|b| b.buses.binary_search(&bus).is_ok())
                    .expect("every bus has a block");
                for &b in &block.buses {
                    status.buses.insert(b, true);
                }
            }
        }
        for l in &net.lines {
            if !l.switchable && !l.faulted && status.bus(l.from) && status.bus(l.to) {
                status.lines.insert(l.id.clone(), true);
            }
        }
        StageInputs {
            stage: 1,
            horizon,
            status,
            dispatch: BTreeMap::new(),
            max_load_step: BTreeMap::new(),
            delta_f_meas: BTreeMap::new(),
            delta_f_max,
            alpha,
        }
    }

    /// Fold the statuses and dispatch of a decoded stage into this state.
    pub fn absorb(&mut self, st: &RestorationStage) {
        let s = &mut self.status;
        s.buses.extend(st.status.buses.iter().map(|(k, v)| (*k, *v)));
        s.lines.extend(st.status.lines.iter().map(|(k, v)| (k.clone(), *v)));
        s.loads.extend(st.status.loads.iter().map(|(k, v)| (k.clone(), *v)));
        s.generators.extend(st.status.generators.iter().map(|(k, v)| (k.clone(), *v)));
        self.dispatch.extend(st.gen_p.iter().map(|(k, v)| (k.clone(), *v)));
    }

    pub fn validate(&self, net: &NetworkModel) -> Result<(), InputError> {
        if self.horizon < 1 {
            return Err(InputError::Horizon);
        }
        if self.stage < 1 {
            return Err(InputError::Stage);
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(InputError::Alpha(self.alpha));
        }
        if !(self.delta_f_max.is_finite() && self.delta_f_max > 0.0) {
            return Err(InputError::DeltaFMax(self.delta_f_max));
        }
        for (&mg, &v) in &self.delta_f_meas {
            if !(v.is_finite() && v >= 0.0) {
                return Err(InputError::DeltaFMeas { mg, value: v });
            }
        }
        for l in &net.lines {
            if self.status.line(&l.id) {
                if l.faulted {
                    return Err(InputError::Inconsistent(format!(
                        "line {} is marked energized but is faulted",
                        l.id
                    )));
                }
                if !self.status.bus(l.from) || !self.status.bus(l.to) {
                    return Err(InputError::Inconsistent(format!(
                        "line {} is energized with a dead end bus",
                        l.id
                    )));
                }
            }
        }
        for l in &net.loads {
            if self.status.load(&l.id) && !self.status.bus(l.bus) {
                return Err(InputError::Inconsistent(format!(
                    "load {} is energized on dead bus {}",
                    l.id, l.bus
                )));
            }
        }
        for g in &net.generators {
            if !g.is_forming() && self.status.generator(&g.id) && !self.status.bus(g.bus) {
                return Err(InputError::Inconsistent(format!(
                    "generator {} is on at dead bus {}",
                    g.id, g.bus
                )));
            }
        }
        for (id, p) in &self.dispatch {
            if p.iter().any(|v| !v.is_finite()) {
                return Err(InputError::Inconsistent(format!(
                    "dispatch of {id} is not finite"
                )));
            }
        }
        Ok(())
    }
}
