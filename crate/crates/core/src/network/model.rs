//! Feeder document schema and the validated per-unit network model.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::phase::{Phase, PhaseSet};

pub type BusId = u32;
pub type Matrix3 = [[Complex64; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    GridForming,
    GridFollowing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseDoc {
    /// Line-to-line voltage base.
    pub kv: f64,
    /// Three-phase power base.
    pub mva: f64,
}

fn default_v_min() -> f64 {
    0.95
}
fn default_v_max() -> f64 {
    1.05
}
fn default_true() -> bool {
    true
}
fn default_priority() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BusDoc {
    pub id: BusId,
    pub phases: PhaseSet,
    /// Voltage magnitude limits in per unit.
    #[serde(default = "default_v_min")]
    pub v_min: f64,
    #[serde(default = "default_v_max")]
    pub v_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineDoc {
    pub id: String,
    pub from: BusId,
    pub to: BusId,
    pub phases: PhaseSet,
    /// Series impedance in ohms, `[re, im]` per entry.
    pub impedance: [[[f64; 2]; 3]; 3],
    #[serde(default)]
    pub switchable: bool,
    /// Per-phase flow limits.
    pub p_max_kw: f64,
    pub q_max_kvar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadDoc {
    pub id: String,
    pub bus: BusId,
    pub kw: BTreeMap<Phase, f64>,
    #[serde(default)]
    pub kvar: BTreeMap<Phase, f64>,
    #[serde(default = "default_true")]
    pub switchable: bool,
    #[serde(default = "default_priority")]
    pub priority: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub id: String,
    pub bus: BusId,
    pub kind: GenKind,
    pub kw: BTreeMap<Phase, f64>,
    #[serde(default)]
    pub kvar: BTreeMap<Phase, f64>,
}

/// On-disk feeder description. Field names are documented in
/// `docs/formats.md`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeederDocument {
    #[serde(default)]
    pub name: String,
    pub base: BaseDoc,
    pub buses: Vec<BusDoc>,
    pub lines: Vec<LineDoc>,
    #[serde(default)]
    pub loads: Vec<LoadDoc>,
    #[serde(default)]
    pub generators: Vec<GeneratorDoc>,
    #[serde(default)]
    pub faults: Vec<String>,
}

#[derive(Debug, Error)]
pub enum FeederError {
    #[error("feeder document does not match the schema: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("duplicate {kind} id {id}")]
    Duplicate { kind: &'static str, id: String },
    #[error("{device} references unknown bus {bus}")]
    UnknownBus { device: String, bus: BusId },
    #[error("phase inconsistency at {device}: {detail}")]
    Phase { device: String, detail: String },
    #[error("invalid value at {device}: {detail}")]
    InvalidValue { device: String, detail: String },
    #[error("fault references unknown line {0}")]
    UnknownLine(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bus {
    pub id: BusId,
    pub phases: PhaseSet,
    pub v_min_sq: f64,
    pub v_max_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub id: String,
    pub from: BusId,
    pub to: BusId,
    pub phases: PhaseSet,
    /// Per-unit series impedance; rows and columns of absent phases are zero.
    pub z: Matrix3,
    pub switchable: bool,
    pub p_max: f64,
    pub q_max: f64,
    pub faulted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Load {
    pub id: String,
    pub bus: BusId,
    pub phases: PhaseSet,
    /// Per-unit demand by phase index.
    pub p: [f64; 3],
    pub q: [f64; 3],
    pub switchable: bool,
    pub priority: f64,
}

impl Load {
    pub fn total_p(&self) -> f64 {
        self.p.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub id: String,
    pub bus: BusId,
    pub kind: GenKind,
    pub phases: PhaseSet,
    pub p_max: [f64; 3],
    pub q_max: [f64; 3],
}

impl Generator {
    pub fn is_forming(&self) -> bool {
        self.kind == GenKind::GridForming
    }

    pub fn total_p_max(&self) -> f64 {
        self.p_max.iter().sum()
    }
}

/// Validated feeder in per unit. Immutable once built; `apply_faults`
/// returns a modified copy.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel {
    pub name: String,
    pub base_kv: f64,
    pub base_mva: f64,
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub loads: Vec<Load>,
    pub generators: Vec<Generator>,
    bus_pos: HashMap<BusId, usize>,
    source: FeederDocument,
}

impl NetworkModel {
    /// Power base in kW.
    pub fn base_kw(&self) -> f64 {
        self.base_mva * 1000.0
    }

    pub fn z_base(&self) -> f64 {
        self.base_kv * self.base_kv / self.base_mva
    }

    pub fn bus(&self, id: BusId) -> Option<&Bus> {
        self.bus_pos.get(&id).map(|&i| &self.buses[i])
    }

    pub fn bus_position(&self, id: BusId) -> Option<usize> {
        self.bus_pos.get(&id).copied()
    }

    pub fn line(&self, id: &str) -> Option<&Line> {
        self.lines.iter().find(|l| l.id == id)
    }

    pub fn faulted_lines(&self) -> Vec<&str> {
        self.lines
            .iter()
            .filter(|l| l.faulted)
            .map(|l| l.id.as_str())
            .collect()
    }

    /// Total load in kW.
    pub fn total_load_kw(&self) -> f64 {
        self.loads.iter().map(|l| l.total_p()).sum::<f64>() * self.base_kw()
    }

    /// The document this model was built from, with the current fault set.
    pub fn document(&self) -> &FeederDocument {
        &self.source
    }

    pub(crate) fn set_faults(&mut self, ids: &BTreeSet<String>) {
        for l in &mut self.lines {
            l.faulted = ids.contains(&l.id);
        }
        self.source.faults = self
            .lines
            .iter()
            .filter(|l| l.faulted)
            .map(|l| l.id.clone())
            .collect();
    }
}

fn check_unique<'a>(
    kind: &'static str,
    ids: impl Iterator<Item = &'a str>,
) -> Result<(), FeederError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(FeederError::Duplicate {
                kind,
                id: id.to_string(),
            });
        }
    }
    Ok(())
}

fn per_phase(
    device: &str,
    map: &BTreeMap<Phase, f64>,
    scale: f64,
    allow_negative: bool,
) -> Result<[f64; 3], FeederError> {
    let mut out = [0.0; 3];
    for (&p, &v) in map {
        if !v.is_finite() || (!allow_negative && v < 0.0) {
            return Err(FeederError::InvalidValue {
                device: device.to_string(),
                detail: format!("phase {p} value {v}"),
            });
        }
        out[p.index()] = v / scale;
    }
    Ok(out)
}

fn device_phases(
    device: &str,
    kw: &BTreeMap<Phase, f64>,
    kvar: &BTreeMap<Phase, f64>,
    bus: &Bus,
) -> Result<PhaseSet, FeederError> {
    let phases: PhaseSet = kw.keys().copied().collect();
    if phases.is_empty() {
        return Err(FeederError::Phase {
            device: device.to_string(),
            detail: "no phase listed".into(),
        });
    }
    let kvar_phases: PhaseSet = kvar.keys().copied().collect();
    if !kvar_phases.is_subset(phases) {
        return Err(FeederError::Phase {
            device: device.to_string(),
            detail: format!("kvar phases {kvar_phases} exceed kw phases {phases}"),
        });
    }
    if !phases.is_subset(bus.phases) {
        return Err(FeederError::Phase {
            device: device.to_string(),
            detail: format!("phases {phases} not all present on bus {} ({})", bus.id, bus.phases),
        });
    }
    Ok(phases)
}

/// Parse and validate a feeder document.
pub fn parse_feeder(text: &str) -> Result<NetworkModel, FeederError> {
    let doc: FeederDocument = serde_json::from_str(text)?;
    build_network(doc)
}

/// Validate a feeder document and convert it to per unit.
pub fn build_network(doc: FeederDocument) -> Result<NetworkModel, FeederError> {
    let base = &doc.base;
    if !(base.kv > 0.0 && base.mva > 0.0 && base.kv.is_finite() && base.mva.is_finite()) {
        return Err(FeederError::InvalidValue {
            device: "base".into(),
            detail: format!("kv={} mva={}", base.kv, base.mva),
        });
    }
    let base_kw = base.mva * 1000.0;
    let z_base = base.kv * base.kv / base.mva;

    let bus_ids: Vec<String> = doc.buses.iter().map(|b| b.id.to_string()).collect();
    check_unique("bus", bus_ids.iter().map(|s| s.as_str()))?;
    check_unique("line", doc.lines.iter().map(|l| l.id.as_str()))?;
    check_unique("load", doc.loads.iter().map(|l| l.id.as_str()))?;
    check_unique("generator", doc.generators.iter().map(|g| g.id.as_str()))?;

    let mut buses = Vec::with_capacity(doc.buses.len());
    let mut bus_pos = HashMap::new();
    for b in &doc.buses {
        if !(b.v_min > 0.0 && b.v_min < b.v_max && b.v_max.is_finite()) {
            return Err(FeederError::InvalidValue {
                device: format!("bus {}", b.id),
                detail: format!("voltage limits [{}, {}]", b.v_min, b.v_max),
            });
        }
        bus_pos.insert(b.id, buses.len());
        buses.push(Bus {
            id: b.id,
            phases: b.phases,
            v_min_sq: b.v_min * b.v_min,
            v_max_sq: b.v_max * b.v_max,
        });
    }
    let lookup = |device: &str, id: BusId| -> Result<&Bus, FeederError> {
        bus_pos
            .get(&id)
            .map(|&i| &buses[i])
            .ok_or_else(|| FeederError::UnknownBus {
                device: device.to_string(),
                bus: id,
            })
    };

    let mut lines = Vec::with_capacity(doc.lines.len());
    for l in &doc.lines {
        let dev = format!("line {}", l.id);
        let from = lookup(&dev, l.from)?;
        let to = lookup(&dev, l.to)?;
        if l.from == l.to {
            return Err(FeederError::InvalidValue {
                device: dev,
                detail: "both ends on the same bus".into(),
            });
        }
        if !l.phases.is_subset(from.phases) || !l.phases.is_subset(to.phases) {
            return Err(FeederError::Phase {
                device: dev,
                detail: format!("line phases {} not present at both ends", l.phases),
            });
        }
        if !(l.p_max_kw > 0.0 && l.q_max_kvar > 0.0) {
            return Err(FeederError::InvalidValue {
                device: dev,
                detail: "flow limits must be positive".into(),
            });
        }
        let mut z = [[Complex64::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let [re, im] = l.impedance[i][j];
                if !re.is_finite() || !im.is_finite() {
                    return Err(FeederError::InvalidValue {
                        device: dev,
                        detail: "non-finite impedance".into(),
                    });
                }
                let present = l.phases.contains(Phase::ALL[i]) && l.phases.contains(Phase::ALL[j]);
                if !present && (re != 0.0 || im != 0.0) {
                    return Err(FeederError::Phase {
                        device: dev,
                        detail: format!("impedance entry ({i},{j}) set on an absent phase"),
                    });
                }
                z[i][j] = Complex64::new(re, im) / z_base;
            }
        }
        lines.push(Line {
            id: l.id.clone(),
            from: l.from,
            to: l.to,
            phases: l.phases,
            z,
            switchable: l.switchable,
            p_max: l.p_max_kw / base_kw,
            q_max: l.q_max_kvar / base_kw,
            faulted: false,
        });
    }

    let mut loads = Vec::with_capacity(doc.loads.len());
    for l in &doc.loads {
        let dev = format!("load {}", l.id);
        let bus = lookup(&dev, l.bus)?;
        let phases = device_phases(&dev, &l.kw, &l.kvar, bus)?;
        if !(l.priority.is_finite() && l.priority >= 0.0) {
            return Err(FeederError::InvalidValue {
                device: dev,
                detail: format!("priority {}", l.priority),
            });
        }
        loads.push(Load {
            id: l.id.clone(),
            bus: l.bus,
            phases,
            p: per_phase(&dev, &l.kw, base_kw, false)?,
            q: per_phase(&dev, &l.kvar, base_kw, true)?,
            switchable: l.switchable,
            priority: l.priority,
        });
    }

    let mut generators = Vec::with_capacity(doc.generators.len());
    for g in &doc.generators {
        let dev = format!("generator {}", g.id);
        let bus = lookup(&dev, g.bus)?;
        let phases = device_phases(&dev, &g.kw, &g.kvar, bus)?;
        generators.push(Generator {
            id: g.id.clone(),
            bus: g.bus,
            kind: g.kind,
            phases,
            p_max: per_phase(&dev, &g.kw, base_kw, false)?,
            q_max: per_phase(&dev, &g.kvar, base_kw, false)?,
        });
    }

    let mut net = NetworkModel {
        name: doc.name.clone(),
        base_kv: base.kv,
        base_mva: base.mva,
        buses,
        lines,
        loads,
        generators,
        bus_pos,
        source: doc,
    };
    let faults: BTreeSet<String> = net.source.faults.iter().cloned().collect();
    for f in &faults {
        if net.line(f).is_none() {
            return Err(FeederError::UnknownLine(f.clone()));
        }
    }
    net.set_faults(&faults);
    Ok(net)
}
