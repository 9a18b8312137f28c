use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use super::inputs::ElementStatus;
use super::stage::RestorationStage;
use crate::network::{BusId, MicrogridPartition, NetworkModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

impl CheckReport {
    fn from(violations: Vec<String>) -> Self {
        CheckReport {
            ok: violations.is_empty(),
            violations,
        }
    }
}

/// Energized buses and closed lines of the microgrid must form one tree.
pub fn check_radiality(stage: &RestorationStage, net: &NetworkModel) -> CheckReport {
    let buses: Vec<BusId> = stage
        .status
        .buses
        .iter()
        .filter(|(_, &on)| on)
        .map(|(&b, _)| b)
        .collect();
    let pos: BTreeMap<BusId, usize> = buses.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let mut uf = UnionFind::<usize>::new(buses.len());
    let mut violations = Vec::new();
    for (id, &on) in &stage.status.lines {
        if !on {
            continue;
        }
        let l = net.line(id).expect("stage lines exist in the network");
        match (pos.get(&l.from), pos.get(&l.to)) {
            (Some(&a), Some(&b)) => {
                if !uf.union(a, b) {
                    violations.push(format!("closing line {id} forms a cycle"));
                }
            }
            _ => violations.push(format!("line {id} is closed with a dead end bus")),
        }
    }
    let roots: BTreeSet<usize> = (0..buses.len()).map(|i| uf.find(i)).collect();
    if roots.len() > 1 {
        violations.push(format!(
            "energized network of microgrid {} splits into {} parts",
            stage.microgrid,
            roots.len()
        ));
    }
    CheckReport::from(violations)
}

/// Largest nodal power-balance residual (pu) over all buses and phases.
pub fn power_balance_residual(stage: &RestorationStage, net: &NetworkModel) -> f64 {
    let mut worst = 0.0f64;
    for (&bus, _) in &stage.status.buses {
        let b = net.bus(bus).expect("stage buses exist");
        for ph in b.phases.iter() {
            let k = ph.index();
            for reactive in [false, true] {
                let flows = if reactive { &stage.line_q } else { &stage.line_p };
                let gens = if reactive { &stage.gen_q } else { &stage.gen_p };
                let mut r = 0.0;
                for (id, f) in flows {
                    let l = net.line(id).expect("stage lines exist");
                    if l.from == bus {
                        r += f[k];
                    } else if l.to == bus {
                        r -= f[k];
                    }
                }
                for (id, p) in gens {
                    if net.generators.iter().any(|g| &g.id == id && g.bus == bus) {
                        r -= p[k];
                    }
                }
                for l in net.loads.iter().filter(|l| l.bus == bus) {
                    if stage.status.load(&l.id) {
                        r += if reactive { l.q[k] } else { l.p[k] };
                    }
                }
                worst = worst.max(r.abs());
            }
        }
    }
    worst
}

pub fn check_power_balance(stage: &RestorationStage, net: &NetworkModel, tol: f64) -> (bool, f64) {
    let r = power_balance_residual(stage, net);
    (r <= tol, r)
}

/// Energized buses sit inside their squared-voltage box, dead ones at zero.
pub fn check_voltage_box(stage: &RestorationStage, net: &NetworkModel, tol: f64) -> CheckReport {
    let mut v = Vec::new();
    for (&bus, &on) in &stage.status.buses {
        let b = net.bus(bus).expect("stage buses exist");
        let u = stage.voltage.get(&bus).copied().unwrap_or([0.0; 3]);
        for ph in b.phases.iter() {
            let x = u[ph.index()];
            let ok = if on {
                x >= b.v_min_sq - tol && x <= b.v_max_sq + tol
            } else {
                x.abs() <= tol
            };
            if !ok {
                v.push(format!("bus {bus} phase {} has U = {x}", ph.letter()));
            }
        }
    }
    CheckReport::from(v)
}

/// Nothing energized before may be de-energized now.
pub fn check_monotone(prev: &ElementStatus, next: &ElementStatus) -> CheckReport {
    CheckReport::from(
        prev.lost_in(next)
            .into_iter()
            .map(|e| format!("{e} was de-energized"))
            .collect(),
    )
}

/// Switch and block sequencing between two consecutive retained states:
/// closed switches have both ends live, solid lines follow their ends,
/// a newly closed switch touches exactly one block that was already live,
/// and a newly energized block is picked up through exactly one switch.
pub fn check_sequencing(
    prev: &ElementStatus,
    stage: &RestorationStage,
    net: &NetworkModel,
    partition: &MicrogridPartition,
) -> CheckReport {
    let mut v = Vec::new();
    let block_of: BTreeMap<BusId, usize> = partition
        .blocks
        .iter()
        .flat_map(|b| b.buses.iter().map(move |&bus| (bus, b.id)))
        .collect();
    let was_live = |b: usize| partition.blocks[b].buses.iter().any(|&bus| prev.bus(bus));
    let live = |b: usize| partition.blocks[b].buses.iter().any(|&bus| stage.status.bus(bus));
    let forming: BTreeSet<usize> = net
        .generators
        .iter()
        .filter(|g| g.is_forming())
        .map(|g| block_of[&g.bus])
        .collect();
    let mut feeds: BTreeMap<usize, usize> = BTreeMap::new();
    for (id, &on) in &stage.status.lines {
        let l = net.line(id).expect("stage lines exist");
        let (a, b) = (stage.status.bus(l.from), stage.status.bus(l.to));
        if l.faulted && on {
            v.push(format!("faulted line {id} is closed"));
        }
        if l.switchable {
            if on && !(a && b) {
                v.push(format!("switch {id} closed with a dead end"));
            }
            if on && !prev.line(id) {
                let (bi, bj) = (block_of[&l.from], block_of[&l.to]);
                if was_live(bi) == was_live(bj) {
                    v.push(format!("switch {id} closed between blocks with equal previous status"));
                }
                for blk in [bi, bj] {
                    if !was_live(blk) {
                        *feeds.entry(blk).or_default() += 1;
                    }
                }
            }
        } else if !l.faulted && (on != a || on != b) {
            v.push(format!("solid line {id} status differs from its end buses"));
        }
    }
    for (&blk, &n) in &feeds {
        if n > 1 {
            v.push(format!("block {blk} picked up through {n} switches"));
        }
    }
    for b in &partition.blocks {
        if live(b.id) && !was_live(b.id) && !forming.contains(&b.id) && !feeds.contains_key(&b.id) {
            v.push(format!("block {} energized without a closing switch", b.id));
        }
        let statuses: BTreeSet<bool> = b
            .buses
            .iter()
            .filter(|bus| stage.status.buses.contains_key(bus))
            .map(|&bus| stage.status.bus(bus))
            .collect();
        if statuses.len() > 1 {
            v.push(format!("block {} is partially energized", b.id));
        }
    }
    for l in &net.loads {
        if let Some(&on) = stage.status.loads.get(&l.id) {
            if on && !stage.status.bus(l.bus) {
                v.push(format!("load {} on dead bus", l.id));
            }
            if !l.switchable && on != stage.status.bus(l.bus) {
                v.push(format!("fixed load {} differs from its bus", l.id));
            }
        }
    }
    for g in net.generators.iter().filter(|g| !g.is_forming()) {
        if stage.status.generator(&g.id) && !stage.status.bus(g.bus) {
            v.push(format!("generator {} on at dead bus", g.id));
        }
    }
    CheckReport::from(v)
}
