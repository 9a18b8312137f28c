//! Bus blocks, fault isolation and microgrid partitioning.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use super::model::{BusId, FeederError, Matrix3, NetworkModel};

/// Buses joined by closed, healthy, non-switchable lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BusBlock {
    pub id: usize,
    /// Sorted ascending.
    pub buses: Vec<BusId>,
    /// Healthy switchable lines with exactly one end in this block.
    pub switch_lines: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Microgrid {
    pub id: usize,
    pub forming_generators: Vec<String>,
    /// Block ids, ascending.
    pub blocks: Vec<usize>,
    /// Sorted ascending.
    pub buses: Vec<BusId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MicrogridPartition {
    pub microgrids: Vec<Microgrid>,
    /// Islands without a grid-forming generator, as sorted bus lists.
    pub unrestorable: Vec<Vec<BusId>>,
    /// Ids of all bus blocks, indexed like `compute_bus_blocks`.
    pub blocks: Vec<BusBlock>,
}

impl MicrogridPartition {
    pub fn microgrid_of_bus(&self, bus: BusId) -> Option<usize> {
        self.microgrids
            .iter()
            .find(|m| m.buses.binary_search(&bus).is_ok())
            .map(|m| m.id)
    }
}

/// Group buses into connected components under `joins`, ordering the
/// components by their smallest bus id.
fn components(net: &NetworkModel, joins: impl Fn(&super::model::Line) -> bool) -> Vec<Vec<BusId>> {
    let n = net.buses.len();
    let mut uf = UnionFind::<usize>::new(n);
    for l in net.lines.iter().filter(|l| joins(l)) {
        let a = net.bus_position(l.from).expect("validated");
        let b = net.bus_position(l.to).expect("validated");
        uf.union(a, b);
    }
    let mut groups: BTreeMap<usize, Vec<BusId>> = BTreeMap::new();
    for (i, b) in net.buses.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(b.id);
    }
    let mut out: Vec<Vec<BusId>> = groups
        .into_values()
        .map(|mut v| {
            v.sort_unstable();
            v
        })
        .collect();
    out.sort_by_key(|v| v[0]);
    out
}

/// Partition the buses into blocks connected by healthy non-switchable
/// lines. Block ids follow the smallest bus id of each block.
pub fn compute_bus_blocks(net: &NetworkModel) -> Vec<BusBlock> {
    let groups = components(net, |l| !l.switchable && !l.faulted);
    let mut block_of: BTreeMap<BusId, usize> = BTreeMap::new();
    for (k, g) in groups.iter().enumerate() {
        for &b in g {
            block_of.insert(b, k);
        }
    }
    let mut switch_lines: Vec<BTreeSet<String>> = vec![BTreeSet::new(); groups.len()];
    for l in net.lines.iter().filter(|l| l.switchable && !l.faulted) {
        let (a, b) = (block_of[&l.from], block_of[&l.to]);
        if a != b {
            switch_lines[a].insert(l.id.clone());
            switch_lines[b].insert(l.id.clone());
        }
    }
    groups
        .into_iter()
        .zip(switch_lines)
        .enumerate()
        .map(|(id, (buses, sw))| BusBlock {
            id,
            buses,
            switch_lines: sw.into_iter().collect(),
        })
        .collect()
}

/// Copy of `net` with the listed lines added to its fault set.
pub fn apply_faults(net: &NetworkModel, ids: &[&str]) -> Result<NetworkModel, FeederError> {
    let mut set: BTreeSet<String> = net.faulted_lines().into_iter().map(String::from).collect();
    for &id in ids {
        if net.line(id).is_none() {
            return Err(FeederError::UnknownLine(id.to_string()));
        }
        set.insert(id.to_string());
    }
    let mut out = net.clone();
    out.set_faults(&set);
    Ok(out)
}

/// Split the healthy network into islands; each island holding at least one
/// grid-forming generator becomes a microgrid.
pub fn partition_microgrids(net: &NetworkModel) -> MicrogridPartition {
    let blocks = compute_bus_blocks(net);
    let mut block_of: BTreeMap<BusId, usize> = BTreeMap::new();
    for b in &blocks {
        for &bus in &b.buses {
            block_of.insert(bus, b.id);
        }
    }
    let islands = components(net, |l| !l.faulted);
    let mut microgrids = Vec::new();
    let mut unrestorable = Vec::new();
    for island in islands {
        let mut forming: Vec<String> = net
            .generators
            .iter()
            .filter(|g| g.is_forming() && island.binary_search(&g.bus).is_ok())
            .map(|g| g.id.clone())
            .collect();
        if forming.is_empty() {
            unrestorable.push(island);
            continue;
        }
        forming.sort();
        let blocks_in: BTreeSet<usize> = island.iter().map(|b| block_of[b]).collect();
        microgrids.push(Microgrid {
            id: microgrids.len(),
            forming_generators: forming,
            blocks: blocks_in.into_iter().collect(),
            buses: island,
        });
    }
    MicrogridPartition {
        microgrids,
        unrestorable,
        blocks,
    }
}

/// Phase-unbalance equivalent impedance: `(a a^H) ⊙ z` with
/// `a = [1, e^{-i2π/3}, e^{i2π/3}]`, split into real and imaginary parts.
pub fn equivalent_impedance(z: &Matrix3) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let ang = 2.0 * std::f64::consts::PI / 3.0;
    let a = [
        Complex64::new(1.0, 0.0),
        Complex64::from_polar(1.0, -ang),
        Complex64::from_polar(1.0, ang),
    ];
    let mut r = [[0.0; 3]; 3];
    let mut x = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let w = a[i] * a[j].conj() * z[i][j];
            r[i][j] = w.re;
            x[i][j] = w.im;
        }
    }
    (r, x)
}
