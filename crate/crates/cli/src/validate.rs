//! Offline checks of feeders and saved runs.

use mgrestore::network::{partition_microgrids, NetworkModel};
use mgrestore::restoration::{
    check_monotone, check_power_balance, check_radiality, check_sequencing, check_voltage_box, StageInputs,
};

use crate::artifacts::RunBundle;

/// Power-balance tolerance (pu) used when replaying a saved run.
pub const BALANCE_TOL: f64 = 1e-6;
const VOLTAGE_TOL: f64 = 1e-6;

/// Structural problems of a feeder that parses cleanly.
pub fn feeder_findings(net: &NetworkModel) -> (Vec<String>, String) {
    let part = partition_microgrids(net);
    let mut bad = Vec::new();
    for mg in &part.microgrids {
        if mg.forming_generators.is_empty() {
            bad.push(format!("microgrid {} has no grid-forming generator", mg.id));
        }
    }
    if part.microgrids.is_empty() {
        bad.push("no microgrid remains after removing faulted lines".into());
    }
    let info = format!(
        "{} buses, {} lines, {} loads ({:.1} kW), {} generators, {} bus blocks, {} microgrids",
        net.buses.len(),
        net.lines.len(),
        net.loads.len(),
        net.total_load_kw(),
        net.generators.len(),
        part.blocks.len(),
        part.microgrids.len()
    );
    (bad, info)
}

/// Replay the per-stage checks over a saved run; returns every violation.
pub fn run_findings(net: &NetworkModel, bundle: &RunBundle) -> Vec<String> {
    let part = partition_microgrids(net);
    let cfg = &bundle.config;
    let mut bad = Vec::new();
    let mut prev = StageInputs::initial(net, &part, cfg.horizon, cfg.alpha, cfg.delta_f_max);
    let mut last_kw = 0.0;
    for st in &bundle.run.stages {
        let mut next = prev.clone();
        for m in &st.microgrids {
            let r = &m.restoration;
            let tag = format!("stage {} mg {}", st.stage, r.microgrid);
            if r.status.lines.keys().any(|id| net.line(id).is_none())
                || r.status.buses.keys().any(|&b| net.bus(b).is_none())
            {
                bad.push(format!("{tag}: references elements missing from the feeder"));
                continue;
            }
            bad.extend(check_radiality(r, net).violations.into_iter().map(|v| format!("{tag}: radiality: {v}")));
            let (ok, residual) = check_power_balance(r, net, BALANCE_TOL);
            if !ok {
                bad.push(format!("{tag}: power balance residual {residual:.3e} pu exceeds {BALANCE_TOL:e}"));
            }
            bad.extend(check_voltage_box(r, net, VOLTAGE_TOL).violations.into_iter().map(|v| format!("{tag}: voltage: {v}")));
            bad.extend(
                check_sequencing(&prev.status, r, net, &part)
                    .violations
                    .into_iter()
                    .map(|v| format!("{tag}: sequencing: {v}")),
            );
            next.absorb(r);
        }
        bad.extend(
            check_monotone(&prev.status, &next.status)
                .violations
                .into_iter()
                .map(|v| format!("stage {}: monotonicity: {v}", st.stage)),
        );
        if let Some(&kw) = st.stage.checked_sub(1).and_then(|i| bundle.run.cumulative_kw.get(i)) {
            if kw < last_kw - 1e-9 {
                bad.push(format!("stage {}: monotonicity: restored load fell from {last_kw} to {kw} kW", st.stage));
            }
            last_kw = kw;
        }
        prev = next;
    }
    bad
}
