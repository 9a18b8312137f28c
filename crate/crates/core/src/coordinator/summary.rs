use serde::{Deserialize, Serialize};

use super::run::RestorationRun;

/// One row of the run summary: a microgrid in a stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub stage: usize,
    pub mg_id: usize,
    /// Load picked up in this stage (kW).
    pub restored_kw: f64,
    /// Restored load of the microgrid after this stage (kW).
    pub cumulative_kw: f64,
    pub f_nadir_hz: f64,
    /// Largest per-phase grid-forming ramp realized in the stage (pu).
    pub mls_pu: f64,
    /// Bound applied to that ramp; absent when no bound was active.
    pub mls_bound_pu: Option<f64>,
    pub solver_status: String,
    pub nodes: usize,
    pub wall_ms: u64,
}

pub fn run_summary(run: &RestorationRun) -> Vec<SummaryRow> {
    run.stages
        .iter()
        .flat_map(|s| {
            s.microgrids.iter().map(move |m| SummaryRow {
                stage: s.stage,
                mg_id: m.restoration.microgrid,
                restored_kw: m.restored_delta_kw,
                cumulative_kw: m.cumulative_kw,
                f_nadir_hz: m.trace.f_nadir,
                mls_pu: m.realized_step_pu,
                mls_bound_pu: m.step_bound_pu.values().copied().reduce(f64::min),
                solver_status: m.restoration.solver_status.to_string(),
                nodes: m.restoration.nodes,
                wall_ms: m.wall_ms,
            })
        })
        .collect()
}
