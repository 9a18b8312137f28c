use std::collections::BTreeMap;
use std::time::Instant;

use mgrestore_milp::{solve_milp, SolveStatus};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::{ConfigError, ScenarioConfig};
use crate::network::{partition_microgrids, MicrogridPartition, NetworkModel};
use crate::restoration::{
    add_frequency_constraints, build_stage_problem, extract_stage, step_one_bound, BuildError,
    ExtractError, FrequencyError, FrequencyMode, RestorationStage, StageInputs,
};
use crate::transient::{equilibrium_state, simulate_load_step, FrequencyTrace, SimError};

/// Progress below this many kW counts as no progress.
pub const PROGRESS_TOL_KW: f64 = 1e-6;

/// Outcome of one microgrid in one stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicrogridStage {
    pub restoration: RestorationStage,
    /// Decimated trace; the nadir sample is always retained.
    pub trace: FrequencyTrace,
    pub delta_f_meas: f64,
    /// Load picked up in this stage (kW).
    pub restored_delta_kw: f64,
    /// Restored load of the microgrid after this stage (kW).
    pub cumulative_kw: f64,
    /// Change of grid-forming output handed to the simulator (pu).
    pub net_step_pu: f64,
    /// Grid-forming output before and after the stage (pu).
    pub forming_p_before: f64,
    pub forming_p_after: f64,
    /// Largest per-phase grid-forming ramp realized in this stage (pu).
    pub realized_step_pu: f64,
    /// Load-step bound applied at the first step, per grid-forming unit.
    pub step_bound_pu: BTreeMap<String, f64>,
    /// Solve and simulation time (ms), not serialized.
    #[serde(skip)]
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageResult {
    pub stage: usize,
    pub microgrids: Vec<MicrogridStage>,
}

impl StageResult {
    pub fn restored_delta_kw(&self) -> f64 {
        self.microgrids.iter().map(|m| m.restored_delta_kw).sum()
    }

    pub fn worst_nadir(&self) -> f64 {
        self.microgrids.iter().map(|m| m.trace.f_nadir).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum Termination {
    Saturated,
    MaxStages,
    Infeasible { stage: usize, microgrid: usize, status: SolveStatus },
    Instability { stage: usize, microgrid: usize },
}

impl Termination {
    pub fn label(&self) -> &'static str {
        match self {
            Termination::Saturated => "saturated",
            Termination::MaxStages => "max_stages",
            Termination::Infeasible { .. } => "infeasible",
            Termination::Instability { .. } => "instability",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestorationRun {
    pub stages: Vec<StageResult>,
    /// System-wide restored load after each stage (kW).
    pub cumulative_kw: Vec<f64>,
    pub termination: Termination,
    /// Wall-clock time of the run (ms), not serialized.
    #[serde(skip)]
    pub wall_ms: u64,
}

impl RestorationRun {
    pub fn final_kw(&self) -> f64 {
        self.cumulative_kw.last().copied().unwrap_or(0.0)
    }

    /// Index (1-based) of the last stage that restored load; 0 if none did.
    pub fn stages_to_completion(&self) -> usize {
        self.stages
            .iter()
            .rev()
            .find(|s| s.restored_delta_kw() > PROGRESS_TOL_KW)
            .map_or(0, |s| s.stage)
    }

    /// Nadir per microgrid for stage `stage` (1-based).
    pub fn nadirs(&self, stage: usize) -> Option<Vec<f64>> {
        self.stages
            .get(stage.checked_sub(1)?)
            .map(|s| s.microgrids.iter().map(|m| m.trace.f_nadir).collect())
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("microgrid {0} has no grid-forming generator")]
    NoForming(usize),
    #[error("microgrid {mg}: {source}")]
    Build {
        mg: usize,
        #[source]
        source: BuildError,
    },
    #[error("microgrid {mg}: {source}")]
    Frequency {
        mg: usize,
        #[source]
        source: FrequencyError,
    },
    #[error("microgrid {mg}: {source}")]
    Extract {
        mg: usize,
        #[source]
        source: ExtractError,
    },
    #[error("microgrid {mg}: {source}")]
    Simulation {
        mg: usize,
        #[source]
        source: SimError,
    },
}

/// Per-microgrid bookkeeping carried between stages.
#[derive(Debug, Clone, Default)]
struct MgState {
    restored_kw: f64,
    forming_p: f64,
    forming_q: f64,
}

enum MgOutcome {
    Done(Box<MicrogridStage>),
    NoSolution(SolveStatus),
}

/// True when no microgrid can restore more: either every microgrid holds
/// `min(load, capacity)` or the last stage made no progress anywhere.
pub fn stopping_criterion(net: &NetworkModel, partition: &MicrogridPartition, last: &StageResult) -> bool {
    let idle = last.microgrids.iter().all(|m| m.restored_delta_kw <= PROGRESS_TOL_KW);
    idle || last.microgrids.iter().all(|m| {
        let mg = &partition.microgrids[m.restoration.microgrid];
        m.cumulative_kw >= restorable_kw(net, mg) - PROGRESS_TOL_KW
    })
}

/// `min(total load, total generation capacity)` of a microgrid (kW).
pub fn restorable_kw(net: &NetworkModel, mg: &crate::network::Microgrid) -> f64 {
    let base = net.base_kw();
    let load: f64 = net
        .loads
        .iter()
        .filter(|l| mg.buses.binary_search(&l.bus).is_ok())
        .map(|l| l.total_p() * base)
        .sum();
    let cap: f64 = net
        .generators
        .iter()
        .filter(|g| mg.buses.binary_search(&g.bus).is_ok())
        .map(|g| g.total_p_max() * base)
        .sum();
    load.min(cap)
}

fn decimate(trace: &mut FrequencyTrace, stride: usize) {
    if stride <= 1 || trace.t.is_empty() {
        return;
    }
    let last = trace.t.len() - 1;
    let nadir = trace
        .f
        .iter()
        .position(|&f| f == trace.f_nadir)
        .unwrap_or(0);
    let keep: Vec<usize> = (0..=last)
        .filter(|&i| i % stride == 0 || i == last || i == nadir)
        .collect();
    trace.t = keep.iter().map(|&i| trace.t[i]).collect();
    trace.f = keep.iter().map(|&i| trace.f[i]).collect();
}

fn forming_output(st: &RestorationStage, forming: &[String]) -> (f64, f64) {
    let sum = |m: &BTreeMap<String, [f64; 3]>| -> f64 {
        forming.iter().filter_map(|g| m.get(g)).flat_map(|v| v.iter()).sum()
    };
    (sum(&st.gen_p), sum(&st.gen_q))
}

fn solve_microgrid(
    net: &NetworkModel,
    partition: &MicrogridPartition,
    mg: usize,
    inputs: &StageInputs,
    cfg: &ScenarioConfig,
    prev: &MgState,
) -> Result<MgOutcome, RunError> {
    let start = Instant::now();
    let forming = &partition.microgrids[mg].forming_generators;
    let (mut problem, index) = build_stage_problem(net, partition, mg, inputs, &cfg.restoration)
        .map_err(|source| RunError::Build { mg, source })?;
    let mode = cfg.restoration.frequency_mode;
    if mode != FrequencyMode::Off {
        add_frequency_constraints(&mut problem, &index, inputs, mode)
            .map_err(|source| RunError::Frequency { mg, source })?;
    }
    let mut step_bound = BTreeMap::new();
    for g in forming {
        if let Some((b, _)) = step_one_bound(inputs, mode, mg, g).map_err(|source| RunError::Frequency { mg, source })? {
            step_bound.insert(g.clone(), b);
        }
    }
    let solution = solve_milp(&problem, &cfg.solver.options());
    if !solution.has_point() {
        return Ok(MgOutcome::NoSolution(solution.status));
    }
    let restoration = extract_stage(net, &problem, &solution, &index, inputs)
        .map_err(|source| RunError::Extract { mg, source })?;

    let (p_after, q_after) = forming_output(&restoration, forming);
    let realized_step_pu = forming
        .iter()
        .flat_map(|g| {
            let before = inputs.dispatch.get(g).copied().unwrap_or([0.0; 3]);
            let after = restoration.gen_p.get(g).copied().unwrap_or([0.0; 3]);
            (0..3).map(move |k| (after[k] - before[k]).abs())
        })
        .fold(0.0, f64::max);

    let params = cfg.inverter_for(mg);
    let s0 = equilibrium_state(params, prev.forming_p, prev.forming_q)
        .map_err(|source| RunError::Simulation { mg, source })?;
    let mut trace = simulate_load_step(&s0, params, p_after, q_after, &cfg.sim)
        .map_err(|source| RunError::Simulation { mg, source })?;
    decimate(&mut trace, cfg.trace_stride);

    let restored_delta_kw = restoration.restored_kw - prev.restored_kw;
    Ok(MgOutcome::Done(Box::new(MicrogridStage {
        delta_f_meas: trace.delta_f_meas,
        cumulative_kw: restoration.restored_kw,
        restored_delta_kw,
        net_step_pu: p_after - prev.forming_p,
        forming_p_before: prev.forming_p,
        forming_p_after: p_after,
        realized_step_pu,
        step_bound_pu: step_bound,
        restoration,
        trace,
        wall_ms: start.elapsed().as_millis() as u64,
    })))
}

/// Run the stage loop from the fault-isolated feeder with only the
/// grid-forming blocks energized.
pub fn run_sequential_restoration(net: &NetworkModel, cfg: &ScenarioConfig) -> Result<RestorationRun, RunError> {
    let partition = partition_microgrids(net);
    let inputs = StageInputs::initial(net, &partition, cfg.horizon, cfg.alpha, cfg.delta_f_max);
    run_from(net, &partition, cfg, inputs)
}

/// Run the stage loop from an arbitrary consistent starting state. The
/// grid-forming output in `start.dispatch` is taken as the pre-stage
/// operating point of the simulator.
pub fn run_from(
    net: &NetworkModel,
    partition: &MicrogridPartition,
    cfg: &ScenarioConfig,
    start: StageInputs,
) -> Result<RestorationRun, RunError> {
    cfg.validate()?;
    let clock = Instant::now();
    for mg in &partition.microgrids {
        if mg.forming_generators.is_empty() {
            return Err(RunError::NoForming(mg.id));
        }
    }
    let mut inputs = start;
    inputs.horizon = cfg.horizon;
    inputs.alpha = cfg.alpha;
    inputs.delta_f_max = cfg.delta_f_max;

    let base = net.base_kw();
    let mut state: Vec<MgState> = partition
        .microgrids
        .iter()
        .map(|mg| {
            let restored_kw = net
                .loads
                .iter()
                .filter(|l| inputs.status.load(&l.id) && mg.buses.binary_search(&l.bus).is_ok())
                .map(|l| l.total_p() * base)
                .sum();
            // Dispatch carries active power only; reactive output starts at zero.
            let forming_p = mg
                .forming_generators
                .iter()
                .filter_map(|g| inputs.dispatch.get(g))
                .flat_map(|v| v.iter())
                .fold(0.0, |a, b| a + b);
            MgState {
                restored_kw,
                forming_p,
                forming_q: 0.0,
            }
        })
        .collect();

    let mut stages = Vec::new();
    let mut cumulative_kw = Vec::new();
    let termination = loop {
        let stage_no = inputs.stage;
        let outcomes: Vec<Result<MgOutcome, RunError>> = std::thread::scope(|scope| {
            let handles: Vec<_> = partition
                .microgrids
                .iter()
                .map(|mg| {
                    let (inputs, prev) = (&inputs, &state[mg.id]);
                    scope.spawn(move || solve_microgrid(net, partition, mg.id, inputs, cfg, prev))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("stage worker panicked")).collect()
        });

        let mut results = Vec::with_capacity(outcomes.len());
        let mut failure = None;
        for (mg, out) in outcomes.into_iter().enumerate() {
            match out? {
                MgOutcome::Done(r) => results.push(*r),
                MgOutcome::NoSolution(status) => {
                    log::error!("stage {stage_no}: microgrid {mg} has no feasible plan ({status})");
                    failure.get_or_insert(Termination::Infeasible {
                        stage: stage_no,
                        microgrid: mg,
                        status,
                    });
                }
            }
        }
        if let Some(t) = failure {
            break t;
        }

        for r in &results {
            let mg = r.restoration.microgrid;
            log::info!(
                "stage {stage_no} mg {mg}: +{:.1} kW, step {:.4} pu, nadir {:.4} Hz",
                r.restored_delta_kw,
                r.net_step_pu,
                r.trace.f_nadir
            );
            let forming = &partition.microgrids[mg].forming_generators;
            inputs.absorb(&r.restoration);
            inputs.delta_f_meas.insert(mg, r.delta_f_meas);
            for g in forming {
                let carried = match r.step_bound_pu.get(g) {
                    Some(&b) => b,
                    None => r.realized_step_pu,
                };
                inputs.max_load_step.insert(g.clone(), carried);
            }
            let s = &mut state[mg];
            s.restored_kw = r.cumulative_kw;
            let (p, q) = forming_output(&r.restoration, forming);
            s.forming_p = p;
            s.forming_q = q;
        }
        let unstable = results.iter().find(|r| !r.trace.stable).map(|r| r.restoration.microgrid);
        let total: f64 = state.iter().map(|s| s.restored_kw).sum();
        cumulative_kw.push(total);
        let result = StageResult {
            stage: stage_no,
            microgrids: results,
        };
        let stop = stopping_criterion(net, partition, &result);
        stages.push(result);
        if let Some(mg) = unstable {
            log::error!("stage {stage_no}: microgrid {mg} lost stability; run halted");
            break Termination::Instability {
                stage: stage_no,
                microgrid: mg,
            };
        }
        if stop {
            break Termination::Saturated;
        }
        if stages.len() >= cfg.max_stages {
            break Termination::MaxStages;
        }
        inputs.stage += 1;
    };

    Ok(RestorationRun {
        stages,
        cumulative_kw,
        termination,
        wall_ms: clock.elapsed().as_millis() as u64,
    })
}

/// Condensed result of one run in an alpha sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSummary {
    pub alpha: f64,
    pub stages_to_completion: usize,
    pub final_kw: f64,
    pub termination: String,
    /// Nadir per stage and microgrid (Hz).
    pub nadirs: Vec<Vec<f64>>,
    pub cumulative_kw: Vec<f64>,
}

impl AlphaSummary {
    pub fn of(alpha: f64, run: &RestorationRun) -> Self {
        AlphaSummary {
            alpha,
            stages_to_completion: run.stages_to_completion(),
            final_kw: run.final_kw(),
            termination: run.termination.label().to_string(),
            nadirs: (1..=run.stages.len()).filter_map(|s| run.nadirs(s)).collect(),
            cumulative_kw: run.cumulative_kw.clone(),
        }
    }
}

/// Independent runs of the same scenario for each gain in `alphas`.
pub fn compare_alpha_sweep(
    net: &NetworkModel,
    cfg: &ScenarioConfig,
    alphas: &[f64],
) -> Result<Vec<(AlphaSummary, RestorationRun)>, RunError> {
    alphas
        .iter()
        .map(|&a| {
            let mut c = cfg.clone();
            c.alpha = a;
            let run = run_sequential_restoration(net, &c)?;
            Ok((AlphaSummary::of(a, &run), run))
        })
        .collect()
}
