//! Stage loop coupling the restoration model and the frequency simulator.

mod config;
mod run;
mod summary;

pub use config::{ConfigError, ScenarioConfig, SolverConfig};
pub use run::{
    compare_alpha_sweep, restorable_kw, run_from, run_sequential_restoration, stopping_criterion,
    AlphaSummary, MicrogridStage, RestorationRun, RunError, StageResult, Termination, PROGRESS_TOL_KW,
};
pub use summary::{run_summary, SummaryRow};
