//! Multi-step restoration problem of one microgrid and its decoding.

mod build;
mod checks;
mod export;
mod frequency;
mod index;
mod inputs;
mod stage;

pub use build::{build_stage_problem, BuildError, FrequencyMode, RestorationSettings};
pub use checks::{
    check_monotone, check_power_balance, check_radiality, check_sequencing, check_voltage_box,
    power_balance_residual, CheckReport,
};
pub use export::{read_stage_csv, stage_rows, write_rows, write_stage_csv, StageRow};
pub use frequency::{add_frequency_constraints, step_one_bound, update_max_load_step, FrequencyError};
pub use index::{Element, ModelIndex, VarClass, VarKey};
pub use inputs::{ElementStatus, InputError, StageInputs};
pub use stage::{extract_stage, ExtractError, RestorationStage, STAGE_TOL};
