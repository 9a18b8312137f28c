//! Droop-controlled grid-forming inverter response to load steps.

mod model;
mod sim;

pub use model::{state_derivative, AngleConvention, InverterParams, InverterState, ParamError};
pub use sim::{
    delta_f_meas, equilibrium_state, frequency_nadir, simulate_load_step, FrequencyTrace, SimError,
    SimOptions, EQUILIBRIUM_TOL, STABILITY_BAND,
};
