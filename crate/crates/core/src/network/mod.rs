//! Unbalanced three-phase feeder model.

mod model;
mod phase;
mod topology;

pub use model::{
    build_network, parse_feeder, BaseDoc, Bus, BusDoc, BusId, FeederDocument, FeederError, GenKind,
    Generator, GeneratorDoc, Line, LineDoc, Load, LoadDoc, Matrix3, NetworkModel,
};
pub use phase::{Phase, PhaseSet, PhaseSetError};
pub use topology::{
    apply_faults, compute_bus_blocks, equivalent_impedance, partition_microgrids, BusBlock,
    Microgrid, MicrogridPartition,
};
