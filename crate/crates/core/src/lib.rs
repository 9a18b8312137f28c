//! Sequential service restoration of islanded microgrids with
//! frequency-aware load steps.

pub mod network;
pub mod restoration;
pub mod transient;
pub mod coordinator;
