//! Artifact formats, replay checks and chart rendering behind the
//! `mgrestore` command.

pub mod artifacts;
pub mod plot;
pub mod validate;
