//! Experiment orchestration: the CLI, report builders, manifests, fits and the verification suite.

pub mod cli;
pub mod experiments;
pub mod fit;
pub mod manifest;
pub mod sweep;
pub mod verify;
