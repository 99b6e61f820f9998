//! Simulation and analysis of a post-selected two-photon CNOT gate built
//! from partially polarizing fibre couplers.

pub mod cli;
pub mod config;
pub mod engine;
pub mod error;
pub mod fit;
pub mod gate;
pub mod metrics;
pub mod modes;
pub mod pipeline;

pub use error::{Error, Result};
