//! Scenario runner for terminated-waveguide imaging: configuration, text
//! file formats, the sensor noise model and the commands behind the `wgi`
//! binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod noise;

pub use config::ScenarioConfig;
pub use error::{Result, WgiError};
