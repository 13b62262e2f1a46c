//! Agent-based simulation of competence propagation in Scrum teams.

pub mod config;
pub mod engine;
pub mod error;
pub mod kernels;
pub mod metrics;
pub mod model;
pub mod report;
pub mod stats;
pub mod sweep;

pub use config::WorldConfig;
pub use engine::{run, TickSnapshot, World};
pub use error::{Error, Result};
pub use metrics::RunResult;
