//! Monte-Carlo reproduction harness for GFDM receivers.
//!
//! A [`ScenarioConfig`] (TOML) fixes the receiver, channel model, filter and
//! SNR grid; [`run_scenario`] turns it into a [`ResultTable`] whose rows are
//! bitwise reproducible for a given seed, whatever the thread count.

pub mod config;
pub mod error;
pub mod qam;
pub mod run;

pub use config::{ChannelProfile, FilterConfig, Scenario, ScenarioConfig};
pub use error::SimError;
pub use qam::Constellation;
pub use run::{run_scenario, uniformity_report, ResultRow, ResultTable};
