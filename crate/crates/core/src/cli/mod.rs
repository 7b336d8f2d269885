//! Command-line front end: configuration files, presets, runs and output.

pub mod config;
pub mod output;
pub mod run;

pub use config::{
    log_grid, ConfigFile, DeviceSetup, Format, Mode, Overrides, Preset, RunConfig, SweepGrid,
};
pub use output::{Cell, Report};
pub use run::{exit_code, run};
