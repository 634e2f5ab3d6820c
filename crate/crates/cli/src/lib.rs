//! Experiment runner for the paraxial inverse boundary problem: configs,
//! figure presets, CSV and plot-script outputs, and checksummed manifests.

pub mod config;
pub mod data;
pub mod error;
pub mod experiment;
pub mod output;
pub mod presets;
pub mod runner;

pub use config::{Plan, RunConfig};
pub use data::{dump_matrix, load_image_data, write_image_data};
pub use error::{CliError, Result};
pub use presets::{run_preset, Figure, PresetScale};
pub use runner::{run, run_path, RunReport};
