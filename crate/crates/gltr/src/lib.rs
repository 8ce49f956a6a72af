//! Configuration, file formats and the experiment driver around [`gltr_core`].
//!
//! A run is described by a TOML file (see `presets/`), loaded with
//! [`config::load_config`] and executed with [`experiment::run_experiment`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod experiment;
pub mod io;

pub use config::{load_config, RunConfig};
pub use experiment::{check_gradient, run_experiment, run_experiment_in};

/// Directory holding the bundled presets.
pub fn presets_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("presets")
}
