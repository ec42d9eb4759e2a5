//! Experiment driver for the `icfr` library: runs the dynamics over many
//! seeds, evaluates equilibrium gaps at checkpoints and writes CSV/JSON.

pub mod config;
pub mod experiment;
pub mod games_io;
pub mod output;
