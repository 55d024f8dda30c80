//! Library half of the experiment runner: config parsing, presets, and
//! artifact emission. The `qpi` binary is a thin command-line shell over
//! these pieces, and the integration tests drive them directly.

pub mod config;
pub mod presets;
pub mod run;
