//! Command-line and HTTP front ends for the `inexpress` library.

pub mod cli;
pub mod service;
pub mod store;

pub use cli::{run_cli, EXIT_ERROR, EXIT_POSITIVE, EXIT_REFUTED};
