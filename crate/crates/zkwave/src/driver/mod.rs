//! Batch front end: configuration, drivers, file formats.

mod config;
pub mod output;
mod run;

pub use config::*;
pub use run::*;
