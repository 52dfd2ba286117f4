//! Pseudospectral ensemble integrator for the ZK equation.

pub mod checkpoint;
pub mod ensemble;
pub mod fft;
pub mod integrator;

pub use checkpoint::{read_checkpoint, write_checkpoint, CheckpointHeader, CHECKPOINT_SCHEMA};
pub use ensemble::{ensemble_spectrum, ensemble_with, member_power, EnsembleStats, Welford};
pub use integrator::{evolve, linear_profile, unprofile, Integrator, Scheme, SolverConfig, Workspace};
