//! Zakharov–Kuznetsov wave-turbulence laboratory.

pub mod counting;
pub mod diagrams;
pub mod driver;
pub mod error;
pub mod expansion;
pub mod initial_data;
pub mod kinetic;
pub mod lattice;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};
