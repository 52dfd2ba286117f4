//! Resonance counting: one-triad windows, couple equation systems, the
//! lattice-sum identity and resonance-sum asymptotics.

mod asymptotics;
mod equations;
mod euler_maclaurin;
mod resonance;

pub use asymptotics::*;
pub use equations::*;
pub use euler_maclaurin::*;
pub use resonance::*;
