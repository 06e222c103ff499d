//! Generalized (time-dependent) Einstein coefficients, Rabi oscillation
//! probabilities of a two-level emitter in ideal and lossy resonant
//! cavities, and the population dynamics and entropy that follow.

pub mod constants;
pub mod coupling;
pub mod dynamics;
pub mod error;
pub mod fit;
pub mod ode;
pub mod photons;
pub mod quad;
pub mod series;
pub mod specfun;
pub mod transition;

pub use error::{Error, Result};
