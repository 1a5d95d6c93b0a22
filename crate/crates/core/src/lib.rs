//! Models of binocular rivalry, their integration, dominance analysis and parameter sweeps.

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod export;
pub mod integrator;
pub mod model;
pub mod noise;
pub mod stats;

pub use error::{Error, Result};
