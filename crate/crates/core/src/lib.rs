//! One-sided p-values read as likelihood ratios.

pub mod calibration;
pub mod cli;
pub mod error;
pub mod inference;
pub mod montecarlo;
pub mod normal_math;
pub mod rng;
pub mod roc;
pub mod types;

pub use error::{Error, Result};
pub use types::{LikelihoodRatio, Odds, Orientation, Probability, ZScore};
