//! Analytical performance of a hybrid RF / terahertz two-tier cellular
//! downlink under user mobility, with an internal Monte-Carlo simulator that
//! cross-validates every analytical quantity.

pub mod absorption;
pub mod analysis;
pub mod coverage;
pub mod error;
pub mod handoff;
pub mod model;
pub mod montecarlo;
pub mod numerics;

pub use error::{Error, Result};
pub use model::{baseline_scenario, DerivedConstants, MobilityProfile, RfTier, Scenario, ThzTier};
