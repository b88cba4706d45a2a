//! Adaptive monitoring of a stochastic wildfire front by a mobile sensing
//! agent: elliptical fire growth under random environmental fields, a
//! set-likelihood particle filter, and receding-horizon LCB policy search.

pub mod environment;
pub mod error;
pub mod filter;
pub mod fire_model;
pub mod geometry;
pub mod harness;
pub mod planner;
pub mod rng;
pub mod scenario;
pub mod sensing;

pub use error::{Error, Result};
pub use geometry::Vec2;
