//! Chainable robot control pipelines.
//!
//! A pipeline is one reference generator followed by one or more chainable
//! controllers, stepped at a fixed period against a simulated plant.
//! Reference generators own acquisition, validation and interpolation of
//! external references; controllers only run their control law on the
//! single-point reference they read from the upstream port.

pub mod chain;
pub mod controllers;
pub mod error;
pub mod math;
pub mod plant;
pub mod refgen;
pub mod transport;

pub use error::{Error, Result};
pub use math::{GainMatrix, JointState, Pose, Quat, Twist, Wrench};
pub use chain::{ComponentDescriptor, Pipeline};
pub use plant::{CommandInterface, Plant};
pub use refgen::{Reference, ResultCode, Trajectory};
