//! Simulated robots standing in for hardware: a torque-driven planar arm,
//! a position-driven serial chain, and a virtual wall for contact.

mod dynamic;
mod kinematic;
mod kinematics;
mod planar;
mod wall;

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::math::{JointState, Pose, Wrench};

pub use dynamic::DynamicPlant;
pub use kinematic::KinematicPlant;
pub use kinematics::{ChainConfig, FrameConfig, JointConfig, SerialChain};
pub use planar::PlanarArm;
pub use wall::{wall_wrench, WallModel};

/// Which hardware interface the plant accepts commands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandInterface {
    Effort,
    Position,
}

impl CommandInterface {
    /// Channel quantity name used in port layouts.
    pub fn quantity(&self) -> &'static str {
        match self {
            CommandInterface::Effort => "effort",
            CommandInterface::Position => "position",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantState {
    pub joints: JointState,
    /// Simulated time [s].
    pub time: f64,
    /// Last contact wrench measured at the end effector.
    pub wrench: Wrench,
}

impl PlantState {
    pub fn at_rest(q: DVector<f64>) -> Result<Self> {
        Ok(Self {
            joints: JointState::at_rest(q)?,
            time: 0.0,
            wrench: Wrench::zero(),
        })
    }
}

/// A simulated robot as seen by the pipeline: state, model queries and a
/// command input.
pub trait Plant {
    fn dof(&self) -> usize;

    fn command_interface(&self) -> CommandInterface;

    fn state(&self) -> &PlantState;

    fn forward_kinematics(&self, q: &DVector<f64>) -> Pose;

    fn jacobian(&self, q: &DVector<f64>) -> DMatrix<f64>;

    /// Gravity torque of the published model; zero for kinematic plants.
    fn gravity(&self, q: &DVector<f64>) -> DVector<f64>;

    /// Advances the plant one period under `command`. Non-finite commands
    /// produce [`crate::Error::FaultStop`].
    fn step(&mut self, command: &[f64], dt: f64) -> Result<()>;

    /// Stores the contact wrench seen by the next cycle.
    fn set_contact_wrench(&mut self, wrench: Wrench);
}
