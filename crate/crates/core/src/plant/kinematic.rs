use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::math::{Pose, Wrench};

use super::{CommandInterface, Plant, PlantState, SerialChain};

/// Position-commanded serial chain. Commands are applied directly, or
/// saturated to `rate_limit * dt` per step when a rate limit is set.
#[derive(Debug, Clone)]
pub struct KinematicPlant {
    chain: SerialChain,
    state: PlantState,
    rate_limit: Option<DVector<f64>>,
    steps: u64,
}

impl KinematicPlant {
    pub fn new(chain: SerialChain, initial_positions: DVector<f64>) -> Result<Self> {
        if initial_positions.len() != chain.dof() {
            return Err(Error::InvalidInput(format!(
                "initial positions have {} entries for a {}-joint chain",
                initial_positions.len(),
                chain.dof()
            )));
        }
        Ok(Self {
            chain,
            state: PlantState::at_rest(initial_positions)?,
            rate_limit: None,
            steps: 0,
        })
    }

    pub fn with_rate_limit(mut self, limit: DVector<f64>) -> Result<Self> {
        if limit.len() != self.chain.dof() || limit.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidInput("rate limit must be a positive N-vector".into()));
        }
        self.rate_limit = Some(limit);
        Ok(self)
    }

    pub fn chain(&self) -> &SerialChain {
        &self.chain
    }
}

impl Plant for KinematicPlant {
    fn dof(&self) -> usize {
        self.chain.dof()
    }

    fn command_interface(&self) -> CommandInterface {
        CommandInterface::Position
    }

    fn state(&self) -> &PlantState {
        &self.state
    }

    fn forward_kinematics(&self, q: &DVector<f64>) -> Pose {
        self.chain.forward_kinematics(q)
    }

    fn jacobian(&self, q: &DVector<f64>) -> DMatrix<f64> {
        self.chain.jacobian(q)
    }

    fn gravity(&self, q: &DVector<f64>) -> DVector<f64> {
        DVector::zeros(q.len())
    }

    fn step(&mut self, command: &[f64], dt: f64) -> Result<()> {
        if command.len() != self.dof() || command.iter().any(|v| !v.is_finite()) {
            return Err(Error::FaultStop {
                cycle: self.steps,
                component: "plant".into(),
                reason: "position command is not a finite N-vector".into(),
            });
        }
        let joints = &mut self.state.joints;
        for i in 0..command.len() {
            let previous = joints.positions[i];
            let mut target = command[i];
            if let Some(limit) = &self.rate_limit {
                let max = limit[i] * dt;
                let delta = target - previous;
                if delta.abs() > max {
                    target = previous + max.copysign(delta);
                }
            }
            joints.positions[i] = target;
            joints.velocities[i] = (target - previous) / dt;
        }
        self.state.time += dt;
        self.steps += 1;
        Ok(())
    }

    fn set_contact_wrench(&mut self, wrench: Wrench) {
        self.state.wrench = wrench;
    }
}
