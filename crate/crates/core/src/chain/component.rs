use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::math::{JointState, Pose, Twist, Wrench};
use crate::plant::{CommandInterface, Plant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LifecycleState {
    Unconfigured,
    Configured,
    Active,
}

impl LifecycleState {
    pub fn as_str(&self) -> &'static str {
        match self {
            LifecycleState::Unconfigured => "UNCONFIGURED",
            LifecycleState::Configured => "CONFIGURED",
            LifecycleState::Active => "ACTIVE",
        }
    }
}

/// What a component needs to know about the plant at configure time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlantInfo {
    pub dof: usize,
    pub interface: CommandInterface,
}

impl PlantInfo {
    pub fn of(plant: &dyn Plant) -> Self {
        Self {
            dof: plant.dof(),
            interface: plant.command_interface(),
        }
    }
}

/// Measured robot state at the start of a cycle, with the model quantities
/// the controllers need.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotSnapshot {
    pub joints: JointState,
    pub pose: Pose,
    /// End-effector twist `J(q) qdot`.
    pub twist: Twist,
    pub jacobian: DMatrix<f64>,
    pub gravity: DVector<f64>,
    pub wrench: Wrench,
}

impl RobotSnapshot {
    pub fn capture(plant: &dyn Plant) -> Self {
        let state = plant.state();
        let q = &state.joints.positions;
        let jacobian = plant.jacobian(q);
        let v = &jacobian * &state.joints.velocities;
        Self {
            joints: state.joints.clone(),
            pose: plant.forward_kinematics(q),
            twist: Twist::from_slice(v.as_slice()),
            gravity: plant.gravity(q),
            jacobian,
            wrench: state.wrench,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CycleContext<'a> {
    pub cycle: u64,
    pub time: f64,
    pub dt: f64,
    pub robot: &'a RobotSnapshot,
}

/// A pipeline stage: reads its input channels, writes its output channels.
pub trait ChainableComponent: Send {
    /// Channels read from the upstream port, in the order `update` receives them.
    fn input_layout(&self) -> &[String];

    fn output_layout(&self) -> &[String];

    /// Resets internal state from the measured robot state.
    fn on_activate(&mut self, robot: &RobotSnapshot);

    fn on_deactivate(&mut self) {}

    /// One control cycle. `output` holds the previous values on entry.
    fn update(&mut self, cx: &CycleContext<'_>, input: &[f64], output: &mut [f64]) -> Result<()>;
}

/// Lifecycle bookkeeping around a component implementation.
pub struct Component {
    name: String,
    state: LifecycleState,
    inner: Option<Box<dyn ChainableComponent>>,
}

impl std::fmt::Debug for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Component")
            .field("name", &self.name)
            .field("state", &self.state)
            .finish()
    }
}

impl Component {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            state: LifecycleState::Unconfigured,
            inner: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state(&self) -> LifecycleState {
        self.state
    }

    fn refuse(&self, action: &'static str) -> Error {
        Error::Lifecycle {
            component: self.name.clone(),
            action,
            state: self.state.as_str(),
        }
    }

    /// Installs the configured implementation: UNCONFIGURED -> CONFIGURED.
    pub fn configure(&mut self, inner: Box<dyn ChainableComponent>) -> Result<()> {
        if self.state != LifecycleState::Unconfigured {
            return Err(self.refuse("configure"));
        }
        self.inner = Some(inner);
        self.state = LifecycleState::Configured;
        Ok(())
    }

    pub fn activate(&mut self, robot: &RobotSnapshot) -> Result<()> {
        match (&mut self.inner, self.state) {
            (Some(inner), LifecycleState::Configured) => {
                inner.on_activate(robot);
                self.state = LifecycleState::Active;
                Ok(())
            }
            _ => Err(self.refuse("activate")),
        }
    }

    pub fn deactivate(&mut self) -> Result<()> {
        match (&mut self.inner, self.state) {
            (Some(inner), LifecycleState::Active) => {
                inner.on_deactivate();
                self.state = LifecycleState::Configured;
                Ok(())
            }
            _ => Err(self.refuse("deactivate")),
        }
    }

    pub fn input_layout(&self) -> &[String] {
        self.inner.as_ref().map_or(&[], |c| c.input_layout())
    }

    pub fn output_layout(&self) -> &[String] {
        self.inner.as_ref().map_or(&[], |c| c.output_layout())
    }

    pub fn update(&mut self, cx: &CycleContext<'_>, input: &[f64], output: &mut [f64]) -> Result<()> {
        match (&mut self.inner, self.state) {
            (Some(inner), LifecycleState::Active) => inner.update(cx, input, output),
            _ => Err(self.refuse("update")),
        }
    }
}
