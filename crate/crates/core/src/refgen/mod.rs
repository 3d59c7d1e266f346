//! Reference generators: validation, the two-state FSM and trajectory
//! interpolation, emitting one reference sample per control cycle.

mod fsm;
mod generator;
mod interpolate;
mod reference;
mod validate;

pub use fsm::{fsm_transition, ActiveTrajectory, FsmEvent, GeneratorState, Mode, Resolution};
pub use generator::{encode_reference, ReferenceGenerator, Space};
pub use interpolate::{interpolate, interpolate_joint, interpolate_task, Sample, TIME_EPS};
pub use reference::{
    JointLimits, JointReference, Limits, Reference, ResultCode, TaskLimits, TaskReference,
    Trajectory, TrajectoryId, Waypoint,
};
pub use validate::{validate_reference, validate_trajectory, validations_on_this_thread};
