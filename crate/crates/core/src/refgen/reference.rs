use std::fmt;

use nalgebra::{DVector, Vector3};

use crate::math::{Pose, Twist, Wrench};

/// Joint-space setpoint. Absent velocities mean zero.
#[derive(Debug, Clone, PartialEq)]
pub struct JointReference {
    pub positions: DVector<f64>,
    pub velocities: Option<DVector<f64>>,
}

impl JointReference {
    pub fn new(positions: DVector<f64>) -> Self {
        Self {
            positions,
            velocities: None,
        }
    }

    pub fn with_velocities(positions: DVector<f64>, velocities: DVector<f64>) -> Self {
        Self {
            positions,
            velocities: Some(velocities),
        }
    }
}

/// Task-space setpoint. Absent twist and wrench mean zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskReference {
    pub pose: Pose,
    pub twist: Option<Twist>,
    pub wrench: Option<Wrench>,
}

impl TaskReference {
    pub fn new(pose: Pose) -> Self {
        Self {
            pose,
            twist: None,
            wrench: None,
        }
    }

    pub fn twist_or_zero(&self) -> Twist {
        self.twist.unwrap_or_default()
    }

    pub fn wrench_or_zero(&self) -> Wrench {
        self.wrench.unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    Joint(JointReference),
    Task(TaskReference),
}

impl Reference {
    /// Same setpoint with velocity/twist cleared; a feedforward wrench is kept.
    pub fn at_rest(&self) -> Reference {
        match self {
            Reference::Joint(j) => Reference::Joint(JointReference::new(j.positions.clone())),
            Reference::Task(t) => Reference::Task(TaskReference {
                pose: t.pose,
                twist: None,
                wrench: t.wrench,
            }),
        }
    }
}

impl From<JointReference> for Reference {
    fn from(r: JointReference) -> Self {
        Reference::Joint(r)
    }
}

impl From<TaskReference> for Reference {
    fn from(r: TaskReference) -> Self {
        Reference::Task(r)
    }
}

pub type TrajectoryId = u64;

#[derive(Debug, Clone, PartialEq)]
pub struct Waypoint {
    /// Seconds since the trajectory was accepted.
    pub time: f64,
    pub reference: Reference,
}

impl Waypoint {
    pub fn new(time: f64, reference: impl Into<Reference>) -> Self {
        Self {
            time,
            reference: reference.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub id: TrajectoryId,
    pub waypoints: Vec<Waypoint>,
}

impl Trajectory {
    pub fn new(id: TrajectoryId, waypoints: Vec<Waypoint>) -> Self {
        Self { id, waypoints }
    }

    /// Timestamp of the last waypoint, or zero when empty.
    pub fn duration(&self) -> f64 {
        self.waypoints.last().map_or(0.0, |w| w.time)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointLimits {
    pub position_min: DVector<f64>,
    pub position_max: DVector<f64>,
    pub velocity_max: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskLimits {
    pub workspace_min: Vector3<f64>,
    pub workspace_max: Vector3<f64>,
    /// Cap on the Cartesian speed of a reference twist and of any
    /// trajectory segment.
    pub linear_speed_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Limits {
    Joint(JointLimits),
    Task(TaskLimits),
}

/// Terminal outcome of a submitted trajectory, or the reason a reference
/// was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResultCode {
    Succeeded,
    AbortedByNewTrajectory,
    AbortedByOnlineReference,
    AbortedByDeactivation,
    RejectedDimension,
    RejectedNonFinite,
    RejectedLimits,
    RejectedTimestamps,
}

impl ResultCode {
    pub const ALL: [ResultCode; 8] = [
        ResultCode::Succeeded,
        ResultCode::AbortedByNewTrajectory,
        ResultCode::AbortedByOnlineReference,
        ResultCode::AbortedByDeactivation,
        ResultCode::RejectedDimension,
        ResultCode::RejectedNonFinite,
        ResultCode::RejectedLimits,
        ResultCode::RejectedTimestamps,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ResultCode::Succeeded => "SUCCEEDED",
            ResultCode::AbortedByNewTrajectory => "ABORTED_BY_NEW_TRAJECTORY",
            ResultCode::AbortedByOnlineReference => "ABORTED_BY_ONLINE_REFERENCE",
            ResultCode::AbortedByDeactivation => "ABORTED_BY_DEACTIVATION",
            ResultCode::RejectedDimension => "REJECTED_DIMENSION",
            ResultCode::RejectedNonFinite => "REJECTED_NONFINITE",
            ResultCode::RejectedLimits => "REJECTED_LIMITS",
            ResultCode::RejectedTimestamps => "REJECTED_TIMESTAMPS",
        }
    }

    pub fn is_rejection(&self) -> bool {
        matches!(
            self,
            ResultCode::RejectedDimension
                | ResultCode::RejectedNonFinite
                | ResultCode::RejectedLimits
                | ResultCode::RejectedTimestamps
        )
    }
}

impl fmt::Display for ResultCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
