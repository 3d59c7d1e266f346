//! Waypoint files.
//!
//! ```toml
//! variant = "joint"   # or "task"
//! dimension = 3       # joint count; 6 for task trajectories
//! waypoints = [
//!     # t, q0, q1, q2 [, qd0, qd1, qd2]
//!     [0.0, 0.0, 0.0, 0.0],
//!     [1.0, 0.3, -0.2, 0.1],
//! ]
//! ```
//!
//! Task rows are `t, x, y, z, qw, qx, qy, qz`, optionally followed by a
//! twist (6) and then a wrench (6). Times are relative to the cycle the
//! trajectory is accepted on.

use nalgebra::{DVector, Vector3};
use refchain_core::math::Quat;
use refchain_core::refgen::{JointReference, Reference, TaskReference, Trajectory, TrajectoryId, Waypoint};
use refchain_core::{Pose, Twist, Wrench};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Joint,
    Task,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryFile {
    pub variant: Variant,
    pub dimension: usize,
    pub waypoints: Vec<Vec<f64>>,
}

impl TrajectoryFile {
    /// Checks row widths and timestamp order, then builds the trajectory.
    pub fn to_trajectory(&self, id: TrajectoryId) -> Result<Trajectory, String> {
        if self.waypoints.is_empty() {
            return Err("trajectory has no waypoints".into());
        }
        let n = self.dimension;
        let widths: &[usize] = match self.variant {
            Variant::Joint if n == 0 => return Err("dimension must be > 0".into()),
            Variant::Joint => &[1 + n, 1 + 2 * n],
            Variant::Task if n != 6 => return Err(format!("task trajectories have dimension 6, not {n}")),
            Variant::Task => &[8, 14, 20],
        };
        let mut previous = f64::NEG_INFINITY;
        let mut waypoints = Vec::with_capacity(self.waypoints.len());
        for (row, values) in self.waypoints.iter().enumerate() {
            if !widths.contains(&values.len()) {
                return Err(format!(
                    "waypoint row {row} has {} values; expected one of {widths:?}",
                    values.len()
                ));
            }
            let t = values[0];
            if !(t > previous) {
                return Err(format!("waypoint row {row}: time {t} is not after {previous}"));
            }
            previous = t;
            waypoints.push(Waypoint::new(t, self.row_reference(&values[1..])));
        }
        Ok(Trajectory::new(id, waypoints))
    }

    fn row_reference(&self, v: &[f64]) -> Reference {
        let n = self.dimension;
        match self.variant {
            Variant::Joint => {
                let positions = DVector::from_column_slice(&v[..n]);
                if v.len() == 2 * n {
                    JointReference::with_velocities(positions, DVector::from_column_slice(&v[n..])).into()
                } else {
                    JointReference::new(positions).into()
                }
            }
            Variant::Task => task_reference(v),
        }
    }
}

/// `x y z qw qx qy qz [twist(6) [wrench(6)]]`; lengths are checked by the caller.
pub fn task_reference(v: &[f64]) -> Reference {
    let pose = Pose {
        position: Vector3::new(v[0], v[1], v[2]),
        orientation: Quat::new(v[3], v[4], v[5], v[6]),
    };
    let mut reference = TaskReference::new(pose);
    if v.len() >= 13 {
        reference.twist = Some(Twist::from_slice(&v[7..13]));
    }
    if v.len() >= 19 {
        reference.wrench = Some(Wrench::from_slice(&v[13..19]));
    }
    Reference::Task(reference)
}
