//! Piecewise-linear trajectory sampling (slerp for orientation).

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::math::{orientation_error_unchecked, Pose, Twist, Wrench};

use super::reference::{JointReference, Reference, TaskReference, Trajectory, Waypoint};

/// Elapsed times within this distance of a waypoint timestamp snap onto it.
pub const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample<R> {
    pub reference: R,
    /// Set once elapsed time reaches the last waypoint.
    pub finished: bool,
}

enum Segment {
    Before,
    Inside { k: usize, s: f64 },
    After,
}

fn locate(waypoints: &[Waypoint], elapsed: f64) -> Segment {
    let last = waypoints.len() - 1;
    if elapsed + TIME_EPS >= waypoints[last].time {
        return Segment::After;
    }
    if elapsed + TIME_EPS < waypoints[0].time {
        return Segment::Before;
    }
    // first index whose time is past elapsed; its predecessor starts the segment
    let next = waypoints.partition_point(|w| w.time <= elapsed + TIME_EPS);
    let k = next - 1;
    let (t0, t1) = (waypoints[k].time, waypoints[k + 1].time);
    let s = if (elapsed - t0).abs() <= TIME_EPS {
        0.0
    } else {
        ((elapsed - t0) / (t1 - t0)).clamp(0.0, 1.0)
    };
    Segment::Inside { k, s }
}

fn joint_at(w: &Waypoint) -> Result<&JointReference> {
    match &w.reference {
        Reference::Joint(j) => Ok(j),
        Reference::Task(_) => Err(Error::InvalidInput("expected a joint-space waypoint".into())),
    }
}

fn task_at(w: &Waypoint) -> Result<&TaskReference> {
    match &w.reference {
        Reference::Task(t) => Ok(t),
        Reference::Joint(_) => Err(Error::InvalidInput("expected a task-space waypoint".into())),
    }
}

fn non_empty(traj: &Trajectory) -> Result<&[Waypoint]> {
    if traj.waypoints.is_empty() {
        return Err(Error::InvalidInput("trajectory has no waypoints".into()));
    }
    Ok(&traj.waypoints)
}

pub fn interpolate_joint(traj: &Trajectory, elapsed: f64) -> Result<Sample<JointReference>> {
    let wps = non_empty(traj)?;
    let hold = |w: &Waypoint, finished| -> Result<Sample<JointReference>> {
        let p = &joint_at(w)?.positions;
        Ok(Sample {
            reference: JointReference::with_velocities(p.clone(), DVector::zeros(p.len())),
            finished,
        })
    };
    match locate(wps, elapsed) {
        Segment::Before => hold(&wps[0], false),
        Segment::After => hold(&wps[wps.len() - 1], true),
        Segment::Inside { k, s } => {
            let a = joint_at(&wps[k])?;
            let b = joint_at(&wps[k + 1])?;
            let span = wps[k + 1].time - wps[k].time;
            let delta = &b.positions - &a.positions;
            Ok(Sample {
                reference: JointReference::with_velocities(&a.positions + &delta * s, delta / span),
                finished: false,
            })
        }
    }
}

pub fn interpolate_task(traj: &Trajectory, elapsed: f64) -> Result<Sample<TaskReference>> {
    let wps = non_empty(traj)?;
    let hold = |w: &Waypoint, finished| -> Result<Sample<TaskReference>> {
        let t = task_at(w)?;
        Ok(Sample {
            reference: TaskReference {
                pose: t.pose,
                twist: Some(Twist::zero()),
                wrench: Some(t.wrench_or_zero()),
            },
            finished,
        })
    };
    match locate(wps, elapsed) {
        Segment::Before => hold(&wps[0], false),
        Segment::After => hold(&wps[wps.len() - 1], true),
        Segment::Inside { k, s } => {
            let a = task_at(&wps[k])?;
            let b = task_at(&wps[k + 1])?;
            let span = wps[k + 1].time - wps[k].time;
            let dp = b.pose.position - a.pose.position;
            let pose = Pose {
                position: a.pose.position + dp * s,
                orientation: a.pose.orientation.slerp(&b.pose.orientation, s),
            };
            let rot = orientation_error_unchecked(&b.pose.orientation, &a.pose.orientation);
            let (wa, wb) = (a.wrench_or_zero(), b.wrench_or_zero());
            let wrench = Wrench::new(
                wa.force + (wb.force - wa.force) * s,
                wa.torque + (wb.torque - wa.torque) * s,
            );
            Ok(Sample {
                reference: TaskReference {
                    pose,
                    twist: Some(Twist::new(dp / span, rot / span)),
                    wrench: Some(wrench),
                },
                finished: false,
            })
        }
    }
}

/// Samples a trajectory of either variant.
pub fn interpolate(traj: &Trajectory, elapsed: f64) -> Result<Sample<Reference>> {
    match &non_empty(traj)?[0].reference {
        Reference::Joint(_) => interpolate_joint(traj, elapsed).map(|s| Sample {
            reference: Reference::Joint(s.reference),
            finished: s.finished,
        }),
        Reference::Task(_) => interpolate_task(traj, elapsed).map(|s| Sample {
            reference: Reference::Task(s.reference),
            finished: s.finished,
        }),
    }
}
