//! Reference and trajectory validation. Runs on the submitting thread.

use std::cell::Cell;

use crate::math::UNIT_TOLERANCE;

use super::reference::{
    JointLimits, JointReference, Limits, Reference, ResultCode, TaskLimits, TaskReference,
    Trajectory,
};

thread_local! {
    static VALIDATIONS: Cell<u64> = const { Cell::new(0) };
}

/// Number of validation calls made on the current thread.
pub fn validations_on_this_thread() -> u64 {
    VALIDATIONS.with(Cell::get)
}

fn count_validation() {
    VALIDATIONS.with(|c| c.set(c.get() + 1));
}

/// Checks dimension, finiteness and limits, in that order; the first
/// failing check decides the code.
pub fn validate_reference(
    reference: &Reference,
    limits: &Limits,
    expected_dim: usize,
) -> Result<(), ResultCode> {
    count_validation();
    check_reference(reference, limits, expected_dim)
}

fn check_reference(reference: &Reference, limits: &Limits, expected_dim: usize) -> Result<(), ResultCode> {
    match (reference, limits) {
        (Reference::Joint(r), Limits::Joint(l)) => check_joint(r, l, expected_dim),
        (Reference::Task(r), Limits::Task(l)) => check_task(r, l),
        _ => Err(ResultCode::RejectedDimension),
    }
}

fn check_joint(r: &JointReference, l: &JointLimits, n: usize) -> Result<(), ResultCode> {
    let velocity_len_ok = r.velocities.as_ref().is_none_or(|v| v.len() == n);
    if r.positions.len() != n || !velocity_len_ok || l.position_min.len() != n {
        return Err(ResultCode::RejectedDimension);
    }
    let finite = r.positions.iter().all(|v| v.is_finite())
        && r.velocities.iter().flat_map(|v| v.iter()).all(|v| v.is_finite());
    if !finite {
        return Err(ResultCode::RejectedNonFinite);
    }
    for i in 0..n {
        let p = r.positions[i];
        if p < l.position_min[i] || p > l.position_max[i] {
            return Err(ResultCode::RejectedLimits);
        }
        if let Some(v) = &r.velocities {
            if v[i].abs() > l.velocity_max[i] {
                return Err(ResultCode::RejectedLimits);
            }
        }
    }
    Ok(())
}

fn check_task(r: &TaskReference, l: &TaskLimits) -> Result<(), ResultCode> {
    let finite = r.pose.is_finite()
        && r.twist.as_ref().is_none_or(|t| t.is_finite())
        && r.wrench.as_ref().is_none_or(|w| w.is_finite());
    // a non-unit quaternion is not a valid rotation
    if !finite || !r.pose.orientation.is_unit(UNIT_TOLERANCE) {
        return Err(ResultCode::RejectedNonFinite);
    }
    let p = &r.pose.position;
    for i in 0..3 {
        if p[i] < l.workspace_min[i] || p[i] > l.workspace_max[i] {
            return Err(ResultCode::RejectedLimits);
        }
    }
    if let Some(t) = &r.twist {
        if t.linear.norm() > l.linear_speed_max {
            return Err(ResultCode::RejectedLimits);
        }
    }
    Ok(())
}

/// Validates every waypoint in order, then its timestamp against the
/// previous one, then (task space) the implied segment speed.
pub fn validate_trajectory(
    trajectory: &Trajectory,
    limits: &Limits,
    expected_dim: usize,
) -> Result<(), ResultCode> {
    count_validation();
    if trajectory.waypoints.is_empty() {
        return Err(ResultCode::RejectedDimension);
    }
    let mut previous: Option<&super::reference::Waypoint> = None;
    for w in &trajectory.waypoints {
        check_reference(&w.reference, limits, expected_dim)?;
        match previous {
            None => {
                if !(w.time >= 0.0 && w.time.is_finite()) {
                    return Err(ResultCode::RejectedTimestamps);
                }
            }
            Some(prev) => {
                if !(w.time > prev.time && w.time.is_finite()) {
                    return Err(ResultCode::RejectedTimestamps);
                }
                if let (Reference::Task(a), Reference::Task(b), Limits::Task(l)) =
                    (&prev.reference, &w.reference, limits)
                {
                    let speed = (b.pose.position - a.pose.position).norm() / (w.time - prev.time);
                    if speed > l.linear_speed_max {
                        return Err(ResultCode::RejectedLimits);
                    }
                }
            }
        }
        previous = Some(w);
    }
    Ok(())
}
