use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::math::{Pose, Twist, Wrench};

/// Penalty-stiffness plane. `normal` points out of the wall, towards free space.
#[derive(Debug, Clone, PartialEq)]
pub struct WallModel {
    point: Vector3<f64>,
    normal: Vector3<f64>,
    stiffness: f64,
    damping: f64,
}

impl WallModel {
    pub fn new(point: Vector3<f64>, normal: Vector3<f64>, stiffness: f64, damping: f64) -> Result<Self> {
        let n = normal.norm();
        if !n.is_finite() || n < 1e-9 || point.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("wall needs a finite point and non-zero normal".into()));
        }
        if !(stiffness.is_finite() && stiffness >= 0.0 && damping.is_finite() && damping >= 0.0) {
            return Err(Error::InvalidInput("wall stiffness and damping must be >= 0".into()));
        }
        Ok(Self {
            point,
            normal: normal / n,
            stiffness,
            damping,
        })
    }

    pub fn normal(&self) -> &Vector3<f64> {
        &self.normal
    }

    pub fn point(&self) -> &Vector3<f64> {
        &self.point
    }

    pub fn stiffness(&self) -> f64 {
        self.stiffness
    }

    /// Penetration depth of `position` (zero outside the wall).
    pub fn penetration(&self, position: &Vector3<f64>) -> f64 {
        (self.point - position).dot(&self.normal).max(0.0)
    }
}

/// Contact wrench exerted by the wall on the end effector.
pub fn wall_wrench(wall: &WallModel, ee_pose: &Pose, ee_twist: &Twist) -> Wrench {
    let depth = wall.penetration(&ee_pose.position);
    if depth <= 0.0 {
        return Wrench::zero();
    }
    let approach = (-ee_twist.linear.dot(&wall.normal)).max(0.0);
    let magnitude = wall.stiffness * depth + wall.damping * approach;
    Wrench::new(wall.normal * magnitude, Vector3::zeros())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wall() -> WallModel {
        WallModel::new(Vector3::new(1.0, 0.0, 0.0), Vector3::new(-1.0, 0.0, 0.0), 10_000.0, 50.0)
            .unwrap()
    }

    #[test]
    fn outside_is_free() {
        let p = Pose::from_position(Vector3::new(0.9, 0.3, 0.0));
        assert_eq!(wall_wrench(&wall(), &p, &Twist::zero()), Wrench::zero());
    }

    #[test]
    fn hooke_at_one_millimetre() {
        let p = Pose::from_position(Vector3::new(1.001, 0.0, 0.0));
        let w = wall_wrench(&wall(), &p, &Twist::zero());
        assert!((w.force - Vector3::new(-10.0, 0.0, 0.0)).norm() < 1e-9);
        assert_eq!(w.torque, Vector3::zeros());
    }

    #[test]
    fn continuous_at_surface() {
        let at = Pose::from_position(Vector3::new(1.0, 0.0, 0.0));
        assert_eq!(wall_wrench(&wall(), &at, &Twist::zero()), Wrench::zero());
        let just_in = Pose::from_position(Vector3::new(1.0 + 1e-12, 0.0, 0.0));
        assert!(wall_wrench(&wall(), &just_in, &Twist::zero()).force.norm() < 1e-7);
    }

    proptest! {
        #[test]
        fn never_pulls(x in 0.9..1.1f64, y in -1.0..1.0f64, vx in -2.0..2.0f64, vy in -2.0..2.0f64) {
            let w = wall();
            let p = Pose::from_position(Vector3::new(x, y, 0.0));
            let t = Twist::new(Vector3::new(vx, vy, 0.0), Vector3::zeros());
            prop_assert!(wall_wrench(&w, &p, &t).force.dot(w.normal()) >= 0.0);
        }
    }
}
