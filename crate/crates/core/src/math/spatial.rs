use nalgebra::{Vector3, Vector6};

use super::quat::{orientation_error_unchecked, Quat};

/// End-effector pose in the base frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub position: Vector3<f64>,
    pub orientation: Quat,
}

impl Pose {
    /// Builds a pose, normalizing the orientation.
    pub fn new(position: Vector3<f64>, orientation: Quat) -> Self {
        Self {
            position,
            orientation: orientation.normalized(),
        }
    }

    pub fn from_position(position: Vector3<f64>) -> Self {
        Self {
            position,
            orientation: Quat::IDENTITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.position.iter().all(|v| v.is_finite()) && self.orientation.is_finite()
    }

    /// `[x, y, z, qw, qx, qy, qz]`
    pub fn to_array(&self) -> [f64; 7] {
        let q = &self.orientation;
        [
            self.position.x,
            self.position.y,
            self.position.z,
            q.w,
            q.x,
            q.y,
            q.z,
        ]
    }

    /// Inverse of [`Pose::to_array`]. The quaternion is taken verbatim.
    pub fn from_slice(v: &[f64]) -> Self {
        Self {
            position: Vector3::new(v[0], v[1], v[2]),
            orientation: Quat::new(v[3], v[4], v[5], v[6]),
        }
    }
}

/// Linear and angular velocity, base frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Twist {
    pub linear: Vector3<f64>,
    pub angular: Vector3<f64>,
}

impl Twist {
    pub fn new(linear: Vector3<f64>, angular: Vector3<f64>) -> Self {
        Self { linear, angular }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(
            self.linear.x,
            self.linear.y,
            self.linear.z,
            self.angular.x,
            self.angular.y,
            self.angular.z,
        )
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self {
            linear: Vector3::new(v[0], v[1], v[2]),
            angular: Vector3::new(v[3], v[4], v[5]),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.linear.iter().chain(self.angular.iter()).all(|v| v.is_finite())
    }
}

/// Force and torque acting on the end effector, base frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Wrench {
    pub force: Vector3<f64>,
    pub torque: Vector3<f64>,
}

impl Wrench {
    pub fn new(force: Vector3<f64>, torque: Vector3<f64>) -> Self {
        Self { force, torque }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(
            self.force.x,
            self.force.y,
            self.force.z,
            self.torque.x,
            self.torque.y,
            self.torque.z,
        )
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self {
            force: Vector3::new(v[0], v[1], v[2]),
            torque: Vector3::new(v[3], v[4], v[5]),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.force.iter().chain(self.torque.iter()).all(|v| v.is_finite())
    }
}

/// Six-vector `[desired.p - actual.p ; orientation error]`, base frame.
pub fn pose_error(desired: &Pose, actual: &Pose) -> Vector6<f64> {
    let dp = desired.position - actual.position;
    let dr = orientation_error_unchecked(&desired.orientation, &actual.orientation);
    Vector6::new(dp.x, dp.y, dp.z, dr.x, dr.y, dr.z)
}

/// Advances `pose` by a constant twist over `dt`. The rotation increment is
/// applied on the left (world frame).
pub fn integrate_pose(pose: &Pose, twist: &Twist, dt: f64) -> Pose {
    let dq = Quat::from_rotation_vector(&(twist.angular * dt));
    Pose {
        position: pose.position + twist.linear * dt,
        orientation: dq * pose.orientation,
    }
}

/// Applies a six-vector offset `[dp ; dr]` to a pose: position shift plus a
/// world-frame rotation `exp(dr)`.
pub fn offset_pose(pose: &Pose, delta: &Vector6<f64>) -> Pose {
    let dp = Vector3::new(delta[0], delta[1], delta[2]);
    let dr = Vector3::new(delta[3], delta[4], delta[5]);
    Pose {
        position: pose.position + dp,
        orientation: Quat::from_rotation_vector(&dr) * pose.orientation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn arb_quat() -> impl Strategy<Value = Quat> {
        (
            -1.0..1.0f64,
            -1.0..1.0f64,
            -1.0..1.0f64,
            -1.0..1.0f64,
        )
            .prop_filter("non-degenerate", |(w, x, y, z)| {
                w * w + x * x + y * y + z * z > 1e-3
            })
            .prop_map(|(w, x, y, z)| Quat::new(w, x, y, z).normalized())
    }

    fn arb_pose() -> impl Strategy<Value = Pose> {
        (prop::array::uniform3(-2.0..2.0f64), arb_quat())
            .prop_map(|(p, q)| Pose::new(Vector3::from(p), q))
    }

    #[test]
    fn pose_error_examples() {
        let p = Pose::new(Vector3::new(0.3, -0.2, 0.5), Quat::from_axis_angle(&Vector3::y(), 0.4));
        assert_eq!(pose_error(&p, &p), Vector6::zeros());

        let mut shifted = p;
        shifted.position.x += 0.1;
        let e = pose_error(&shifted, &p);
        assert!((e - Vector6::new(0.1, 0.0, 0.0, 0.0, 0.0, 0.0)).norm() < 1e-15);

        let a = Pose::from_position(Vector3::new(1.0, 2.0, 3.0));
        let d = Pose::new(a.position, Quat::from_axis_angle(&Vector3::z(), FRAC_PI_2));
        let e = pose_error(&d, &a);
        assert!((e - Vector6::new(0.0, 0.0, 0.0, 0.0, 0.0, FRAC_PI_2)).norm() < 1e-15);
    }

    #[test]
    fn integrate_pose_examples() {
        let p = Pose::new(Vector3::new(0.1, 0.2, 0.3), Quat::from_axis_angle(&Vector3::x(), 0.2));
        assert_eq!(integrate_pose(&p, &Twist::zero(), 0.01), p);

        let spin = Twist::new(Vector3::zeros(), Vector3::new(0.0, 0.0, PI));
        let r = integrate_pose(&Pose::default(), &spin, 0.5);
        let expected = Quat::from_axis_angle(&Vector3::z(), FRAC_PI_2);
        assert!((r.orientation.dot(&expected).abs() - 1.0).abs() < 1e-15);

        let lin = Twist::new(Vector3::new(1.0, 2.0, 3.0), Vector3::zeros());
        let r = integrate_pose(&Pose::default(), &lin, 0.001);
        assert!((r.position - Vector3::new(0.001, 0.002, 0.003)).norm() < 1e-18);
    }

    proptest! {
        #[test]
        fn pose_error_self_is_zero(p in arb_pose()) {
            prop_assert!(pose_error(&p, &p).norm() < 1e-15);
        }

        #[test]
        fn orientation_error_antisymmetric(a in arb_quat(), b in arb_quat()) {
            let ab = orientation_error_unchecked(&a, &b);
            let ba = orientation_error_unchecked(&b, &a);
            prop_assume!(ab.norm() < PI - 1e-6);
            prop_assert!((ab + ba).norm() < 1e-9);
        }

        #[test]
        fn integration_preserves_norm(p in arb_pose(), w in prop::array::uniform3(-5.0..5.0f64),
                                      v in prop::array::uniform3(-1.0..1.0f64), steps in 1usize..200) {
            let t = Twist::new(Vector3::from(v), Vector3::from(w));
            let mut x = p;
            for _ in 0..steps {
                x = integrate_pose(&x, &t, 1e-3);
                prop_assert!((x.orientation.norm() - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn stepping_matches_single_step_for_single_axis(p in arb_pose(), rate in -3.0..3.0f64,
                                                        axis in 0usize..3, lin in prop::array::uniform3(-1.0..1.0f64),
                                                        k in 1usize..100) {
            let mut w = Vector3::zeros();
            w[axis] = rate;
            let t = Twist::new(Vector3::from(lin), w);
            let dt = 1e-3;
            let mut stepped = p;
            for _ in 0..k {
                stepped = integrate_pose(&stepped, &t, dt);
            }
            let once = integrate_pose(&p, &t, k as f64 * dt);
            prop_assert!((stepped.position - once.position).norm() < 1e-9);
            prop_assert!((stepped.orientation.dot(&once.orientation).abs() - 1.0).abs() < 1e-9);
            prop_assert!(pose_error(&once, &stepped).norm() < 1e-9);
        }
    }
}
