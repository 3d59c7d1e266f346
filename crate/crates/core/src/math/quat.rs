use std::fmt;
use std::ops::Mul;

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Below this rotation-vector magnitude the exp/log maps switch to their
/// first-order expansions.
const SMALL_ANGLE: f64 = 1e-12;

/// Above this cosine the slerp weights are replaced by a normalized lerp.
const SLERP_LINEAR_THRESHOLD: f64 = 1.0 - 1e-12;

/// Tolerance on `|q| - 1` accepted by the checked operations.
pub const UNIT_TOLERANCE: f64 = 1e-6;

/// Unit quaternion `(w, x, y, z)` representing a rotation.
///
/// Every producing operation returns a normalized quaternion in canonical
/// sign (`w >= 0`; when `w == 0` the first non-zero of `x, y, z` is positive).
#[derive(Clone, Copy, PartialEq)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl fmt::Debug for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Quat({}, {}, {}, {})", self.w, self.x, self.y, self.z)
    }
}

impl Default for Quat {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Quat {
    pub const IDENTITY: Quat = Quat {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Raw constructor. No normalization.
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    /// Rotation of `angle` radians about `axis`. The axis need not be unit length.
    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Self {
        let n = axis.norm();
        if n == 0.0 {
            return Self::IDENTITY;
        }
        Self::from_rotation_vector(&(axis * (angle / n)))
    }

    /// Exponential map: rotation vector (axis * angle) to quaternion.
    pub fn from_rotation_vector(r: &Vector3<f64>) -> Self {
        let theta = r.norm();
        let q = if theta < SMALL_ANGLE {
            Quat::new(1.0, 0.5 * r.x, 0.5 * r.y, 0.5 * r.z)
        } else {
            let (s, c) = (0.5 * theta).sin_cos();
            let k = s / theta;
            Quat::new(c, k * r.x, k * r.y, k * r.z)
        };
        q.normalized()
    }

    /// Logarithmic map: rotation vector with magnitude in `[0, pi]`.
    pub fn to_rotation_vector(&self) -> Vector3<f64> {
        let q = self.canonical();
        let v = Vector3::new(q.x, q.y, q.z);
        let s = v.norm();
        if s < SMALL_ANGLE {
            return v * (2.0 / q.w);
        }
        let angle = 2.0 * s.atan2(q.w);
        v * (angle / s)
    }

    pub fn angle(&self) -> f64 {
        let q = self.canonical();
        2.0 * (q.x * q.x + q.y * q.y + q.z * q.z).sqrt().atan2(q.w)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Quat) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn is_unit(&self, tol: f64) -> bool {
        self.is_finite() && (self.norm() - 1.0).abs() <= tol
    }

    pub fn conjugate(&self) -> Self {
        Quat::new(self.w, -self.x, -self.y, -self.z)
    }

    fn negated(&self) -> Self {
        Quat::new(-self.w, -self.x, -self.y, -self.z)
    }

    /// Same rotation with the canonical sign.
    pub fn canonical(&self) -> Self {
        let flip = if self.w != 0.0 {
            self.w < 0.0
        } else if self.x != 0.0 {
            self.x < 0.0
        } else if self.y != 0.0 {
            self.y < 0.0
        } else {
            self.z < 0.0
        };
        if flip {
            self.negated()
        } else {
            *self
        }
    }

    /// Unit-norm, canonical-sign copy. A zero quaternion maps to identity.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return Self::IDENTITY;
        }
        Quat::new(self.w / n, self.x / n, self.y / n, self.z / n).canonical()
    }

    fn hamilton(&self, b: &Quat) -> Quat {
        let a = self;
        Quat::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }

    pub fn rotate(&self, v: &Vector3<f64>) -> Vector3<f64> {
        let u = Vector3::new(self.x, self.y, self.z);
        let t = 2.0 * u.cross(v);
        v + self.w * t + u.cross(&t)
    }

    /// Shortest-arc spherical interpolation. `s` is clamped to `[0, 1]`.
    pub fn slerp(&self, other: &Quat, s: f64) -> Quat {
        let s = s.clamp(0.0, 1.0);
        if s == 0.0 {
            return self.canonical();
        }
        if s == 1.0 {
            return other.canonical();
        }
        let mut b = *other;
        let mut cos = self.dot(&b);
        if cos < 0.0 {
            b = b.negated();
            cos = -cos;
        }
        let (wa, wb) = if cos > SLERP_LINEAR_THRESHOLD {
            (1.0 - s, s)
        } else {
            let theta = cos.min(1.0).acos();
            let sin = theta.sin();
            (((1.0 - s) * theta).sin() / sin, (s * theta).sin() / sin)
        };
        Quat::new(
            wa * self.w + wb * b.w,
            wa * self.x + wb * b.x,
            wa * self.y + wb * b.y,
            wa * self.z + wb * b.z,
        )
        .normalized()
    }
}

impl Mul for Quat {
    type Output = Quat;

    /// Hamilton product, renormalized.
    fn mul(self, rhs: Quat) -> Quat {
        self.hamilton(&rhs).normalized()
    }
}

fn check_unit(q: &Quat, what: &str) -> Result<()> {
    if !q.is_finite() {
        return Err(Error::InvalidInput(format!("{what} is not finite")));
    }
    if !q.is_unit(UNIT_TOLERANCE) {
        return Err(Error::InvalidInput(format!(
            "{what} is not unit norm (|q| = {})",
            q.norm()
        )));
    }
    Ok(())
}

/// Checked Hamilton product of two unit quaternions.
pub fn quat_multiply(a: &Quat, b: &Quat) -> Result<Quat> {
    check_unit(a, "left operand")?;
    check_unit(b, "right operand")?;
    Ok(*a * *b)
}

/// Checked shortest-arc slerp; `s` must lie in `[0, 1]`.
pub fn quat_slerp(a: &Quat, b: &Quat, s: f64) -> Result<Quat> {
    check_unit(a, "start")?;
    check_unit(b, "end")?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidInput(format!(
            "interpolation parameter {s} outside [0, 1]"
        )));
    }
    Ok(a.slerp(b, s))
}

/// Rotation vector of `desired * conj(actual)` in the base frame.
pub fn orientation_error(desired: &Quat, actual: &Quat) -> Result<Vector3<f64>> {
    check_unit(desired, "desired orientation")?;
    check_unit(actual, "actual orientation")?;
    Ok(orientation_error_unchecked(desired, actual))
}

pub(crate) fn orientation_error_unchecked(desired: &Quat, actual: &Quat) -> Vector3<f64> {
    desired.hamilton(&actual.conjugate()).to_rotation_vector()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Quaternion, Rotation3, Unit, UnitQuaternion};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};

    fn rot_z(angle: f64) -> Quat {
        Quat::from_axis_angle(&Vector3::z(), angle)
    }

    fn close(a: &Quat, b: &Quat, tol: f64) -> bool {
        let (a, b) = (a.canonical(), b.canonical());
        (a.w - b.w).abs() < tol
            && (a.x - b.x).abs() < tol
            && (a.y - b.y).abs() < tol
            && (a.z - b.z).abs() < tol
    }

    // Rotation-matrix oracle: convert through nalgebra's rotation matrices.
    fn matrix_of(q: &Quat) -> Rotation3<f64> {
        UnitQuaternion::from_quaternion(Quaternion::new(q.w, q.x, q.y, q.z)).to_rotation_matrix()
    }

    #[test]
    fn identity_product() {
        assert_eq!(
            quat_multiply(&Quat::IDENTITY, &Quat::IDENTITY).unwrap(),
            Quat::IDENTITY
        );
    }

    #[test]
    fn product_with_conjugate_is_identity() {
        let q = rot_z(FRAC_PI_2);
        let p = quat_multiply(&q, &q.conjugate()).unwrap();
        assert!(close(&p, &Quat::IDENTITY, 1e-15));
    }

    #[test]
    fn quarter_turns_compose_to_half_turn() {
        let q = rot_z(FRAC_PI_2);
        let p = quat_multiply(&q, &q).unwrap();
        let oracle = matrix_of(&q) * matrix_of(&q);
        let expected = Rotation3::from_axis_angle(&Vector3::z_axis(), PI);
        assert!((oracle.matrix() - expected.matrix()).amax() < 1e-12);
        assert!((matrix_of(&p).matrix() - oracle.matrix()).amax() < 1e-12);
        assert!(close(&p, &Quat::new(0.0, 0.0, 0.0, 1.0), 1e-15));
    }

    #[test]
    fn multiply_rejects_non_finite() {
        let bad = Quat::new(f64::NAN, 0.0, 0.0, 0.0);
        assert!(matches!(
            quat_multiply(&bad, &Quat::IDENTITY),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn slerp_equal_endpoints() {
        let q = Quat::from_axis_angle(&Vector3::new(1.0, 2.0, 3.0), 0.7);
        assert!(close(&quat_slerp(&q, &q, 0.5).unwrap(), &q, 1e-15));
    }

    #[test]
    fn slerp_midpoint_is_half_angle() {
        let q = quat_slerp(&Quat::IDENTITY, &rot_z(FRAC_PI_2), 0.5).unwrap();
        assert!(close(&q, &rot_z(FRAC_PI_4), 1e-12));
    }

    #[test]
    fn slerp_angle_scales_linearly() {
        let end = Quat::from_axis_angle(&Vector3::x(), 170f64.to_radians());
        let q = quat_slerp(&Quat::IDENTITY, &end, 0.25).unwrap();
        // axis-angle oracle
        let r = Rotation3::from_axis_angle(&Vector3::x_axis(), 42.5f64.to_radians());
        assert!((matrix_of(&q).matrix() - r.matrix()).amax() < 1e-12);
    }

    #[test]
    fn slerp_endpoints_and_antipodes() {
        let a = rot_z(0.3);
        let b = rot_z(-2.9);
        assert_eq!(a.slerp(&b, 0.0), a.canonical());
        assert_eq!(a.slerp(&b, 1.0), b.canonical());
        // negated endpoint takes the same short arc
        let nb = Quat::new(-b.w, -b.x, -b.y, -b.z);
        assert!(close(&a.slerp(&b, 0.4), &a.slerp(&nb, 0.4), 1e-15));
    }

    #[test]
    fn slerp_rejects_parameter_out_of_range() {
        assert!(quat_slerp(&Quat::IDENTITY, &Quat::IDENTITY, 1.5).is_err());
        assert!(quat_slerp(&Quat::IDENTITY, &Quat::IDENTITY, -0.1).is_err());
    }

    #[test]
    fn orientation_error_examples() {
        let q = rot_z(0.4);
        assert!(orientation_error(&q, &q).unwrap().norm() < 1e-15);

        let e = orientation_error(&rot_z(FRAC_PI_6), &Quat::IDENTITY).unwrap();
        assert!((e - Vector3::new(0.0, 0.0, FRAC_PI_6)).norm() < 1e-15);

        let axis = Vector3::new(1.0, 1.0, 1.0) / 3f64.sqrt();
        let d = Quat::from_axis_angle(&axis, 2.0 * PI / 3.0);
        let e = orientation_error(&d, &Quat::IDENTITY).unwrap();
        // axis-angle extraction oracle
        let (ax, ang) = Rotation3::from_axis_angle(&Unit::new_normalize(axis), 2.0 * PI / 3.0)
            .axis_angle()
            .unwrap();
        assert!((e - ax.into_inner() * ang).norm() < 1e-12);
    }

    #[test]
    fn canonical_sign() {
        let q = Quat::new(-0.5, 0.5, 0.5, 0.5).normalized();
        assert!(q.w > 0.0);
        let h = Quat::new(0.0, 0.0, 0.0, -1.0).normalized();
        assert_eq!(h, Quat::new(0.0, -0.0, -0.0, 1.0));
    }

    #[test]
    fn rotate_matches_matrix() {
        let q = Quat::from_axis_angle(&Vector3::new(0.3, -1.0, 0.2), 1.1);
        let v = Vector3::new(0.4, 0.5, -0.6);
        assert!((q.rotate(&v) - matrix_of(&q) * v).norm() < 1e-14);
    }
}
