use nalgebra::{DMatrix, DVector, Vector3};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::math::{Pose, Quat};

/// Fixed frame offset given as a translation and roll-pitch-yaw angles.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    #[serde(default)]
    pub origin: [f64; 3],
    #[serde(default)]
    pub rpy: [f64; 3],
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct JointConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub origin: [f64; 3],
    #[serde(default)]
    pub rpy: [f64; 3],
    pub axis: [f64; 3],
}

/// Serial-chain geometry as read from a chain file.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub base: FrameConfig,
    pub joints: Vec<JointConfig>,
    #[serde(default)]
    pub tool: FrameConfig,
}

fn rpy_quat(rpy: &[f64; 3]) -> Quat {
    let rx = Quat::from_axis_angle(&Vector3::x(), rpy[0]);
    let ry = Quat::from_axis_angle(&Vector3::y(), rpy[1]);
    let rz = Quat::from_axis_angle(&Vector3::z(), rpy[2]);
    rz * ry * rx
}

fn frame_pose(frame: &FrameConfig) -> Pose {
    Pose::new(Vector3::from(frame.origin), rpy_quat(&frame.rpy))
}

#[derive(Debug, Clone, PartialEq)]
struct RevoluteJoint {
    offset: Pose,
    axis: Vector3<f64>,
}

/// Revolute serial chain: `base * prod_i(offset_i * rot(axis_i, q_i)) * tool`.
#[derive(Debug, Clone, PartialEq)]
pub struct SerialChain {
    base: Pose,
    joints: Vec<RevoluteJoint>,
    tool: Pose,
}

/// Joint origin and world-frame axis, captured while walking the chain.
struct JointFrame {
    origin: Vector3<f64>,
    axis: Vector3<f64>,
}

fn compose(parent: &Pose, child: &Pose) -> Pose {
    Pose {
        position: parent.position + parent.orientation.rotate(&child.position),
        orientation: parent.orientation * child.orientation,
    }
}

impl SerialChain {
    pub fn from_config(config: &ChainConfig) -> Result<Self> {
        if config.joints.is_empty() {
            return Err(Error::InvalidInput("chain needs at least one joint".into()));
        }
        let mut joints = Vec::with_capacity(config.joints.len());
        for (i, j) in config.joints.iter().enumerate() {
            let axis = Vector3::from(j.axis);
            let norm = axis.norm();
            if !norm.is_finite() || norm < 1e-9 {
                return Err(Error::InvalidInput(format!("joint {i} has a degenerate axis")));
            }
            joints.push(RevoluteJoint {
                offset: Pose::new(Vector3::from(j.origin), rpy_quat(&j.rpy)),
                axis: axis / norm,
            });
        }
        Ok(Self {
            base: frame_pose(&config.base),
            joints,
            tool: frame_pose(&config.tool),
        })
    }

    /// Planar chain of z-axis joints with links along the local x axis.
    pub fn planar(lengths: &[f64]) -> Self {
        let mut joints = Vec::with_capacity(lengths.len());
        let mut previous = 0.0;
        for &l in lengths {
            joints.push(RevoluteJoint {
                offset: Pose::from_position(Vector3::new(previous, 0.0, 0.0)),
                axis: Vector3::z(),
            });
            previous = l;
        }
        Self {
            base: Pose::default(),
            joints,
            tool: Pose::from_position(Vector3::new(previous, 0.0, 0.0)),
        }
    }

    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    fn walk(&self, q: &DVector<f64>, frames: Option<&mut Vec<JointFrame>>) -> Pose {
        assert_eq!(q.len(), self.joints.len(), "joint vector length mismatch");
        let mut current = self.base;
        let mut frames = frames;
        for (joint, &angle) in self.joints.iter().zip(q.iter()) {
            current = compose(&current, &joint.offset);
            if let Some(out) = frames.as_deref_mut() {
                out.push(JointFrame {
                    origin: current.position,
                    axis: current.orientation.rotate(&joint.axis),
                });
            }
            current.orientation = current.orientation * Quat::from_axis_angle(&joint.axis, angle);
        }
        compose(&current, &self.tool)
    }

    /// Tool pose in the base frame.
    pub fn forward_kinematics(&self, q: &DVector<f64>) -> Pose {
        self.walk(q, None)
    }

    /// Geometric Jacobian (6 x N): rows are `[v; w]` in the base frame.
    pub fn jacobian(&self, q: &DVector<f64>) -> DMatrix<f64> {
        let mut frames = Vec::with_capacity(self.joints.len());
        let tool = self.walk(q, Some(&mut frames));
        let mut j = DMatrix::zeros(6, self.joints.len());
        for (i, f) in frames.iter().enumerate() {
            let linear = f.axis.cross(&(tool.position - f.origin));
            j.fixed_view_mut::<3, 1>(0, i).copy_from(&linear);
            j.fixed_view_mut::<3, 1>(3, i).copy_from(&f.axis);
        }
        j
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    pub(crate) fn six_dof() -> SerialChain {
        let joint = |origin: [f64; 3], axis: [f64; 3]| JointConfig {
            name: None,
            origin,
            rpy: [0.0; 3],
            axis,
        };
        SerialChain::from_config(&ChainConfig {
            name: None,
            base: FrameConfig::default(),
            joints: vec![
                joint([0.0, 0.0, 0.4], [0.0, 0.0, 1.0]),
                joint([0.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
                joint([0.0, 0.0, 0.5], [0.0, 1.0, 0.0]),
                joint([0.45, 0.0, 0.0], [1.0, 0.0, 0.0]),
                joint([0.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
                joint([0.0, 0.0, 0.0], [1.0, 0.0, 0.0]),
            ],
            tool: FrameConfig {
                origin: [0.1, 0.0, 0.0],
                rpy: [0.0; 3],
            },
        })
        .unwrap()
    }

    #[test]
    fn home_pose_is_sum_of_offsets() {
        let c = six_dof();
        let p = c.forward_kinematics(&DVector::zeros(6));
        assert!((p.position - Vector3::new(0.55, 0.0, 0.9)).norm() < 1e-15);
        assert_eq!(p.orientation, Quat::IDENTITY);
    }

    #[test]
    fn planar_two_link_oracle() {
        let c = SerialChain::planar(&[1.0, 1.0]);
        let p = c.forward_kinematics(&DVector::from_vec(vec![FRAC_PI_2, 0.0]));
        assert!((p.position - Vector3::new(0.0, 2.0, 0.0)).norm() < 1e-15);

        let j = c.jacobian(&DVector::zeros(2));
        assert!((j[(0, 0)]).abs() < 1e-15);
        assert!((j[(1, 0)] - 2.0).abs() < 1e-15);
        assert!((j[(1, 1)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn periodic_in_joint_angle() {
        let c = six_dof();
        let q = DVector::from_vec(vec![0.1, 0.2, -0.3, 0.4, 0.5, -0.6]);
        let mut shifted = q.clone();
        shifted[3] += 2.0 * PI;
        let a = c.forward_kinematics(&q);
        let b = c.forward_kinematics(&shifted);
        assert!((a.position - b.position).norm() < 1e-12);
        assert!((a.orientation.dot(&b.orientation).abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let c = six_dof();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let q = DVector::from_fn(6, |_, _| rng.random_range(-PI..PI));
            let j = c.jacobian(&q);
            let h = 1e-6;
            for i in 0..6 {
                let mut qp = q.clone();
                let mut qm = q.clone();
                qp[i] += h;
                qm[i] -= h;
                let fd = (c.forward_kinematics(&qp).position - c.forward_kinematics(&qm).position)
                    / (2.0 * h);
                let col = j.fixed_view::<3, 1>(0, i);
                assert!((fd - col).norm() < 1e-6);
                assert!((j.fixed_view::<3, 1>(3, i).norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_degenerate_axis() {
        let cfg = ChainConfig {
            name: None,
            base: FrameConfig::default(),
            joints: vec![JointConfig {
                name: None,
                origin: [0.0; 3],
                rpy: [0.0; 3],
                axis: [0.0; 3],
            }],
            tool: FrameConfig::default(),
        };
        assert!(SerialChain::from_config(&cfg).is_err());
    }
}
