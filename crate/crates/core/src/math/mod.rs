//! Shared math and domain types: quaternions, poses, twists, wrenches,
//! joint states and the damped least-squares pseudoinverse.

mod dls;
mod joint;
mod quat;
mod spatial;

pub use dls::dls_pinv;
pub use joint::{GainMatrix, JointState};
pub use quat::{orientation_error, quat_multiply, quat_slerp, Quat, UNIT_TOLERANCE};
pub use spatial::{integrate_pose, offset_pose, pose_error, Pose, Twist, Wrench};

pub(crate) use quat::orientation_error_unchecked;
