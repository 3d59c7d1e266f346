//! Channel naming: `<component>/<quantity>/<index-or-axis>`.

pub const POSE_AXES: [&str; 7] = ["x", "y", "z", "qw", "qx", "qy", "qz"];
pub const TWIST_AXES: [&str; 6] = ["vx", "vy", "vz", "wx", "wy", "wz"];
pub const WRENCH_AXES: [&str; 6] = ["fx", "fy", "fz", "tx", "ty", "tz"];

pub fn channel(component: &str, quantity: &str, key: impl std::fmt::Display) -> String {
    format!("{component}/{quantity}/{key}")
}

/// `<component>/<quantity>/0 .. n-1`
pub fn joint_channels(component: &str, quantity: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| channel(component, quantity, i)).collect()
}

pub fn axis_channels(component: &str, quantity: &str, axes: &[&str]) -> Vec<String> {
    axes.iter().map(|a| channel(component, quantity, a)).collect()
}

pub fn pose_channels(component: &str) -> Vec<String> {
    axis_channels(component, "pose", &POSE_AXES)
}

pub fn twist_channels(component: &str) -> Vec<String> {
    axis_channels(component, "twist", &TWIST_AXES)
}

pub fn wrench_channels(component: &str) -> Vec<String> {
    axis_channels(component, "wrench", &WRENCH_AXES)
}
