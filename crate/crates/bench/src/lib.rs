//! Fixtures shared by the benchmarks.

use nalgebra::{DVector, Vector3};
use refchain_core::chain::ComponentDescriptor;
use refchain_core::plant::{ChainConfig, DynamicPlant, FrameConfig, JointConfig, KinematicPlant, PlanarArm, SerialChain};
use refchain_core::refgen::{JointReference, TaskReference, Trajectory, Waypoint};
use refchain_core::{Pose, Quat};

pub fn planar_plant() -> DynamicPlant {
    let arm = PlanarArm::new(vec![0.5, 0.4, 0.3], vec![2.0, 1.5, 1.0], vec![0.5, 0.4, 0.3], 9.81, true)
        .expect("valid arm");
    DynamicPlant::new(arm, DVector::from_vec(vec![-1.2, 0.5, 0.3])).expect("valid state")
}

fn joint(origin: [f64; 3], axis: [f64; 3]) -> JointConfig {
    JointConfig {
        name: None,
        origin,
        rpy: [0.0; 3],
        axis,
    }
}

/// Anthropomorphic arm with a spherical wrist.
pub fn six_dof_chain() -> SerialChain {
    let config = ChainConfig {
        name: None,
        base: FrameConfig::default(),
        joints: vec![
            joint([0.0, 0.0, 0.4], [0.0, 0.0, 1.0]),
            joint([0.0; 3], [0.0, 1.0, 0.0]),
            joint([0.0, 0.0, 0.5], [0.0, 1.0, 0.0]),
            joint([0.45, 0.0, 0.0], [1.0, 0.0, 0.0]),
            joint([0.0; 3], [0.0, 1.0, 0.0]),
            joint([0.0; 3], [1.0, 0.0, 0.0]),
        ],
        tool: FrameConfig {
            origin: [0.1, 0.0, 0.0],
            rpy: [0.0; 3],
        },
    };
    SerialChain::from_config(&config).expect("valid chain")
}

pub fn six_dof_plant() -> KinematicPlant {
    KinematicPlant::new(six_dof_chain(), DVector::from_vec(vec![0.0, 0.3, 0.5, 0.0, 0.4, 0.0])).expect("valid state")
}

pub fn joint_pipeline() -> Vec<ComponentDescriptor> {
    vec![
        ComponentDescriptor::new("jrg", "jrg"),
        ComponentDescriptor::new("pdgc", "pdgc").with_scalar("kp", 100.0).with_scalar("kd", 20.0),
    ]
}

pub fn task_pipeline() -> Vec<ComponentDescriptor> {
    vec![
        ComponentDescriptor::new("trg", "trg"),
        ComponentDescriptor::new("ac", "admittance")
            .with_scalar("mass", 10.0)
            .with_scalar("damping", 400.0)
            .with_scalar("stiffness", 500.0),
        ComponentDescriptor::new("cpc", "cpc").with_scalar("kp", 50.0).with_scalar("dls_lambda", 0.01),
    ]
}

/// `n` joint waypoints, one per second, with positions only.
pub fn joint_trajectory(n: usize) -> Trajectory {
    let waypoints = (1..=n)
        .map(|k| {
            let s = (k as f64).sin() * 0.3;
            Waypoint::new(k as f64, JointReference::new(DVector::from_vec(vec![-1.2 + s, 0.5 - s, 0.3 + s])))
        })
        .collect();
    Trajectory::new(1, waypoints)
}

/// `n` task waypoints, one per second, swaying in y and about z.
pub fn task_trajectory(n: usize) -> Trajectory {
    let waypoints = (1..=n)
        .map(|k| {
            let pose = Pose::new(
                Vector3::new(0.5, 0.05 * (k as f64).sin(), 0.46),
                Quat::from_axis_angle(&Vector3::z(), 0.1 * (k as f64).sin()),
            );
            Waypoint::new(k as f64, TaskReference::new(pose))
        })
        .collect();
    Trajectory::new(2, waypoints)
}
