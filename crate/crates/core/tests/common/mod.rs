#![allow(dead_code)]

use nalgebra::DVector;
use refchain_core::chain::{ComponentDescriptor, Pipeline};
use refchain_core::plant::{wall_wrench, DynamicPlant, KinematicPlant, PlanarArm, Plant, SerialChain, WallModel};

pub fn three_link(gravity: bool) -> PlanarArm {
    PlanarArm::new(vec![0.5, 0.4, 0.3], vec![2.0, 1.5, 1.0], vec![0.5, 0.4, 0.3], 9.81, gravity).unwrap()
}

pub fn dynamic_plant(q0: &[f64]) -> DynamicPlant {
    DynamicPlant::new(three_link(true), DVector::from_column_slice(q0)).unwrap()
}

/// Same geometry as the shipped 6-DOF chain file.
pub fn six_dof_chain() -> SerialChain {
    let cfg: refchain_core::plant::ChainConfig = toml::from_str(
        r#"
        [[joints]]
        origin = [0.0, 0.0, 0.4]
        axis = [0.0, 0.0, 1.0]
        [[joints]]
        axis = [0.0, 1.0, 0.0]
        [[joints]]
        origin = [0.0, 0.0, 0.5]
        axis = [0.0, 1.0, 0.0]
        [[joints]]
        origin = [0.45, 0.0, 0.0]
        axis = [1.0, 0.0, 0.0]
        [[joints]]
        axis = [0.0, 1.0, 0.0]
        [[joints]]
        axis = [1.0, 0.0, 0.0]
        [tool]
        origin = [0.1, 0.0, 0.0]
        "#,
    )
    .unwrap();
    SerialChain::from_config(&cfg).unwrap()
}

pub fn kinematic_plant(q0: &[f64]) -> KinematicPlant {
    KinematicPlant::new(six_dof_chain(), DVector::from_column_slice(q0)).unwrap()
}

pub fn jrg() -> ComponentDescriptor {
    ComponentDescriptor::new("jrg", "jrg")
}

pub fn trg() -> ComponentDescriptor {
    ComponentDescriptor::new("trg", "trg")
}

pub fn pdgc(kp: f64, kd: f64) -> ComponentDescriptor {
    ComponentDescriptor::new("pdgc", "pdgc").with_scalar("kp", kp).with_scalar("kd", kd)
}

pub fn pid(kp: f64, kd: f64, ki: f64) -> ComponentDescriptor {
    ComponentDescriptor::new("pid", "pid")
        .with_scalar("kp", kp)
        .with_scalar("kd", kd)
        .with_scalar("ki", ki)
}

pub fn cpc(kp: f64, lambda: f64) -> ComponentDescriptor {
    ComponentDescriptor::new("cpc", "cpc").with_scalar("kp", kp).with_scalar("dls_lambda", lambda)
}

/// Steps pipeline and plant together for `cycles` cycles, feeding the wall
/// wrench (if any) into the next cycle.
pub fn run(pipeline: &mut Pipeline, plant: &mut dyn Plant, wall: Option<&WallModel>, cycles: u64) {
    let dt = pipeline.period();
    for _ in 0..cycles {
        let t = pipeline.next_time();
        let command = pipeline.step(t, plant).unwrap().to_vec();
        plant.step(&command, dt).unwrap();
        if let Some(w) = wall {
            let q = plant.state().joints.positions.clone();
            let pose = plant.forward_kinematics(&q);
            let v = plant.jacobian(&q) * &plant.state().joints.velocities;
            let twist = refchain_core::Twist::from_slice(v.as_slice());
            plant.set_contact_wrench(wall_wrench(w, &pose, &twist));
        }
    }
}
