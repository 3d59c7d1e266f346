use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::math::{Pose, Wrench};

use super::{CommandInterface, PlanarArm, Plant, PlantState, SerialChain};

/// Torque-commanded planar arm integrated with classic RK4 under a
/// zero-order-hold torque.
#[derive(Debug, Clone)]
pub struct DynamicPlant {
    model: PlanarArm,
    chain: SerialChain,
    state: PlantState,
    disturbance: DVector<f64>,
    steps: u64,
}

impl DynamicPlant {
    pub fn new(model: PlanarArm, initial_positions: DVector<f64>) -> Result<Self> {
        if initial_positions.len() != model.dof() {
            return Err(Error::InvalidInput(format!(
                "initial positions have {} entries for a {}-joint arm",
                initial_positions.len(),
                model.dof()
            )));
        }
        let n = model.dof();
        Ok(Self {
            chain: model.chain(),
            state: PlantState::at_rest(initial_positions)?,
            model,
            disturbance: DVector::zeros(n),
            steps: 0,
        })
    }

    /// Constant joint torque added to every command.
    pub fn with_disturbance(mut self, disturbance: DVector<f64>) -> Result<Self> {
        if disturbance.len() != self.model.dof() || disturbance.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("disturbance must be a finite N-vector".into()));
        }
        self.disturbance = disturbance;
        Ok(self)
    }

    pub fn model(&self) -> &PlanarArm {
        &self.model
    }

    pub fn set_velocities(&mut self, qdot: DVector<f64>) {
        self.state.joints.velocities = qdot;
    }

    /// Total mechanical energy `1/2 qdot^T B qdot + P(q)`.
    pub fn energy(&self) -> f64 {
        let j = &self.state.joints;
        self.model.kinetic_energy(&j.positions, &j.velocities)
            + self.model.potential_energy(&j.positions)
    }

    fn rk4(&self, tau: &DVector<f64>, dt: f64) -> Option<(DVector<f64>, DVector<f64>)> {
        let q = &self.state.joints.positions;
        let v = &self.state.joints.velocities;
        let accel = |q: &DVector<f64>, v: &DVector<f64>| self.model.forward_dynamics(q, v, tau);

        let k1q = v.clone();
        let k1v = accel(q, v)?;
        let q2 = q + &k1q * (0.5 * dt);
        let v2 = v + &k1v * (0.5 * dt);
        let k2q = v2.clone();
        let k2v = accel(&q2, &v2)?;
        let q3 = q + &k2q * (0.5 * dt);
        let v3 = v + &k2v * (0.5 * dt);
        let k3q = v3.clone();
        let k3v = accel(&q3, &v3)?;
        let q4 = q + &k3q * dt;
        let v4 = v + &k3v * dt;
        let k4v = accel(&q4, &v4)?;
        let k4q = v4;

        let q_next = q + (k1q + k2q * 2.0 + k3q * 2.0 + k4q) * (dt / 6.0);
        let v_next = v + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (dt / 6.0);
        Some((q_next, v_next))
    }
}

impl Plant for DynamicPlant {
    fn dof(&self) -> usize {
        self.model.dof()
    }

    fn command_interface(&self) -> CommandInterface {
        CommandInterface::Effort
    }

    fn state(&self) -> &PlantState {
        &self.state
    }

    fn forward_kinematics(&self, q: &DVector<f64>) -> Pose {
        self.chain.forward_kinematics(q)
    }

    fn jacobian(&self, q: &DVector<f64>) -> DMatrix<f64> {
        self.chain.jacobian(q)
    }

    fn gravity(&self, q: &DVector<f64>) -> DVector<f64> {
        self.model.gravity_vec(q)
    }

    fn step(&mut self, command: &[f64], dt: f64) -> Result<()> {
        if command.len() != self.dof() || command.iter().any(|v| !v.is_finite()) {
            return Err(Error::FaultStop {
                cycle: self.steps,
                component: "plant".into(),
                reason: "effort command is not a finite N-vector".into(),
            });
        }
        let applied = DVector::from_column_slice(command);
        let tau = &applied + &self.disturbance;
        let Some((q, v)) = self.rk4(&tau, dt).filter(|(q, v)| q.iter().chain(v.iter()).all(|x| x.is_finite())) else {
            return Err(Error::FaultStop {
                cycle: self.steps,
                component: "plant".into(),
                reason: "integration diverged to a non-finite state".into(),
            });
        };
        self.state.joints.positions = q;
        self.state.joints.velocities = v;
        self.state.joints.efforts = applied;
        self.state.time += dt;
        self.steps += 1;
        Ok(())
    }

    fn set_contact_wrench(&mut self, wrench: Wrench) {
        self.state.wrench = wrench;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::planar::tests::three_link;

    fn run(plant: &mut DynamicPlant, tau: &[f64], dt: f64, duration: f64) {
        let steps = (duration / dt).round() as usize;
        for _ in 0..steps {
            plant.step(tau, dt).unwrap();
        }
    }

    #[test]
    fn gravity_torque_holds_pose() {
        let arm = three_link(true);
        let q = DVector::from_vec(vec![0.4, -0.2, 0.7]);
        let tau: Vec<f64> = arm.gravity_vec(&q).iter().copied().collect();
        let mut p = DynamicPlant::new(arm, q.clone()).unwrap();
        p.step(&tau, 1e-3).unwrap();
        assert!((&p.state().joints.positions - &q).amax() < 1e-12);
        assert!(p.state().joints.velocities.amax() < 1e-12);
    }

    #[test]
    fn single_joint_constant_torque_closed_form() {
        // one link, point mass: B = m l^2
        let arm = PlanarArm::new(vec![0.8], vec![1.5], vec![0.0], 9.81, false).unwrap();
        let inertia = 1.5 * 0.8 * 0.8;
        let tau = 0.7;
        let mut p = DynamicPlant::new(arm, DVector::zeros(1)).unwrap();
        run(&mut p, &[tau], 1e-3, 1.0);
        let t = p.state().time;
        assert!((p.state().joints.velocities[0] - tau * t / inertia).abs() < 1e-9);
        assert!((p.state().joints.positions[0] - 0.5 * tau * t * t / inertia).abs() < 1e-9);
    }

    #[test]
    fn conservative_energy_drift() {
        let arm = PlanarArm::new(vec![0.5, 0.4, 0.3], vec![2.0, 1.5, 1.0], vec![0.0; 3], 9.81, false)
            .unwrap();
        let mut p = DynamicPlant::new(arm, DVector::from_vec(vec![0.2, 0.5, -0.4])).unwrap();
        p.set_velocities(DVector::from_vec(vec![1.0, -2.0, 1.5]));
        let e0 = p.energy();
        run(&mut p, &[0.0; 3], 1e-3, 1.0);
        let drift = ((p.energy() - e0) / e0).abs();
        assert!(drift < 1e-6, "relative energy drift {drift}");
    }

    #[test]
    fn divergence_is_a_fault_not_a_panic() {
        let mut p = DynamicPlant::new(three_link(true), DVector::zeros(3)).unwrap();
        p.set_velocities(DVector::from_element(3, 1e300));
        let err = p.step(&[1e300; 3], 1.0).unwrap_err();
        assert!(matches!(err, Error::FaultStop { cycle: 0, .. }), "{err}");
        // state is left as it was
        assert_eq!(p.state().joints.positions, DVector::zeros(3));
    }

    #[test]
    fn rk4_observed_order() {
        let endpoint = |dt: f64| {
            let mut p = DynamicPlant::new(three_link(true), DVector::from_vec(vec![0.3, 0.2, -0.4]))
                .unwrap();
            p.set_velocities(DVector::from_vec(vec![0.5, -1.0, 0.8]));
            run(&mut p, &[5.0, -2.0, 1.0], dt, 1.0);
            let j = &p.state().joints;
            DVector::from_iterator(6, j.positions.iter().chain(j.velocities.iter()).copied())
        };
        let coarse = endpoint(0.02);
        let mid = endpoint(0.01);
        let fine = endpoint(0.005);
        let order = ((&coarse - &mid).norm() / (&mid - &fine).norm()).log2();
        assert!(order >= 3.5, "observed order {order}");
    }

    #[test]
    fn non_finite_torque_faults() {
        let mut p = DynamicPlant::new(three_link(true), DVector::zeros(3)).unwrap();
        assert!(matches!(
            p.step(&[0.0, f64::NAN, 0.0], 1e-3),
            Err(Error::FaultStop { .. })
        ));
    }
}
