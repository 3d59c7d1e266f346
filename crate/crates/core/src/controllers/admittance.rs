use nalgebra::{Vector3, Vector6};

use crate::chain::{layout, ChainableComponent, ComponentDescriptor, CycleContext, Params, RobotSnapshot};
use crate::error::Result;
use crate::math::{offset_pose, GainMatrix, Pose, Quat, Twist, Wrench};

#[derive(Debug, Clone, PartialEq)]
pub struct AdmittanceParams {
    pub mass: GainMatrix,
    pub damping: GainMatrix,
    pub stiffness: GainMatrix,
}

/// Task error `x_tilde = x_d - x_c` (position, then axis-angle) and its rate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AdmittanceState {
    pub error: Vector6<f64>,
    pub error_rate: Vector6<f64>,
}

/// One semi-implicit Euler step of
/// `M xdd + D xd + K x = h_d - h_e` on the task error, returning the
/// commanded pose `x_d - x_tilde`, the commanded twist `v_d - xd_tilde` and
/// the new state.
pub fn admittance_update(
    x_d: &Pose,
    v_d: &Twist,
    h_d: &Wrench,
    h_e: &Wrench,
    state: &AdmittanceState,
    params: &AdmittanceParams,
    dt: f64,
) -> (Pose, Twist, AdmittanceState) {
    let drive = h_d.to_vector() - h_e.to_vector();
    let mut next = *state;
    for i in 0..6 {
        let accel = (drive[i] - params.damping.get(i) * state.error_rate[i] - params.stiffness.get(i) * state.error[i])
            / params.mass.get(i);
        next.error_rate[i] += accel * dt;
        next.error[i] += next.error_rate[i] * dt;
    }

    let e = &next.error;
    let mut pose = Pose {
        position: x_d.position - Vector3::new(e[0], e[1], e[2]),
        orientation: x_d.orientation,
    };
    if e[3] != 0.0 || e[4] != 0.0 || e[5] != 0.0 {
        pose = offset_pose(x_d, &-e);
    }
    let r = &next.error_rate;
    let twist = Twist::new(
        v_d.linear - Vector3::new(r[0], r[1], r[2]),
        v_d.angular - Vector3::new(r[3], r[4], r[5]),
    );
    (pose, twist, next)
}

/// Admittance filter between a task-space reference and a pose controller.
/// The measured wrench comes from the robot snapshot.
#[derive(Debug)]
pub struct Admittance {
    params: AdmittanceParams,
    state: AdmittanceState,
    input: Vec<String>,
    output: Vec<String>,
}

impl Admittance {
    pub fn from_descriptor(d: &ComponentDescriptor, upstream: &str) -> Result<Self> {
        let p = Params::new(d);
        let mass = p.required_vector("mass", 6)?;
        let damping = p.vector_or("damping", 6, 0.0)?;
        let stiffness = p.vector_or("stiffness", 6, 0.0)?;
        p.check("mass", &mass, "> 0", |v| v > 0.0)?;
        p.check("damping", &damping, ">= 0", |v| v >= 0.0)?;
        p.check("stiffness", &stiffness, ">= 0", |v| v >= 0.0)?;
        p.finish()?;
        let mut input = layout::pose_channels(upstream);
        input.extend(layout::twist_channels(upstream));
        input.extend(layout::wrench_channels(upstream));
        let mut output = layout::pose_channels(&d.name);
        output.extend(layout::twist_channels(&d.name));
        Ok(Self {
            params: AdmittanceParams {
                mass: GainMatrix::new(mass.as_slice().to_vec())?,
                damping: GainMatrix::new(damping.as_slice().to_vec())?,
                stiffness: GainMatrix::new(stiffness.as_slice().to_vec())?,
            },
            state: AdmittanceState::default(),
            input,
            output,
        })
    }

    pub fn state(&self) -> &AdmittanceState {
        &self.state
    }
}

impl ChainableComponent for Admittance {
    fn input_layout(&self) -> &[String] {
        &self.input
    }

    fn output_layout(&self) -> &[String] {
        &self.output
    }

    fn on_activate(&mut self, _robot: &RobotSnapshot) {
        self.state = AdmittanceState::default();
    }

    fn update(&mut self, cx: &CycleContext<'_>, input: &[f64], output: &mut [f64]) -> Result<()> {
        let x_d = Pose {
            position: Vector3::new(input[0], input[1], input[2]),
            orientation: Quat::new(input[3], input[4], input[5], input[6]),
        };
        let v_d = Twist::from_slice(&input[7..13]);
        let h_d = Wrench::from_slice(&input[13..19]);
        let (pose, twist, state) =
            admittance_update(&x_d, &v_d, &h_d, &cx.robot.wrench, &self.state, &self.params, cx.dt);
        self.state = state;
        output[..7].copy_from_slice(&pose.to_array());
        output[7..13].copy_from_slice(twist.to_vector().as_slice());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Quat;

    fn params(m: f64, d: f64, k: f64) -> AdmittanceParams {
        AdmittanceParams {
            mass: GainMatrix::uniform(m, 6).unwrap(),
            damping: GainMatrix::uniform(d, 6).unwrap(),
            stiffness: GainMatrix::uniform(k, 6).unwrap(),
        }
    }

    fn desired() -> Pose {
        Pose::new(Vector3::new(0.5, 0.1, 0.4), Quat::from_axis_angle(&Vector3::new(1.0, 1.0, 0.0), 0.7))
    }

    #[test]
    fn unforced_rest_is_exact() {
        let x_d = desired();
        let mut state = AdmittanceState::default();
        for _ in 0..1000 {
            let (pose, twist, s) =
                admittance_update(&x_d, &Twist::zero(), &Wrench::zero(), &Wrench::zero(), &state, &params(2.0, 40.0, 500.0), 1e-3);
            assert_eq!(pose, x_d);
            assert_eq!(twist, Twist::zero());
            state = s;
        }
        assert_eq!(state, AdmittanceState::default());
    }

    #[test]
    fn steady_state_matches_spring_law() {
        let force = 12.0;
        let k = 500.0;
        let h_e = Wrench::new(Vector3::new(force, 0.0, 0.0), Vector3::zeros());
        let x_d = desired();
        let mut state = AdmittanceState::default();
        let mut pose = x_d;
        for _ in 0..20_000 {
            let out = admittance_update(&x_d, &Twist::zero(), &Wrench::zero(), &h_e, &state, &params(2.0, 80.0, k), 1e-3);
            pose = out.0;
            state = out.2;
        }
        // rest condition K x_tilde = -h_e
        assert!((state.error[0] + force / k).abs() < 1e-6);
        assert!((pose.position.x - (x_d.position.x + force / k)).abs() < 1e-6);
        assert!(state.error.rows(1, 5).amax() < 1e-12);
    }

    #[test]
    fn step_response_matches_analytic() {
        // m e'' + d e' + k e = -F, e(0) = e'(0) = 0, underdamped
        let (m, d, k, f): (f64, f64, f64, f64) = (1.0, 20.0, 400.0, 4.0);
        let dt = 1e-3;
        let wn = (k / m).sqrt();
        let zeta = d / (2.0 * (k * m).sqrt());
        let wd = wn * (1.0 - zeta * zeta).sqrt();
        let analytic = |t: f64| {
            let e_inf = -f / k;
            e_inf * (1.0 - (-zeta * wn * t).exp() * ((wd * t).cos() + zeta * wn / wd * (wd * t).sin()))
        };
        let h_e = Wrench::new(Vector3::new(0.0, f, 0.0), Vector3::zeros());
        let mut state = AdmittanceState::default();
        let mut worst: f64 = 0.0;
        for step in 1..=2000 {
            state = admittance_update(&desired(), &Twist::zero(), &Wrench::zero(), &h_e, &state, &params(m, d, k), dt).2;
            worst = worst.max((state.error[1] - analytic(step as f64 * dt)).abs());
        }
        assert!(worst < 1e-4, "max deviation {worst}");
    }

    #[test]
    fn torque_rotates_commanded_orientation() {
        let h_e = Wrench::new(Vector3::zeros(), Vector3::new(0.0, 0.0, 1.0));
        let state = AdmittanceState::default();
        let x_d = desired();
        let (pose, twist, s) = admittance_update(&x_d, &Twist::zero(), &Wrench::zero(), &h_e, &state, &params(1.0, 0.0, 0.0), 0.1);
        assert!(s.error[5] < 0.0);
        assert!(twist.angular.z > 0.0);
        let err = crate::math::pose_error(&pose, &x_d);
        assert!((err[5] + s.error[5]).abs() < 1e-12);
    }

    #[test]
    fn zero_mass_rejected() {
        let d = ComponentDescriptor::new("ac", "admittance").with_vector("mass", &[1.0, 1.0, 0.0, 1.0, 1.0, 1.0]);
        let err = Admittance::from_descriptor(&d, "trg").unwrap_err();
        assert!(err.to_string().contains("mass must be > 0"), "{err}");
    }
}
