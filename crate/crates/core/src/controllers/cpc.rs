use nalgebra::{DMatrix, DVector, Vector3};

use crate::chain::{layout, ChainableComponent, ComponentDescriptor, CycleContext, Params, RobotSnapshot};
use crate::error::Result;
use crate::math::{dls_pinv, pose_error, GainMatrix, Pose, Quat, Twist};

#[derive(Debug, Clone, PartialEq)]
pub struct CpcParams {
    pub kp: GainMatrix,
    pub dls_lambda: f64,
}

/// `qdot_c = J_dls (Kp e + v_d)` and `q_c = q_prev + qdot_c dt`.
pub fn cpc_update(
    x_d: &Pose,
    v_d: &Twist,
    q_prev_command: &DVector<f64>,
    jacobian: &DMatrix<f64>,
    x: &Pose,
    params: &CpcParams,
    dt: f64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let e = DVector::from_column_slice(pose_error(x_d, x).as_slice());
    let u = params.kp.apply(&e) + DVector::from_column_slice(v_d.to_vector().as_slice());
    let qdot = dls_pinv(jacobian, params.dls_lambda)? * u;
    let q = q_prev_command + &qdot * dt;
    Ok((qdot, q))
}

/// Cartesian pose controller producing joint position and velocity commands.
/// Integrates its own command, seeded from the measured joints on activation.
#[derive(Debug)]
pub struct Cpc {
    params: CpcParams,
    command: DVector<f64>,
    dof: usize,
    input: Vec<String>,
    output: Vec<String>,
}

impl Cpc {
    pub fn from_descriptor(d: &ComponentDescriptor, upstream: &str, dof: usize) -> Result<Self> {
        let p = Params::new(d);
        let kp = p.required_vector("kp", 6)?;
        let lambda = p.scalar_or("dls_lambda", 0.0)?;
        p.check("kp", &kp, "> 0", |v| v > 0.0)?;
        if lambda < 0.0 {
            return Err(p.error("dls_lambda", "dls_lambda must be >= 0"));
        }
        p.finish()?;
        let mut input = layout::pose_channels(upstream);
        input.extend(layout::twist_channels(upstream));
        let mut output = layout::joint_channels(&d.name, "position", dof);
        output.extend(layout::joint_channels(&d.name, "velocity", dof));
        Ok(Self {
            params: CpcParams {
                kp: GainMatrix::new(kp.as_slice().to_vec())?,
                dls_lambda: lambda,
            },
            command: DVector::zeros(dof),
            dof,
            input,
            output,
        })
    }
}

impl ChainableComponent for Cpc {
    fn input_layout(&self) -> &[String] {
        &self.input
    }

    fn output_layout(&self) -> &[String] {
        &self.output
    }

    fn on_activate(&mut self, robot: &RobotSnapshot) {
        self.command = robot.joints.positions.clone();
    }

    fn update(&mut self, cx: &CycleContext<'_>, input: &[f64], output: &mut [f64]) -> Result<()> {
        let x_d = Pose {
            position: Vector3::new(input[0], input[1], input[2]),
            orientation: Quat::new(input[3], input[4], input[5], input[6]),
        };
        let v_d = Twist::from_slice(&input[7..13]);
        let (qdot, q) = cpc_update(&x_d, &v_d, &self.command, &cx.robot.jacobian, &cx.robot.pose, &self.params, cx.dt)?;
        self.command = q;
        output[..self.dof].copy_from_slice(self.command.as_slice());
        output[self.dof..].copy_from_slice(qdot.as_slice());
        Ok(())
    }
}
