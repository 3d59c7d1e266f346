use nalgebra::DVector;

use crate::chain::{layout, ChainableComponent, ComponentDescriptor, CycleContext, Params, RobotSnapshot};
use crate::error::Result;
use crate::math::GainMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct PidParams {
    pub kp: GainMatrix,
    pub kd: GainMatrix,
    pub ki: GainMatrix,
    /// Elementwise bound on the integral accumulator.
    pub i_clamp: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PidState {
    pub integral: DVector<f64>,
}

impl PidState {
    pub fn zeros(n: usize) -> Self {
        Self {
            integral: DVector::zeros(n),
        }
    }
}

/// `tau = Kp e + Kd edot + Ki int(e)`, with the integral accumulated by the
/// rectangle rule and clamped before use.
pub fn pid_update(
    q_d: &DVector<f64>,
    qdot_d: &DVector<f64>,
    q: &DVector<f64>,
    qdot: &DVector<f64>,
    state: &PidState,
    params: &PidParams,
    dt: f64,
) -> (DVector<f64>, PidState) {
    let e = q_d - q;
    let mut integral = &state.integral + &e * dt;
    for i in 0..integral.len() {
        let c = params.i_clamp[i];
        integral[i] = integral[i].clamp(-c, c);
    }
    let tau = params.kp.apply(&e) + params.kd.apply(&(qdot_d - qdot)) + params.ki.apply(&integral);
    (tau, PidState { integral })
}

/// Joint PID on position and velocity references from upstream.
#[derive(Debug)]
pub struct Pid {
    params: PidParams,
    state: PidState,
    dof: usize,
    input: Vec<String>,
    output: Vec<String>,
}

impl Pid {
    pub fn from_descriptor(d: &ComponentDescriptor, upstream: &str, dof: usize) -> Result<Self> {
        let p = Params::new(d);
        let kp = p.required_vector("kp", dof)?;
        let kd = p.vector_or("kd", dof, 0.0)?;
        let ki = p.vector_or("ki", dof, 0.0)?;
        let i_clamp = p.vector_or("i_clamp", dof, f64::INFINITY)?;
        p.check("kp", &kp, "> 0", |v| v > 0.0)?;
        p.check("kd", &kd, ">= 0", |v| v >= 0.0)?;
        p.check("ki", &ki, ">= 0", |v| v >= 0.0)?;
        p.check("i_clamp", &i_clamp, "> 0", |v| v > 0.0)?;
        p.finish()?;
        let mut input = layout::joint_channels(upstream, "position", dof);
        input.extend(layout::joint_channels(upstream, "velocity", dof));
        Ok(Self {
            params: PidParams {
                kp: GainMatrix::new(kp.as_slice().to_vec())?,
                kd: GainMatrix::new(kd.as_slice().to_vec())?,
                ki: GainMatrix::new(ki.as_slice().to_vec())?,
                i_clamp,
            },
            state: PidState::zeros(dof),
            dof,
            input,
            output: layout::joint_channels(&d.name, "effort", dof),
        })
    }

    pub fn params(&self) -> &PidParams {
        &self.params
    }

    pub fn state(&self) -> &PidState {
        &self.state
    }
}

impl ChainableComponent for Pid {
    fn input_layout(&self) -> &[String] {
        &self.input
    }

    fn output_layout(&self) -> &[String] {
        &self.output
    }

    fn on_activate(&mut self, _robot: &RobotSnapshot) {
        self.state = PidState::zeros(self.dof);
    }

    fn update(&mut self, cx: &CycleContext<'_>, input: &[f64], output: &mut [f64]) -> Result<()> {
        let n = self.dof;
        let q_d = DVector::from_column_slice(&input[..n]);
        let qdot_d = DVector::from_column_slice(&input[n..2 * n]);
        let j = &cx.robot.joints;
        let (tau, state) = pid_update(&q_d, &qdot_d, &j.positions, &j.velocities, &self.state, &self.params, cx.dt);
        self.state = state;
        output.copy_from_slice(tau.as_slice());
        Ok(())
    }
}
