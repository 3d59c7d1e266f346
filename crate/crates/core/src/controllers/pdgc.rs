use nalgebra::DVector;

use crate::chain::{layout, ChainableComponent, ComponentDescriptor, CycleContext, Params, RobotSnapshot};
use crate::error::Result;
use crate::math::GainMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct PdgcParams {
    pub kp: GainMatrix,
    pub kd: GainMatrix,
}

/// `tau = Kp (q_d - q) - Kd qdot + g(q)`
pub fn pdgc_update(
    q_d: &DVector<f64>,
    q: &DVector<f64>,
    qdot: &DVector<f64>,
    params: &PdgcParams,
    gravity: &DVector<f64>,
) -> DVector<f64> {
    params.kp.apply(&(q_d - q)) - params.kd.apply(qdot) + gravity
}

/// PD control with gravity compensation on joint positions from upstream.
#[derive(Debug)]
pub struct Pdgc {
    params: PdgcParams,
    input: Vec<String>,
    output: Vec<String>,
}

impl Pdgc {
    pub fn from_descriptor(d: &ComponentDescriptor, upstream: &str, dof: usize) -> Result<Self> {
        let p = Params::new(d);
        let kp = p.required_vector("kp", dof)?;
        let kd = p.required_vector("kd", dof)?;
        p.check("kp", &kp, "> 0", |v| v > 0.0)?;
        p.check("kd", &kd, "> 0", |v| v > 0.0)?;
        p.finish()?;
        Ok(Self {
            params: PdgcParams {
                kp: GainMatrix::new(kp.as_slice().to_vec())?,
                kd: GainMatrix::new(kd.as_slice().to_vec())?,
            },
            input: layout::joint_channels(upstream, "position", dof),
            output: layout::joint_channels(&d.name, "effort", dof),
        })
    }

    pub fn params(&self) -> &PdgcParams {
        &self.params
    }
}

impl ChainableComponent for Pdgc {
    fn input_layout(&self) -> &[String] {
        &self.input
    }

    fn output_layout(&self) -> &[String] {
        &self.output
    }

    fn on_activate(&mut self, _robot: &RobotSnapshot) {}

    fn update(&mut self, cx: &CycleContext<'_>, input: &[f64], output: &mut [f64]) -> Result<()> {
        let j = &cx.robot.joints;
        let q_d = DVector::from_column_slice(input);
        let tau = pdgc_update(&q_d, &j.positions, &j.velocities, &self.params, &cx.robot.gravity);
        output.copy_from_slice(tau.as_slice());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gains(kp: f64, kd: f64, n: usize) -> PdgcParams {
        PdgcParams {
            kp: GainMatrix::uniform(kp, n).unwrap(),
            kd: GainMatrix::uniform(kd, n).unwrap(),
        }
    }

    #[test]
    fn zero_error_gives_gravity() {
        let q = DVector::from_vec(vec![0.3, -0.2, 0.1]);
        let g = DVector::from_vec(vec![5.0, 2.0, -1.0]);
        let tau = pdgc_update(&q, &q, &DVector::zeros(3), &gains(100.0, 20.0, 3), &g);
        assert_eq!(tau, g);
    }

    #[test]
    fn pure_proportional() {
        let q_d = DVector::from_element(3, 0.1);
        let tau = pdgc_update(&q_d, &DVector::zeros(3), &DVector::zeros(3), &gains(10.0, 0.0, 3), &DVector::zeros(3));
        assert!((tau - DVector::from_element(3, 1.0)).amax() < 1e-15);
    }

    #[test]
    fn matches_direct_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = 4;
            let mut draw = || DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
            let (q_d, q, qdot, g) = (draw(), draw(), draw(), draw());
            let kp: Vec<f64> = (0..n).map(|i| 10.0 + i as f64).collect();
            let kd: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * i as f64).collect();
            let params = PdgcParams {
                kp: GainMatrix::new(kp.clone()).unwrap(),
                kd: GainMatrix::new(kd.clone()).unwrap(),
            };
            let tau = pdgc_update(&q_d, &q, &qdot, &params, &g);
            for i in 0..n {
                let oracle = kp[i] * (q_d[i] - q[i]) - kd[i] * qdot[i] + g[i];
                assert!((tau[i] - oracle).abs() <= 1e-15 * oracle.abs().max(1.0));
            }
        }
    }
}
