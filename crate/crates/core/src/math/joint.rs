use nalgebra::DVector;

use crate::error::{Error, Result};

/// Positions, velocities and efforts of an N-joint arm.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub positions: DVector<f64>,
    pub velocities: DVector<f64>,
    pub efforts: DVector<f64>,
}

impl JointState {
    pub fn new(
        positions: DVector<f64>,
        velocities: DVector<f64>,
        efforts: DVector<f64>,
    ) -> Result<Self> {
        let n = positions.len();
        if n == 0 {
            return Err(Error::InvalidInput("joint state needs at least one joint".into()));
        }
        if velocities.len() != n || efforts.len() != n {
            return Err(Error::InvalidInput(format!(
                "joint state length mismatch: {} positions, {} velocities, {} efforts",
                n,
                velocities.len(),
                efforts.len()
            )));
        }
        let state = Self {
            positions,
            velocities,
            efforts,
        };
        if !state.is_finite() {
            return Err(Error::InvalidInput("joint state is not finite".into()));
        }
        Ok(state)
    }

    /// Resting state at `positions`.
    pub fn at_rest(positions: DVector<f64>) -> Result<Self> {
        let n = positions.len();
        Self::new(positions, DVector::zeros(n), DVector::zeros(n))
    }

    pub fn dof(&self) -> usize {
        self.positions.len()
    }

    pub fn is_finite(&self) -> bool {
        self.positions
            .iter()
            .chain(self.velocities.iter())
            .chain(self.efforts.iter())
            .all(|v| v.is_finite())
    }
}

/// Diagonal gain matrix stored as its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix(DVector<f64>);

impl GainMatrix {
    pub fn new(diagonal: Vec<f64>) -> Result<Self> {
        if let Some(bad) = diagonal.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidInput(format!(
                "gain entry {bad} must be finite and >= 0"
            )));
        }
        Ok(Self(DVector::from_vec(diagonal)))
    }

    pub fn uniform(value: f64, dim: usize) -> Result<Self> {
        Self::new(vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn diagonal(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn is_positive_definite(&self) -> bool {
        self.0.iter().all(|v| *v > 0.0)
    }

    /// `diag(self) * v`
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        self.0.component_mul(v)
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joint_state_invariants() {
        assert!(JointState::at_rest(DVector::from_vec(vec![0.1, 0.2])).is_ok());
        assert!(JointState::at_rest(DVector::zeros(0)).is_err());
        assert!(JointState::new(DVector::zeros(2), DVector::zeros(3), DVector::zeros(2)).is_err());
        assert!(JointState::at_rest(DVector::from_vec(vec![f64::NAN])).is_err());
    }

    #[test]
    fn gains_reject_negative_and_nan() {
        assert!(GainMatrix::new(vec![1.0, -1.0]).is_err());
        assert!(GainMatrix::new(vec![f64::NAN]).is_err());
        let g = GainMatrix::new(vec![0.0, 2.0]).unwrap();
        assert!(!g.is_positive_definite());
        assert_eq!(
            g.apply(&DVector::from_vec(vec![3.0, 4.0])),
            DVector::from_vec(vec![0.0, 8.0])
        );
    }
}
