//! Planar N-link arm with point masses at the link tips.
//!
//! Joint `i` rotates about the plane normal; `phi_j = q_0 + ... + q_j` is the
//! absolute angle of link `j`, and gravity acts along `-y`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::kinematics::SerialChain;

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarArm {
    lengths: Vec<f64>,
    masses: Vec<f64>,
    friction: Vec<f64>,
    gravity: f64,
    gravity_enabled: bool,
}

impl PlanarArm {
    pub fn new(
        lengths: Vec<f64>,
        masses: Vec<f64>,
        friction: Vec<f64>,
        gravity: f64,
        gravity_enabled: bool,
    ) -> Result<Self> {
        let n = lengths.len();
        if n == 0 {
            return Err(Error::InvalidInput("planar arm needs at least one link".into()));
        }
        if masses.len() != n || friction.len() != n {
            return Err(Error::InvalidInput(format!(
                "planar arm: {n} lengths but {} masses and {} friction coefficients",
                masses.len(),
                friction.len()
            )));
        }
        if lengths.iter().chain(masses.iter()).any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidInput("link lengths and masses must be > 0".into()));
        }
        if friction.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidInput("friction coefficients must be >= 0".into()));
        }
        if !gravity.is_finite() {
            return Err(Error::InvalidInput("gravity must be finite".into()));
        }
        Ok(Self {
            lengths,
            masses,
            friction,
            gravity,
            gravity_enabled,
        })
    }

    pub fn dof(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn chain(&self) -> SerialChain {
        SerialChain::planar(&self.lengths)
    }

    fn absolute_angles(&self, q: &DVector<f64>) -> Vec<f64> {
        assert_eq!(q.len(), self.dof(), "joint vector length mismatch");
        q.iter()
            .scan(0.0, |acc, qi| {
                *acc += qi;
                Some(*acc)
            })
            .collect()
    }

    fn effective_gravity(&self) -> f64 {
        if self.gravity_enabled {
            self.gravity
        } else {
            0.0
        }
    }

    /// Mass-matrix `B(q)`.
    pub fn inertia(&self, q: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dof();
        let phi = self.absolute_angles(q);
        let l = &self.lengths;
        DMatrix::from_fn(n, n, |k, r| {
            let mut sum = 0.0;
            for i in k.max(r)..n {
                let mut inner = 0.0;
                for j in k..=i {
                    for jp in r..=i {
                        inner += l[j] * l[jp] * (phi[j] - phi[jp]).cos();
                    }
                }
                sum += self.masses[i] * inner;
            }
            sum
        })
    }

    /// Partial derivatives `dB/dq_s` for every joint `s`.
    fn inertia_derivatives(&self, q: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let n = self.dof();
        let phi = self.absolute_angles(q);
        let l = &self.lengths;
        let depends = |s: usize, j: usize| if s <= j { 1.0 } else { 0.0 };
        (0..n)
            .map(|s| {
                DMatrix::from_fn(n, n, |k, r| {
                    let mut sum = 0.0;
                    for i in k.max(r)..n {
                        let mut inner = 0.0;
                        for j in k..=i {
                            for jp in r..=i {
                                let d = depends(s, j) - depends(s, jp);
                                if d != 0.0 {
                                    inner -= l[j] * l[jp] * (phi[j] - phi[jp]).sin() * d;
                                }
                            }
                        }
                        sum += self.masses[i] * inner;
                    }
                    sum
                })
            })
            .collect()
    }

    /// Coriolis/centrifugal matrix from the Christoffel symbols of `B`.
    pub fn coriolis(&self, q: &DVector<f64>, qdot: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dof();
        let db = self.inertia_derivatives(q);
        DMatrix::from_fn(n, n, |k, j| {
            (0..n)
                .map(|s| 0.5 * (db[s][(k, j)] + db[j][(k, s)] - db[k][(s, j)]) * qdot[s])
                .sum()
        })
    }

    /// Gravity torque `g(q) = dP/dq`.
    pub fn gravity_vec(&self, q: &DVector<f64>) -> DVector<f64> {
        let n = self.dof();
        let g = self.effective_gravity();
        if g == 0.0 {
            return DVector::zeros(n);
        }
        let phi = self.absolute_angles(q);
        DVector::from_fn(n, |k, _| {
            (k..n)
                .map(|i| {
                    let arm: f64 = (k..=i).map(|j| self.lengths[j] * phi[j].cos()).sum();
                    self.masses[i] * g * arm
                })
                .sum()
        })
    }

    /// Viscous friction `f(qdot) = diag(c) qdot`.
    pub fn friction(&self, qdot: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.dof(), |i, _| self.friction[i] * qdot[i])
    }

    pub fn potential_energy(&self, q: &DVector<f64>) -> f64 {
        let g = self.effective_gravity();
        let phi = self.absolute_angles(q);
        let mut y = 0.0;
        let mut energy = 0.0;
        for i in 0..self.dof() {
            y += self.lengths[i] * phi[i].sin();
            energy += self.masses[i] * g * y;
        }
        energy
    }

    pub fn kinetic_energy(&self, q: &DVector<f64>, qdot: &DVector<f64>) -> f64 {
        0.5 * qdot.dot(&(self.inertia(q) * qdot))
    }

    /// `qddot = B^-1 (tau - C qdot - f - g)`, or `None` once the state has
    /// gone non-finite and the inertia matrix no longer factors.
    pub fn forward_dynamics(
        &self,
        q: &DVector<f64>,
        qdot: &DVector<f64>,
        tau: &DVector<f64>,
    ) -> Option<DVector<f64>> {
        let rhs = tau - self.coriolis(q, qdot) * qdot - self.friction(qdot) - self.gravity_vec(q);
        let qddot = self.inertia(q).cholesky()?.solve(&rhs);
        qddot.iter().all(|x| x.is_finite()).then_some(qddot)
    }

    /// `tau = B qddot + C qdot + f + g`.
    pub fn inverse_dynamics(
        &self,
        q: &DVector<f64>,
        qdot: &DVector<f64>,
        qddot: &DVector<f64>,
    ) -> DVector<f64> {
        self.inertia(q) * qddot
            + self.coriolis(q, qdot) * qdot
            + self.friction(qdot)
            + self.gravity_vec(q)
    }
}
