//! Phase-space points in the lab frame and in the center-of-mass frame.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_n, jacobi_matrix, ModelParams};
use crate::linalg::{mat_t_vec, mat_vec};

/// Lab-frame point: positions `x` and conjugate momenta `p`, one per particle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhaseState {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if x.len() != p.len() {
            return Err(Error::InvalidInput(format!(
                "position/momentum length mismatch: {} vs {}",
                x.len(),
                p.len()
            )));
        }
        Ok(Self { x, p })
    }

    pub fn n_particles(&self) -> usize {
        self.x.len()
    }

    pub fn total_momentum(&self) -> f64 {
        self.p.iter().sum()
    }
}

/// Center-of-mass-frame point: Jacobi coordinates `y_1..y_{N-1}` and their
/// conjugate momenta.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedPhaseState {
    pub y: Vec<f64>,
    pub py: Vec<f64>,
}

impl ReducedPhaseState {
    pub fn new(y: Vec<f64>, py: Vec<f64>) -> Result<Self> {
        if y.len() != py.len() || y.is_empty() {
            return Err(Error::InvalidInput(format!(
                "reduced state needs equal non-empty lengths, got {} and {}",
                y.len(),
                py.len()
            )));
        }
        Ok(Self { y, py })
    }

    pub fn dim(&self) -> usize {
        self.y.len()
    }

    pub fn radius(&self) -> f64 {
        crate::linalg::norm(&self.y)
    }
}

/// Result of splitting off the center of mass.
#[derive(Debug, Clone, PartialEq)]
pub struct ComSplit {
    /// `Σx / √N`.
    pub y0: f64,
    /// Momentum conjugate to `y0`, i.e. `Σp / √N`. The kinetic energy of the
    /// center of mass is `p0² / 2`.
    pub p0: f64,
    pub reduced: ReducedPhaseState,
}

pub fn com_split(state: &PhaseState, params: &ModelParams) -> Result<ComSplit> {
    let n = params.n_particles;
    if state.x.len() != n || state.p.len() != n {
        return Err(Error::InvalidInput(format!(
            "state has {} positions and {} momenta, expected {n}",
            state.x.len(),
            state.p.len()
        )));
    }
    let a = jacobi_matrix(n)?;
    let y = mat_t_vec(&a, &state.x);
    let py = mat_t_vec(&a, &state.p);
    Ok(ComSplit {
        y0: y[0],
        p0: py[0],
        reduced: ReducedPhaseState {
            y: y[1..].to_vec(),
            py: py[1..].to_vec(),
        },
    })
}

/// Inverse of [`com_split`].
pub fn com_join(y0: f64, p0: f64, reduced: &ReducedPhaseState) -> Result<PhaseState> {
    let n = reduced.dim() + 1;
    check_n(n)?;
    if reduced.py.len() != reduced.dim() {
        return Err(Error::InvalidInput(
            "reduced momentum length mismatch".into(),
        ));
    }
    let a = jacobi_matrix(n)?;
    let mut y = Vec::with_capacity(n);
    y.push(y0);
    y.extend_from_slice(&reduced.y);
    let mut py = Vec::with_capacity(n);
    py.push(p0);
    py.extend_from_slice(&reduced.py);
    Ok(PhaseState {
        x: mat_vec(&a, &y),
        p: mat_vec(&a, &py),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_particles_at_same_point() {
        let params = ModelParams::new(2, 1.0).unwrap();
        let s = PhaseState::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        let split = com_split(&s, &params).unwrap();
        assert!((split.y0 - 2f64.sqrt()).abs() < 1e-15);
        assert!(split.reduced.y[0].abs() < 1e-15);
    }

    #[test]
    fn opposite_momenta_have_zero_com_momentum() {
        let params = ModelParams::new(2, 1.0).unwrap();
        let s = PhaseState::new(vec![0.3, -2.0], vec![1.0, -1.0]).unwrap();
        assert_eq!(com_split(&s, &params).unwrap().p0, 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let params = ModelParams::new(3, 1.0).unwrap();
        let s = PhaseState::new(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            com_split(&s, &params),
            Err(Error::InvalidInput(_))
        ));
        assert!(PhaseState::new(vec![0.0], vec![]).is_err());
        assert!(ReducedPhaseState::new(vec![], vec![]).is_err());
    }

    #[test]
    fn round_trip() {
        let params = ModelParams::new(5, 0.7).unwrap();
        let s = PhaseState::new(
            vec![0.1, -1.3, 2.2, 0.7, -0.4],
            vec![0.5, 0.25, -1.0, 3.0, 0.0],
        )
        .unwrap();
        let split = com_split(&s, &params).unwrap();
        let back = com_join(split.y0, split.p0, &split.reduced).unwrap();
        for k in 0..5 {
            assert!((back.x[k] - s.x[k]).abs() < 1e-12);
            assert!((back.p[k] - s.p[k]).abs() < 1e-12);
        }
    }
}
