//! Canonical polar (three particles) and spherical (four particles) charts on
//! the center-of-mass phase space.
//!
//! In each chart `H̃ = p_r²/2 + I/r²`, with `I` the angular Hamiltonian in the
//! chart's closed form.

use std::f64::consts::FRAC_PI_6;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{orthogonal_frame, root_system, Frame3};
use crate::linalg::{cross, dot, norm, Vec3};
use crate::state::ReducedPhaseState;

/// Rotation taking the Jacobi-frame root angles `{-π/6, π/6, π/2}` to the
/// chart angles `{0, π/3, 2π/3}`.
pub const N3_CHART_ROTATION: f64 = FRAC_PI_6;

pub const POLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarState {
    pub r: f64,
    pub phi: f64,
    pub p_r: f64,
    pub p_phi: f64,
}

impl PolarState {
    /// `[r, φ, p_r, p_φ]` in the bracket engine's `[q.., p..]` layout.
    pub fn to_phase_point(&self) -> [f64; 4] {
        [self.r, self.phi, self.p_r, self.p_phi]
    }

    pub fn from_phase_point(z: &[f64]) -> Self {
        Self {
            r: z[0],
            phi: z[1],
            p_r: z[2],
            p_phi: z[3],
        }
    }
}

fn require_dim(state: &ReducedPhaseState, dim: usize) -> Result<()> {
    if state.y.len() != dim || state.py.len() != dim {
        return Err(Error::InvalidInput(format!(
            "chart needs a {dim}-dimensional reduced state, got {}",
            state.y.len()
        )));
    }
    Ok(())
}

pub fn polar_from_reduced(state: &ReducedPhaseState) -> Result<PolarState> {
    require_dim(state, 2)?;
    let (y, p) = (&state.y, &state.py);
    let r = norm(y);
    if r == 0.0 {
        return Err(Error::InvalidInput("polar chart undefined at y = 0".into()));
    }
    Ok(PolarState {
        r,
        phi: y[1].atan2(y[0]) + N3_CHART_ROTATION,
        p_r: dot(y, p) / r,
        p_phi: y[0] * p[1] - y[1] * p[0],
    })
}

pub fn reduced_from_polar(state: &PolarState) -> Result<ReducedPhaseState> {
    if state.r.is_nan() || state.r <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "r must be > 0, got {}",
            state.r
        )));
    }
    let (s, c) = (state.phi - N3_CHART_ROTATION).sin_cos();
    let pt = state.p_phi / state.r;
    Ok(ReducedPhaseState {
        y: vec![state.r * c, state.r * s],
        py: vec![state.p_r * c - pt * s, state.p_r * s + pt * c],
    })
}

/// Orientation of a four-particle spherical chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// Axis 1 along `b^{13}`, axis 2 in the `b^{12}`, `b^{13}` plane, axis 3
    /// completing a right-handed frame. The polar axis is a three-fold axis.
    B13Aligned,
    /// Axes `a_1`, `a_2`, `a_3`, the normals to the square faces.
    AFrame,
}

/// Orthonormal basis for `chart`, expressed in Jacobi coordinates.
pub fn chart_basis(chart: Chart) -> Frame3 {
    let rs = root_system(4).expect("N = 4 is valid");
    match chart {
        Chart::AFrame => orthogonal_frame(&rs).expect("N = 4 root system"),
        Chart::B13Aligned => {
            let b12 = rs.vector((1, 2)).expect("pair exists");
            let b13 = rs.vector((1, 3)).expect("pair exists");
            let e1: Vec3 = [b13[0], b13[1], b13[2]];
            let along = dot(b12, b13);
            let raw = [
                b12[0] - along * e1[0],
                b12[1] - along * e1[1],
                b12[2] - along * e1[2],
            ];
            let len = norm(&raw);
            let e2 = [raw[0] / len, raw[1] / len, raw[2] / len];
            Frame3 {
                axes: [e1, e2, cross(&e1, &e2)],
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalState {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub p_r: f64,
    pub p_theta: f64,
    pub p_phi: f64,
    pub chart: Chart,
}

impl SphericalState {
    pub fn to_phase_point(&self) -> [f64; 6] {
        [
            self.r,
            self.theta,
            self.phi,
            self.p_r,
            self.p_theta,
            self.p_phi,
        ]
    }

    pub fn from_phase_point(z: &[f64], chart: Chart) -> Self {
        Self {
            r: z[0],
            theta: z[1],
            phi: z[2],
            p_r: z[3],
            p_theta: z[4],
            p_phi: z[5],
            chart,
        }
    }
}

/// Unit radial vector and the two (unnormalized) tangent derivatives
/// `∂n/∂θ`, `∂n/∂φ`, all in chart components.
fn sphere_frame(theta: f64, phi: f64) -> (Vec3, Vec3, Vec3) {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    (
        [st * cp, st * sp, ct],
        [ct * cp, ct * sp, -st],
        [-st * sp, st * cp, 0.0],
    )
}

pub fn spherical_from_reduced(state: &ReducedPhaseState, chart: Chart) -> Result<SphericalState> {
    require_dim(state, 3)?;
    let basis = chart_basis(chart);
    let y = basis.to_frame(&state.y);
    let p = basis.to_frame(&state.py);
    let r = norm(&y);
    if r == 0.0 {
        return Err(Error::InvalidInput(
            "spherical chart undefined at y = 0".into(),
        ));
    }
    let rho = y[0].hypot(y[1]);
    if rho / r < POLE_TOL {
        return Err(Error::ChartSingularity(format!(
            "sin θ = {:e} below pole tolerance",
            rho / r
        )));
    }
    let theta = rho.atan2(y[2]);
    let phi = y[1].atan2(y[0]);
    let (n, dn_theta, dn_phi) = sphere_frame(theta, phi);
    Ok(SphericalState {
        r,
        theta,
        phi,
        p_r: dot(&n, &p),
        p_theta: r * dot(&dn_theta, &p),
        p_phi: r * dot(&dn_phi, &p),
        chart,
    })
}

pub fn reduced_from_spherical(state: &SphericalState) -> Result<ReducedPhaseState> {
    if state.r.is_nan() || state.r <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "r must be > 0, got {}",
            state.r
        )));
    }
    if !(state.theta > 0.0 && state.theta < std::f64::consts::PI) {
        return Err(Error::InvalidInput(format!(
            "θ = {} outside (0, π)",
            state.theta
        )));
    }
    let st = state.theta.sin();
    if st < POLE_TOL {
        return Err(Error::ChartSingularity(format!("sin θ = {st:e}")));
    }
    let (n, dn_theta, dn_phi) = sphere_frame(state.theta, state.phi);
    let a = state.p_theta / state.r;
    let b = state.p_phi / (state.r * st * st);
    let mut y = [0.0; 3];
    let mut p = [0.0; 3];
    for k in 0..3 {
        y[k] = state.r * n[k];
        p[k] = state.p_r * n[k] + a * dn_theta[k] + b * dn_phi[k];
    }
    let basis = chart_basis(state.chart);
    Ok(ReducedPhaseState {
        y: basis.from_frame(&y).to_vec(),
        py: basis.from_frame(&p).to_vec(),
    })
}

/// Splits a reduced state into `(n̂, r·p_t)`: the unit direction and the
/// tangential momentum scaled to the unit sphere. `|r·p_t|²/2` is the kinetic
/// part of `I`.
pub fn sphere_projection(state: &ReducedPhaseState) -> Result<(Vec<f64>, Vec<f64>)> {
    let r = norm(&state.y);
    if r == 0.0 {
        return Err(Error::InvalidInput("direction undefined at y = 0".into()));
    }
    let n: Vec<f64> = state.y.iter().map(|v| v / r).collect();
    let pr = dot(&n, &state.py);
    let t = state
        .py
        .iter()
        .zip(&n)
        .map(|(p, nk)| r * (p - pr * nk))
        .collect();
    Ok((n, t))
}
