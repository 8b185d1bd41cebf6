//! Energy functions from the lab-frame Hamiltonian down to the angular part
//! on the unit sphere. The closed angular forms for three and four particles
//! live here too.
//!
//! Every potential raises [`Error::Singular`] on the collision set instead of
//! returning an infinity.

use std::f64::consts::{FRAC_PI_3, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ModelParams, RootSystem};
use crate::linalg::{dot, norm};
use crate::state::{PhaseState, ReducedPhaseState};

/// Relative size of `b·y` (with respect to `|y|`) below which a configuration
/// counts as a collision.
pub const SINGULAR_REL_TOL: f64 = 1e-12;

/// Tolerance on `|n̂| = 1` and `n̂·p = 0` for the angular energy.
pub const SPHERE_TOL: f64 = 1e-10;

/// Poles closer than this (in `sin θ`) are rejected by the spherical forms.
pub const POLE_TOL: f64 = 1e-12;

fn kinetic(p: &[f64]) -> f64 {
    0.5 * dot(p, p)
}

/// `½Σp² + Σ_{i<j} g/(x_i - x_j)²`.
pub fn energy_full(state: &PhaseState, params: &ModelParams) -> Result<f64> {
    if state.n_particles() != params.n_particles {
        return Err(Error::InvalidInput(format!(
            "state has {} particles, params say {}",
            state.n_particles(),
            params.n_particles
        )));
    }
    Ok(kinetic(&state.p) + potential_full(&state.x, params.coupling)?)
}

pub fn potential_full(x: &[f64], g: f64) -> Result<f64> {
    if g == 0.0 {
        return Ok(0.0);
    }
    let scale = norm(x);
    let mut v = 0.0;
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            let d = x[i] - x[j];
            if d.abs() <= SINGULAR_REL_TOL * scale {
                return Err(Error::singular_pair(
                    (i + 1, j + 1),
                    format!("x_{} = x_{}", i + 1, j + 1),
                ));
            }
            v += g / (d * d);
        }
    }
    Ok(v)
}

/// `∂V/∂x` for the lab-frame potential.
pub fn potential_full_gradient(x: &[f64], g: f64) -> Result<Vec<f64>> {
    if g == 0.0 {
        return Ok(vec![0.0; x.len()]);
    }
    let scale = norm(x);
    let mut grad = vec![0.0; x.len()];
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            let d = x[i] - x[j];
            if d.abs() <= SINGULAR_REL_TOL * scale {
                return Err(Error::singular_pair((i + 1, j + 1), "coincident particles"));
            }
            let c = -2.0 * g / (d * d * d);
            grad[i] += c;
            grad[j] -= c;
        }
    }
    Ok(grad)
}

fn check_reduced_dim(y: &[f64], rs: &RootSystem) -> Result<()> {
    if y.len() != rs.dim() {
        return Err(Error::InvalidInput(format!(
            "reduced state has dimension {}, root system needs {}",
            y.len(),
            rs.dim()
        )));
    }
    Ok(())
}

/// Projections `b^a·y`, failing on the first root whose hyperplane `y` lies on.
pub(crate) fn guarded_projections(y: &[f64], rs: &RootSystem, rel_tol: f64) -> Result<Vec<f64>> {
    check_reduced_dim(y, rs)?;
    let scale = norm(y);
    let proj = rs.projections(y);
    for (e, &c) in rs.iter().zip(&proj) {
        if c.abs() <= rel_tol * scale {
            return Err(Error::singular_pair(e.pair, format!("b·y = {c:e}")));
        }
    }
    Ok(proj)
}

/// `Σ_a g / (2 (b^a·y)²)`.
pub fn potential_reduced(y: &[f64], rs: &RootSystem, g: f64) -> Result<f64> {
    if g == 0.0 {
        check_reduced_dim(y, rs)?;
        return Ok(0.0);
    }
    let proj = guarded_projections(y, rs, SINGULAR_REL_TOL)?;
    Ok(proj.iter().map(|c| 0.5 * g / (c * c)).sum())
}

/// `∂V/∂y = -Σ_a g b^a / (b^a·y)³`.
pub fn potential_reduced_gradient(y: &[f64], rs: &RootSystem, g: f64) -> Result<Vec<f64>> {
    if g == 0.0 {
        check_reduced_dim(y, rs)?;
        return Ok(vec![0.0; y.len()]);
    }
    let proj = guarded_projections(y, rs, SINGULAR_REL_TOL)?;
    let mut grad = vec![0.0; y.len()];
    for (e, c) in rs.iter().zip(proj) {
        let w = -g / (c * c * c);
        for (gk, bk) in grad.iter_mut().zip(&e.vector) {
            *gk += w * bk;
        }
    }
    Ok(grad)
}

/// Center-of-mass Hamiltonian `H̃ = ½Σp² + Σ_a g/(2(b^a·y)²)`.
pub fn energy_reduced(state: &ReducedPhaseState, rs: &RootSystem, g: f64) -> Result<f64> {
    Ok(kinetic(&state.py) + potential_reduced(&state.y, rs, g)?)
}

/// Force-center potential on the unit sphere, `Σ_a g/(2 cos²θ_a)`.
pub fn angular_potential(n_hat: &[f64], rs: &RootSystem, g: f64) -> Result<f64> {
    let proj = guarded_projections(n_hat, rs, SINGULAR_REL_TOL)?;
    Ok(proj.iter().map(|c| 0.5 * g / (c * c)).sum())
}

/// Angular Hamiltonian `I = ½|p_t|² + Σ_a g/(2 cos²θ_a)` at a point `n̂` of the
/// unit sphere with tangential momentum `p_t`.
pub fn angular_energy_general(
    n_hat: &[f64],
    tangent_p: &[f64],
    rs: &RootSystem,
    g: f64,
) -> Result<f64> {
    if tangent_p.len() != n_hat.len() {
        return Err(Error::InvalidInput(
            "n_hat / tangent_p length mismatch".into(),
        ));
    }
    let len = norm(n_hat);
    if (len - 1.0).abs() > SPHERE_TOL {
        return Err(Error::InvalidInput(format!(
            "n_hat has norm {len}, expected 1"
        )));
    }
    let radial = dot(n_hat, tangent_p);
    if radial.abs() > SPHERE_TOL * norm(tangent_p).max(1.0) {
        return Err(Error::InvalidInput(format!(
            "tangent_p has radial component {radial:e}"
        )));
    }
    Ok(kinetic(tangent_p) + angular_potential(n_hat, rs, g)?)
}

/// The angular Hamiltonian evaluated directly from a reduced Cartesian state,
/// `I = (r²|p|² - (y·p)²)/2 + r² V(y)`. Equal to `r²(H̃ - p_r²/2)`.
pub fn angular_energy_cartesian(state: &ReducedPhaseState, rs: &RootSystem, g: f64) -> Result<f64> {
    let r2 = dot(&state.y, &state.y);
    let yp = dot(&state.y, &state.py);
    let pp = dot(&state.py, &state.py);
    Ok(0.5 * (r2 * pp - yp * yp) + r2 * potential_reduced(&state.y, rs, g)?)
}

/// Gradient of [`angular_energy_cartesian`] as `(∂I/∂y, ∂I/∂p)`.
pub fn angular_energy_cartesian_gradient(
    state: &ReducedPhaseState,
    rs: &RootSystem,
    g: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (y, p) = (&state.y, &state.py);
    let r2 = dot(y, y);
    let yp = dot(y, p);
    let pp = dot(p, p);
    let v = potential_reduced(y, rs, g)?;
    let dv = potential_reduced_gradient(y, rs, g)?;
    let dy = (0..y.len())
        .map(|k| pp * y[k] - yp * p[k] + 2.0 * v * y[k] + r2 * dv[k])
        .collect();
    let dp = (0..y.len()).map(|k| r2 * p[k] - yp * y[k]).collect();
    Ok((dy, dp))
}

/// Three-particle angular potential `9g/(1 + cos 6φ)`.
///
/// `1 + cos 6φ = 2cos²3φ`; the right-hand side is used so the value stays
/// accurate next to the walls. Without coupling the potential vanishes
/// everywhere, walls included.
pub fn potential_n3(phi: f64, g: f64) -> Result<f64> {
    if g == 0.0 {
        return Ok(0.0);
    }
    let c3 = (3.0 * phi).cos();
    if c3.abs() < SINGULAR_REL_TOL {
        return Err(Error::singular(format!("1 + cos 6φ = 0 at φ = {phi}")));
    }
    Ok(9.0 * g / (2.0 * c3 * c3))
}

/// `d/dφ [9g/(1 + cos 6φ)] = 54 g sin 6φ / (1 + cos 6φ)²`.
pub fn potential_n3_derivative(phi: f64, g: f64) -> Result<f64> {
    if g == 0.0 {
        return Ok(0.0);
    }
    let c3 = (3.0 * phi).cos();
    if c3.abs() < SINGULAR_REL_TOL {
        return Err(Error::singular(format!("1 + cos 6φ = 0 at φ = {phi}")));
    }
    let den = 2.0 * c3 * c3;
    Ok(54.0 * g * (6.0 * phi).sin() / (den * den))
}

/// `p_φ²/2 + 9g/(1 + cos 6φ)`.
pub fn angular_closed_n3(phi: f64, p_phi: f64, g: f64) -> Result<f64> {
    let value = 0.5 * p_phi * p_phi + potential_n3(phi, g)?;
    #[cfg(debug_assertions)]
    if let Ok(three) = angular_three_center_n3(phi, p_phi, g) {
        debug_assert!(
            (three - value).abs() <= 1e-10 * value.abs().max(1.0),
            "three-center and cos 6φ forms disagree at φ = {phi}: {three} vs {value}"
        );
    }
    Ok(value)
}

/// `p_φ²/2 + g/(2cos²φ) + g/(2cos²(φ+π/3)) + g/(2cos²(φ-π/3))`.
pub fn angular_three_center_n3(phi: f64, p_phi: f64, g: f64) -> Result<f64> {
    let mut v = 0.5 * p_phi * p_phi;
    for shift in [0.0, FRAC_PI_3, -FRAC_PI_3] {
        let c = (phi + shift).cos();
        if c.abs() < SINGULAR_REL_TOL {
            return Err(Error::singular(format!("cos(φ + {shift}) = 0")));
        }
        v += 0.5 * g / (c * c);
    }
    Ok(v)
}

fn sin_checked(theta: f64) -> Result<f64> {
    let s = theta.sin();
    if s.abs() < POLE_TOL {
        return Err(Error::ChartSingularity(format!(
            "sin θ = {s:e} at the pole"
        )));
    }
    Ok(s)
}

/// Standard kinetic term of a particle on the unit 2-sphere.
pub fn sphere_kinetic(theta: f64, p_theta: f64, p_phi: f64) -> Result<f64> {
    let s = sin_checked(theta)?;
    Ok(0.5 * p_theta * p_theta + 0.5 * p_phi * p_phi / (s * s))
}

/// Four-particle angular Hamiltonian in the form written for the chart whose
/// polar axis is a three-fold axis of the cuboctahedron, evaluated term by term:
///
/// `p_θ²/2 + p_φ²/(2sin²θ) + 9g(8 - T²)²/(2D²) + 12g/D + 9g/(4sin²θ(1 + cos 6φ))`
/// with `T = tan θ`, `D = 3T² - 8 + T³cos 3φ`.
///
/// This expression does not coincide with the force-center sum in any chart:
/// its potential part takes negative values, while the force-center sum is
/// bounded below by `3g`. [`angular_threefold_n4`] is the form that does.
pub fn angular_closed_n4_s23(
    theta: f64,
    phi: f64,
    p_theta: f64,
    p_phi: f64,
    g: f64,
) -> Result<f64> {
    let kin = sphere_kinetic(theta, p_theta, p_phi)?;
    let (s, c) = theta.sin_cos();
    // D·cos³θ, so the expression stays finite at the equator.
    let d = 3.0 * s * s * c - 8.0 * c * c * c + s * s * s * (3.0 * phi).cos();
    if d.abs() < SINGULAR_REL_TOL {
        return Err(Error::singular("3tan²θ - 8 + tan³θ cos 3φ = 0"));
    }
    let c3 = (3.0 * phi).cos();
    if c3.abs() < SINGULAR_REL_TOL {
        return Err(Error::singular("1 + cos 6φ = 0"));
    }
    let m = 8.0 * c * c - s * s;
    let v = 9.0 * g * m * m * c * c / (2.0 * d * d)
        + 12.0 * g * c * c * c / d
        + 9.0 * g / (4.0 * s * s * 2.0 * c3 * c3);
    Ok(kin + v)
}

/// Four-particle angular Hamiltonian in the chart with polar axis
/// `b^{13}×b^{12}` and azimuth origin at `b^{13}`: three force centers on the
/// equator at `φ ∈ {0, ±π/3}` and three at polar angle `arccos √(2/3)`.
///
/// `V = 9g/(sin²θ(1 + cos 6φ)) + 27g(8c² - s²)²/(2Q²) + 36√2 g c/Q`,
/// `Q = 3√2 s²c - 8√2 c³ + s³ sin 3φ`, with `s = sin θ`, `c = cos θ`.
pub fn angular_threefold_n4(theta: f64, phi: f64, p_theta: f64, p_phi: f64, g: f64) -> Result<f64> {
    let kin = sphere_kinetic(theta, p_theta, p_phi)?;
    let (s, c) = theta.sin_cos();
    let q = 3.0 * SQRT_2 * s * s * c - 8.0 * SQRT_2 * c * c * c + s * s * s * (3.0 * phi).sin();
    if q.abs() < SINGULAR_REL_TOL {
        return Err(Error::singular("off-equator force center at 90°"));
    }
    let c3 = (3.0 * phi).cos();
    if c3.abs() < SINGULAR_REL_TOL {
        return Err(Error::singular("equatorial force center at 90°"));
    }
    let m = 8.0 * c * c - s * s;
    let v = 9.0 * g / (s * s * 2.0 * c3 * c3)
        + 27.0 * g * m * m / (2.0 * q * q)
        + 36.0 * SQRT_2 * g * c / q;
    Ok(kin + v)
}

/// Coefficient in front of `p_φ²/sin²θ` in the square-normal chart form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KineticMode {
    /// `p_φ²/sin²θ` with unit weight.
    FullWeight,
    /// `p_φ²/(2sin²θ)`, the standard sphere kinetic term.
    StandardHalf,
}

impl KineticMode {
    pub const ALL: [KineticMode; 2] = [KineticMode::FullWeight, KineticMode::StandardHalf];

    fn coefficient(self) -> f64 {
        match self {
            KineticMode::FullWeight => 1.0,
            KineticMode::StandardHalf => 0.5,
        }
    }
}

/// Bracketed rational part of the square-normal chart potential,
/// `a(k-6)/d + b(k + u + w/k)/d²` with `d = k - 8 + 8/k - k cos 4φ` and
/// `k = tan²θ`. For `k > 1` it is evaluated in `1/k` so `θ → π/2` stays finite.
fn square_chart_rational(theta: f64, phi: f64, a: f64, b: f64, u: f64, w: f64) -> Result<f64> {
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (s * s, c * c);
    let c4 = (4.0 * phi).cos();
    if s2 <= c2 {
        let k = s2 / c2;
        if k == 0.0 {
            return Err(Error::ChartSingularity("k = tan²θ = 0".into()));
        }
        let d = k - 8.0 + 8.0 / k - k * c4;
        if d.abs() < SINGULAR_REL_TOL {
            return Err(Error::singular("k - 8 + 8/k - k cos 4φ = 0"));
        }
        Ok(a * (k - 6.0) / d + b * (k + u + w / k) / (d * d))
    } else {
        let inv = c2 / s2;
        let e = 1.0 - 8.0 * inv + 8.0 * inv * inv - c4;
        if e.abs() < SINGULAR_REL_TOL {
            return Err(Error::singular("k - 8 + 8/k - k cos 4φ = 0"));
        }
        Ok(a * (1.0 - 6.0 * inv) / e + b * (inv + u * inv * inv + w * inv * inv * inv) / (e * e))
    }
}

fn square_chart_prefactor(theta: f64, phi: f64) -> Result<(f64, f64)> {
    let s = sin_checked(theta)?;
    let c2 = (2.0 * phi).cos();
    if c2.abs() < SINGULAR_REL_TOL {
        return Err(Error::singular("1 + cos 4φ = 0"));
    }
    // 1 + cos 4φ = 2cos²2φ
    Ok((s * s, 1.0 / (2.0 * c2 * c2)))
}

/// Four-particle angular Hamiltonian in the `a`-frame chart (polar axis `a_3`,
/// azimuth origin `a_1`), evaluated term by term:
///
/// `p_θ²/2 + c p_φ²/sin²θ + (4g/sin²θ)[1/(1 + cos 4φ) + (k-6)/d + 4(k-16+16/k)/d²]`
///
/// with `c = 1` in [`KineticMode::FullWeight`] and `c = ½` in
/// [`KineticMode::StandardHalf`]. The rational part does not reproduce the
/// force-center sum; see [`angular_a_frame_n4`].
pub fn angular_closed_n4_z4(
    theta: f64,
    phi: f64,
    p_theta: f64,
    p_phi: f64,
    g: f64,
    mode: KineticMode,
) -> Result<f64> {
    let (s2, first) = square_chart_prefactor(theta, phi)?;
    let rest = square_chart_rational(theta, phi, 1.0, 4.0, -16.0, 16.0)?;
    Ok(0.5 * p_theta * p_theta
        + mode.coefficient() * p_phi * p_phi / s2
        + 4.0 * g / s2 * (first + rest))
}

/// Four-particle angular Hamiltonian in the `a`-frame chart. In this frame the
/// force centers are `(e_i ± e_j)/√2`, and
///
/// `V = (4g/sin²θ)[1/(1 + cos 4φ) + 4(k-6)/d + 64(k-4+4/k)/d²]`.
pub fn angular_a_frame_n4(theta: f64, phi: f64, p_theta: f64, p_phi: f64, g: f64) -> Result<f64> {
    let (s2, first) = square_chart_prefactor(theta, phi)?;
    let rest = square_chart_rational(theta, phi, 4.0, 64.0, -4.0, 4.0)?;
    Ok(sphere_kinetic(theta, p_theta, p_phi)? + 4.0 * g / s2 * (first + rest))
}

/// `Σp²/2 + Σ_{i<j} [g/(u_i-u_j)² + g/(u_i+u_j)²]`.
pub fn energy_d3(u: &[f64; 3], pu: &[f64; 3], g: f64) -> Result<f64> {
    let scale = norm(u);
    let mut v = 0.0;
    for i in 0..3 {
        for j in (i + 1)..3 {
            for (d, what) in [(u[i] - u[j], "u_i = u_j"), (u[i] + u[j], "u_i = -u_j")] {
                if d.abs() <= SINGULAR_REL_TOL * scale {
                    return Err(Error::singular_pair((i + 1, j + 1), what));
                }
                v += g / (d * d);
            }
        }
    }
    Ok(kinetic(pu) + v)
}

/// Constant and oscillator parts of the angular potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HiggsSplit {
    /// `N(N-1)g/4`.
    pub constant: f64,
    /// `(g/2)Σ_a tan²θ_a`.
    pub oscillator_sum: f64,
}

impl HiggsSplit {
    pub fn total(&self) -> f64 {
        self.constant + self.oscillator_sum
    }
}

pub fn higgs_split(n_hat: &[f64], rs: &RootSystem, g: f64) -> Result<HiggsSplit> {
    let proj = guarded_projections(n_hat, rs, SINGULAR_REL_TOL)?;
    let n = rs.n_particles() as f64;
    let oscillator_sum = 0.5
        * g
        * proj
            .iter()
            .map(|c| {
                let c2 = c * c;
                (1.0 - c2) / c2
            })
            .sum::<f64>();
    Ok(HiggsSplit {
        constant: n * (n - 1.0) * g / 4.0,
        oscillator_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::root_system;
    use std::f64::consts::PI;

    #[test]
    fn full_energy_two_particles() {
        let params = ModelParams::new(2, 1.0).unwrap();
        let s = PhaseState::new(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(energy_full(&s, &params).unwrap(), 1.0);
    }

    #[test]
    fn full_energy_free_and_symmetric() {
        let free = ModelParams::new(3, 0.0).unwrap();
        let s = PhaseState::new(vec![0.0, 1.0, 3.0], vec![1.0, 2.0, -0.5]).unwrap();
        assert_eq!(energy_full(&s, &free).unwrap(), 0.5 * (1.0 + 4.0 + 0.25));
        let params = ModelParams::new(3, 1.7).unwrap();
        let perm = PhaseState::new(vec![3.0, 0.0, 1.0], vec![-0.5, 1.0, 2.0]).unwrap();
        let (a, b) = (
            energy_full(&s, &params).unwrap(),
            energy_full(&perm, &params).unwrap(),
        );
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn uncoupled_wall_is_regular() {
        let wall = PI / 6.0;
        assert!(potential_n3(wall, 1.0).is_err());
        assert_eq!(potential_n3(wall, 0.0).unwrap(), 0.0);
        assert_eq!(potential_n3_derivative(wall, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn coincident_particles_report_pair() {
        let params = ModelParams::new(3, 1.0).unwrap();
        let s = PhaseState::new(vec![0.0, 2.0, 2.0], vec![0.0; 3]).unwrap();
        match energy_full(&s, &params) {
            Err(Error::Singular { pair, .. }) => assert_eq!(pair, Some((2, 3))),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn reduced_energy_single_root() {
        let rs = root_system(2).unwrap();
        let s = ReducedPhaseState::new(vec![1.0], vec![0.0]).unwrap();
        assert!((energy_reduced(&s, &rs, 1.0).unwrap() - 0.5).abs() < 1e-15);
        let free = ReducedPhaseState::new(vec![1.0], vec![2.0]).unwrap();
        assert_eq!(energy_reduced(&free, &rs, 0.0).unwrap(), 2.0);
    }

    #[test]
    fn reduced_energy_on_wall_reports_pair() {
        let rs = root_system(3).unwrap();
        // y ⟂ b^{23} = (0, 1)
        let s = ReducedPhaseState::new(vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
        match energy_reduced(&s, &rs, 1.0) {
            Err(Error::Singular { pair, .. }) => assert_eq!(pair, Some((2, 3))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn general_angular_at_root_direction() {
        let rs = root_system(3).unwrap();
        let n = rs.vector((2, 3)).unwrap().to_vec();
        let v = angular_energy_general(&n, &[0.0, 0.0], &rs, 1.0).unwrap();
        assert!((v - 4.5).abs() < 1e-12);
        let k = angular_energy_general(&[1.0, 0.0], &[0.0, 1.0], &root_system(2).unwrap(), 0.0);
        assert!(k.is_err(), "tangent_p must be orthogonal to n_hat");
    }

    #[test]
    fn general_angular_rejects_non_unit() {
        let rs = root_system(3).unwrap();
        assert!(matches!(
            angular_energy_general(&[0.0, 2.0], &[1.0, 0.0], &rs, 1.0),
            Err(Error::InvalidInput(_))
        ));
        let n = [0.6, 0.8];
        let t = [-0.8, 0.6];
        assert!((angular_energy_general(&n, &t, &rs, 0.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_n3_values() {
        assert!((angular_closed_n3(0.0, 0.0, 1.0).unwrap() - 4.5).abs() < 1e-14);
        assert!((angular_closed_n3(PI / 12.0, 0.0, 1.0).unwrap() - 9.0).abs() < 1e-12);
        assert_eq!(angular_closed_n3(0.3, 2.0, 0.0).unwrap(), 2.0);
        assert!(angular_closed_n3(PI / 6.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn closed_n3_forms_agree_on_grid() {
        for i in 0..2000 {
            let phi = -PI + 2.0 * PI * (i as f64 + 0.37) / 2000.0;
            if let (Ok(a), Ok(b)) = (
                angular_closed_n3(phi, 0.3, 1.3),
                angular_three_center_n3(phi, 0.3, 1.3),
            ) {
                assert!((a - b).abs() <= 1e-10 * a.abs(), "phi={phi}");
            }
        }
    }

    #[test]
    fn z4_kinetic_only() {
        let t = 0.7;
        let v = angular_closed_n4_z4(t, 0.2, 1.0, 2.0, 0.0, KineticMode::StandardHalf).unwrap();
        let want = 0.5 + 2.0 / t.sin().powi(2);
        assert!((v - want).abs() < 1e-12);
        let s23 = angular_closed_n4_s23(t, 0.2, 1.0, 2.0, 0.0).unwrap();
        assert!((s23 - want).abs() < 1e-12);
    }

    #[test]
    fn z4_square_symmetries() {
        // Quarter turns about the polar axis and reflection through the
        // equator. An eighth turn sends cos 4φ to -cos 4φ and is not one.
        let mut eighth_turn_differs = false;
        for i in 0..50 {
            let t = 0.2 + 2.7 * (i as f64) / 50.0;
            let f = 0.1 + 0.11 * i as f64;
            for mode in KineticMode::ALL {
                let Ok(a) = angular_closed_n4_z4(t, f, 0.4, 0.3, 1.0, mode) else {
                    continue;
                };
                for (t2, f2) in [
                    (t, f + PI / 2.0),
                    (PI - t, f),
                    (PI - t, f + PI / 2.0),
                    (t, -f),
                ] {
                    let b = angular_closed_n4_z4(t2, f2, 0.4, 0.3, 1.0, mode).unwrap();
                    assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
                }
                if let Ok(b) = angular_closed_n4_z4(PI - t, f + PI / 4.0, 0.4, 0.3, 1.0, mode) {
                    eighth_turn_differs |= (a - b).abs() > 1e-6 * a.abs();
                }
            }
        }
        assert!(eighth_turn_differs);
    }

    #[test]
    fn s23_has_threefold_symmetry() {
        for i in 0..50 {
            let t = 0.2 + 2.7 * (i as f64) / 50.0;
            let f = 0.05 + 0.13 * i as f64;
            let (Ok(a), Ok(b)) = (
                angular_closed_n4_s23(t, f, 0.1, 0.2, 1.0),
                angular_closed_n4_s23(t, f + 2.0 * PI / 3.0, 0.1, 0.2, 1.0),
            ) else {
                continue;
            };
            assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
        }
    }

    #[test]
    fn square_chart_forms_are_continuous_across_k_equal_one() {
        let t = PI / 4.0;
        for f in [0.3, 1.0, 2.0] {
            let lo = angular_a_frame_n4(t - 1e-12, f, 0.0, 0.0, 1.0).unwrap();
            let hi = angular_a_frame_n4(t + 1e-12, f, 0.0, 0.0, 1.0).unwrap();
            assert!((lo - hi).abs() < 1e-9 * lo.abs(), "{lo} vs {hi}");
        }
        // Equator: k is infinite but the value is finite.
        assert!(angular_a_frame_n4(PI / 2.0, 0.3, 0.0, 0.0, 1.0)
            .unwrap()
            .is_finite());
        assert!(
            angular_closed_n4_z4(PI / 2.0, 0.3, 0.0, 0.0, 1.0, KineticMode::FullWeight)
                .unwrap()
                .is_finite()
        );
    }

    #[test]
    fn spherical_forms_reject_poles() {
        assert!(matches!(
            angular_a_frame_n4(0.0, 0.3, 0.0, 0.0, 1.0),
            Err(Error::ChartSingularity(_))
        ));
        assert!(angular_threefold_n4(PI, 0.3, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn d3_free_and_symmetric() {
        let u = [0.3, -1.1, 2.0];
        let p = [1.0, 0.5, -0.25];
        let free = energy_d3(&u, &p, 0.0).unwrap();
        assert!((free - 0.5 * (1.0 + 0.25 + 0.0625)).abs() < 1e-15);
        let base = energy_d3(&u, &p, 1.0).unwrap();
        let flipped = energy_d3(&[-0.3, -1.1, 2.0], &[-1.0, 0.5, -0.25], 1.0).unwrap();
        let permuted = energy_d3(&[2.0, 0.3, -1.1], &[-0.25, 1.0, 0.5], 1.0).unwrap();
        assert!((base - flipped).abs() < 1e-13 && (base - permuted).abs() < 1e-13);
        assert!(energy_d3(&[1.0, -1.0, 0.5], &p, 1.0).is_err());
    }

    #[test]
    fn higgs_constants() {
        let n3 = root_system(3).unwrap();
        let n4 = root_system(4).unwrap();
        let g = 0.8;
        let a = higgs_split(&[0.6, 0.8], &n3, g).unwrap();
        assert!((a.constant - 1.5 * g).abs() < 1e-15);
        let nhat = [0.48, 0.6, 0.64];
        let b = higgs_split(&nhat, &n4, g).unwrap();
        assert!((b.constant - 3.0 * g).abs() < 1e-15);
        let v = angular_potential(&nhat, &n4, g).unwrap();
        assert!((b.total() - v).abs() < 1e-12 * v);
    }
}
