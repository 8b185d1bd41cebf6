//! Seeded random phase points for the verification sweeps.
//!
//! Every sample `i` of a sweep draws from its own ChaCha stream
//! `(seed, stream = i)`, so results are independent of evaluation order and
//! thread count.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_6, PI};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::charts::PolarState;
use crate::error::{Error, Result};
use crate::geometry::RootSystem;
use crate::linalg::norm;
use crate::state::ReducedPhaseState;

/// Default angular distance kept from the collision walls.
pub const WALL_MARGIN: f64 = 0.05;

pub const RADIUS_RANGE: (f64, f64) = (0.5, 2.0);

pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn radius(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(RADIUS_RANGE.0..RADIUS_RANGE.1)
}

/// Distance from `phi` to the nearest singular angle `π/6 + kπ/3` of the
/// three-particle polar chart.
pub fn n3_wall_distance(phi: f64) -> f64 {
    let shifted = (phi - FRAC_PI_6).rem_euclid(FRAC_PI_3);
    shifted.min(FRAC_PI_3 - shifted)
}

/// `r ∈ [0.5, 2]`, `φ` uniform away from the walls, standard-normal momenta.
pub fn random_polar_state(rng: &mut ChaCha8Rng, margin: f64) -> PolarState {
    let r = radius(rng);
    let phi = loop {
        let phi = rng.random_range(-PI..PI);
        if n3_wall_distance(phi) >= margin {
            break phi;
        }
    };
    PolarState {
        r,
        phi,
        p_r: normal(rng),
        p_phi: normal(rng),
    }
}

/// Largest angular distance any direction can keep from every wall: the
/// chamber center `ρ` has `min_a |ρ̂·b^a| = √(6 / (N(N²-1)))`.
pub fn max_wall_margin(n_particles: usize) -> f64 {
    let n = n_particles as f64;
    (6.0 / (n * (n * n - 1.0))).sqrt().min(1.0).asin()
}

/// `wanted`, reduced where needed to 80% of [`max_wall_margin`] so that
/// rejection sampling in [`random_direction`] stays cheap.
pub fn feasible_margin(n_particles: usize, wanted: f64) -> f64 {
    wanted.min(0.8 * max_wall_margin(n_particles))
}

/// Rejection-sampling budget of [`random_direction`].
pub const MAX_DIRECTION_ATTEMPTS: usize = 1_000_000;

/// Uniform direction on the unit sphere of the reduced space with
/// `|n̂·b^a| ≥ sin(margin)` for every root.
pub fn random_direction(rng: &mut ChaCha8Rng, rs: &RootSystem, margin: f64) -> Result<Vec<f64>> {
    let limit = max_wall_margin(rs.n_particles());
    if margin.is_nan() || margin >= limit {
        return Err(Error::InvalidParameter(format!(
            "wall margin {margin} must be below {limit:.4} for N = {}",
            rs.n_particles()
        )));
    }
    let min_cos = margin.sin();
    for _ in 0..MAX_DIRECTION_ATTEMPTS {
        let v: Vec<f64> = (0..rs.dim()).map(|_| normal(rng)).collect();
        let len = norm(&v);
        if len < 1e-6 {
            continue;
        }
        let n: Vec<f64> = v.iter().map(|x| x / len).collect();
        if rs.projections(&n).iter().all(|c| c.abs() >= min_cos) {
            return Ok(n);
        }
    }
    Err(Error::InvalidParameter(format!(
        "no direction with wall margin {margin} after {MAX_DIRECTION_ATTEMPTS} draws"
    )))
}

/// A random direction scaled to `r ∈ [0.5, 2]` with standard-normal momenta.
pub fn random_reduced_state(
    rng: &mut ChaCha8Rng,
    rs: &RootSystem,
    margin: f64,
) -> Result<ReducedPhaseState> {
    let n = random_direction(rng, rs, margin)?;
    let r = radius(rng);
    Ok(ReducedPhaseState {
        y: n.iter().map(|x| r * x).collect(),
        py: (0..rs.dim()).map(|_| normal(rng)).collect(),
    })
}

/// Unit direction plus a tangential momentum of standard-normal components.
pub fn random_sphere_point(
    rng: &mut ChaCha8Rng,
    rs: &RootSystem,
    margin: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = random_direction(rng, rs, margin)?;
    let raw: Vec<f64> = (0..rs.dim()).map(|_| normal(rng)).collect();
    let along = crate::linalg::dot(&raw, &n);
    let t = raw.iter().zip(&n).map(|(p, nk)| p - along * nk).collect();
    Ok((n, t))
}
