//! Seeded verification sweeps over the identities the model satisfies.
//!
//! A sweep evaluates one or more residuals at every sample, in parallel when
//! available, and keeps the largest of each. Samples draw from independent
//! streams (see [`crate::sampling`]), so a report depends only on its options.

use std::f64::consts::{FRAC_PI_6, PI};
use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::charts::{
    polar_from_reduced, reduced_from_polar, sphere_projection, spherical_from_reduced, Chart,
    PolarState, SphericalState,
};
use crate::dynamics::{
    conservation_report, integrate, ConservationReport, InitialState, IntegrationConfig,
    Observable, Trajectory,
};
use crate::error::{Error, Result};
use crate::geometry::{
    cuboctahedron, expected_cosine, orthogonal_frame, root_system, ModelParams, RootSystem,
};
use crate::hamiltonians::{
    angular_a_frame_n4, angular_closed_n3, angular_closed_n4_s23, angular_closed_n4_z4,
    angular_energy_cartesian, angular_energy_general, angular_potential, angular_three_center_n3,
    angular_threefold_n4, energy_d3, energy_reduced, higgs_split, KineticMode,
};
use crate::integrals::{bracket_relations_report, ksq_residual, observables, BracketRelations};
use crate::linalg::{cross, dot, norm, Vec3};
use crate::numerics::{poisson_bracket, BracketConfig, DEFAULT_FD_STEP};
use crate::par::{map_indexed, Execution};
use crate::sampling::{
    feasible_margin, normal, random_direction, random_polar_state, random_reduced_state,
    random_sphere_point, sample_rng, WALL_MARGIN,
};
use crate::state::ReducedPhaseState;

/// Coupling used by every sweep. All checked identities are homogeneous in `g`.
pub const SWEEP_COUPLING: f64 = 1.0;

/// Both sides of the `K²` identity at `r = 1, φ = π/12, p_r = 1, p_φ = 0, g = 1`.
pub const KSQ_WORKED_VALUE: f64 = 61731.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Roots,
    IdentitiesN3,
    AngularN4,
    Brackets,
    Ksq,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Roots,
        Suite::IdentitiesN3,
        Suite::AngularN4,
        Suite::Brackets,
        Suite::Ksq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Roots => "roots",
            Suite::IdentitiesN3 => "identities_n3",
            Suite::AngularN4 => "angular_n4",
            Suite::Brackets => "brackets",
            Suite::Ksq => "ksq",
        }
    }

    /// Whether the suite draws random samples and therefore needs a seed.
    /// The roots suite only samples when asked for its Higgs check.
    pub fn is_randomized(self) -> bool {
        self != Suite::Roots
    }

    pub fn default_samples(self) -> usize {
        match self {
            Suite::Roots | Suite::Brackets => 100,
            _ => 1000,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SuiteOptions {
    /// Particle count; only the roots suite accepts values other than its own.
    pub n: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    /// Overrides every check's default tolerance.
    pub tol: Option<f64>,
    pub execution: Execution,
}

/// The largest residual of one identity over a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub tol: f64,
    /// Informational checks are reported but do not decide the exit status.
    pub gating: bool,
    pub passed: bool,
    /// Sample with the largest residual, for sweeps.
    pub worst_sample: Option<usize>,
    /// Samples at which the identity could not be evaluated.
    pub errors: usize,
}

impl Check {
    fn single(name: &str, residual: f64, tol: f64, gating: bool) -> Self {
        let ok = residual.is_finite();
        Self {
            name: name.to_owned(),
            max_residual: residual,
            tol,
            gating,
            passed: ok && residual <= tol,
            worst_sample: None,
            errors: usize::from(!ok),
        }
    }

    fn informational(mut self) -> Self {
        self.gating = false;
        self
    }
}

/// A mirror and rotation of the azimuth, and a reflection through the
/// equator, applied before evaluating a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Orientation {
    pub reflect_polar: bool,
    pub mirror_azimuth: bool,
    /// Azimuth offset in units of `π/6`.
    pub offset_sixths: u32,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngularN4Notes {
    /// The kinetic mode in which the square-normal form matched, if exactly one did.
    pub z4_matched_mode: Option<KineticMode>,
    pub z4_modes_within_tol: Vec<KineticMode>,
    /// Best agreement of the three-fold form over all chart orientations.
    pub s23_best_orientation: Orientation,
    /// Smallest potential part of the three-fold form seen over the samples.
    /// The force-center sum never drops below `3g` on the unit sphere.
    pub s23_potential_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorkedPoint {
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub n_particles: usize,
    pub samples: usize,
    pub seed: Option<u64>,
    pub coupling: f64,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angular_n4: Option<AngularN4Notes>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ksq_worked_point: Option<WorkedPoint>,
    /// All gating checks passed.
    pub passed: bool,
}

impl Report {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `|a - b| / max(|a|, |b|, 1)`.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Runs `f` at every sample and keeps the largest value of each residual.
/// `names` and `tols` give one check per residual column.
fn sweep<F>(
    names: &[&str],
    tols: &[f64],
    samples: usize,
    seed: u64,
    exec: Execution,
    f: F,
) -> Vec<Check>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Vec<f64>> + Sync + Send,
{
    debug_assert_eq!(names.len(), tols.len());
    let results = map_indexed(samples, exec, |i| f(&mut sample_rng(seed, i)));
    let mut checks: Vec<Check> = names
        .iter()
        .zip(tols)
        .map(|(name, &tol)| Check {
            name: (*name).to_owned(),
            max_residual: 0.0,
            tol,
            gating: true,
            passed: true,
            worst_sample: None,
            errors: 0,
        })
        .collect();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(values) => {
                debug_assert_eq!(values.len(), checks.len());
                for (c, v) in checks.iter_mut().zip(values) {
                    if !v.is_finite() {
                        c.errors += 1;
                    } else if v.abs() > c.max_residual || c.worst_sample.is_none() {
                        c.max_residual = v.abs();
                        c.worst_sample = Some(i);
                    }
                }
            }
            Err(_) => checks.iter_mut().for_each(|c| c.errors += 1),
        }
    }
    for c in &mut checks {
        c.passed = c.errors == 0 && c.max_residual <= c.tol;
    }
    checks
}

fn tol_or(opts: &SuiteOptions, default: f64) -> f64 {
    opts.tol.unwrap_or(default)
}

fn require_seed(suite: Suite, opts: &SuiteOptions) -> Result<u64> {
    opts.seed.ok_or_else(|| {
        Error::InvalidParameter(format!(
            "suite {suite} is randomized and needs an explicit seed"
        ))
    })
}

fn fixed_n(suite: Suite, opts: &SuiteOptions, n: usize) -> Result<usize> {
    match opts.n {
        Some(m) if m != n => Err(Error::InvalidParameter(format!(
            "suite {suite} is defined for N = {n}, got N = {m}"
        ))),
        _ => Ok(n),
    }
}

/// Runs one suite. Fails only on invalid options; identity failures are
/// reported through [`Report::passed`].
pub fn run(suite: Suite, opts: &SuiteOptions) -> Result<Report> {
    if let Some(tol) = opts.tol {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be >= 0, got {tol}"
            )));
        }
    }
    let samples = opts.samples.unwrap_or_else(|| suite.default_samples());
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    let (n, checks, angular_n4, ksq_worked_point) = match suite {
        Suite::Roots => {
            let n = opts.n.unwrap_or(4);
            (n, roots_suite(n, samples, opts)?, None, None)
        }
        Suite::IdentitiesN3 => {
            let n = fixed_n(suite, opts, 3)?;
            let seed = require_seed(suite, opts)?;
            (n, identities_n3_suite(samples, seed, opts), None, None)
        }
        Suite::AngularN4 => {
            let n = fixed_n(suite, opts, 4)?;
            let seed = require_seed(suite, opts)?;
            let (checks, notes) = angular_n4_suite(samples, seed, opts)?;
            (n, checks, Some(notes), None)
        }
        Suite::Brackets => {
            let n = fixed_n(suite, opts, 3)?;
            let seed = require_seed(suite, opts)?;
            (n, brackets_suite(samples, seed, opts)?, None, None)
        }
        Suite::Ksq => {
            let n = fixed_n(suite, opts, 3)?;
            let seed = require_seed(suite, opts)?;
            let (checks, worked) = ksq_suite(samples, seed, opts)?;
            (n, checks, None, Some(worked))
        }
    };
    let passed = checks.iter().filter(|c| c.gating).all(|c| c.passed);
    Ok(Report {
        suite,
        n_particles: n,
        samples,
        seed: opts.seed,
        coupling: SWEEP_COUPLING,
        checks,
        angular_n4,
        ksq_worked_point,
        passed,
    })
}

// ---------------------------------------------------------------- roots

/// Independent table of the four-particle roots, in lexicographic pair order.
pub fn cuboctahedron_reference() -> [Vec3; 6] {
    let r3 = 3f64.sqrt();
    let t = (2.0f64 / 3.0).sqrt();
    [
        [t, -1.0 / r3, 0.0],
        [t, 1.0 / (2.0 * r3), -0.5],
        [t, 1.0 / (2.0 * r3), 0.5],
        [0.0, r3 / 2.0, -0.5],
        [0.0, r3 / 2.0, 0.5],
        [0.0, 0.0, 1.0],
    ]
}

/// Largest deviation of the root Gram matrix from the Kronecker formula, and
/// of the root norms from one.
pub fn root_geometry_residuals(rs: &RootSystem) -> (f64, f64) {
    let mut gram: f64 = 0.0;
    let mut unit: f64 = 0.0;
    for a in rs.iter() {
        unit = unit.max((norm(&a.vector) - 1.0).abs());
        for b in rs.iter() {
            gram = gram.max((dot(&a.vector, &b.vector) - expected_cosine(a.pair, b.pair)).abs());
        }
    }
    (gram, unit)
}

/// Largest deviation of the three N = 3 cross cosines from `{½, ½, -½}`
/// (pairs `12·13`, `13·23`, `12·23`).
pub fn n3_cosine_residual() -> Result<f64> {
    let rs = root_system(3)?;
    let want = [
        ((1, 2), (1, 3), 0.5),
        ((1, 3), (2, 3), 0.5),
        ((1, 2), (2, 3), -0.5),
    ];
    let mut worst: f64 = 0.0;
    for (a, b, c) in want {
        worst = worst.max((dot(rs.vector(a)?, rs.vector(b)?) - c).abs());
    }
    Ok(worst)
}

/// Componentwise gap between `root_system(4)` and [`cuboctahedron_reference`].
pub fn cuboctahedron_reference_residual() -> Result<f64> {
    let rs = root_system(4)?;
    let mut worst: f64 = 0.0;
    for (e, want) in rs.iter().zip(cuboctahedron_reference()) {
        for (a, b) in e.vector.iter().zip(want) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

/// Largest `1 - |n̂·a_i|` between a square face normal and the frame axis it
/// should be parallel to. Each axis must be hit by exactly two squares.
pub fn square_normal_residual() -> Result<f64> {
    let rs = root_system(4)?;
    let frame = orthogonal_frame(&rs)?;
    let solid = cuboctahedron();
    let mut hits = [0usize; 3];
    let mut worst: f64 = 0.0;
    for sq in &solid.squares {
        let p: Vec<Vec3> = sq.iter().map(|&i| solid.vertices[i].position).collect();
        let d1 = [p[2][0] - p[0][0], p[2][1] - p[0][1], p[2][2] - p[0][2]];
        let d2 = [p[3][0] - p[1][0], p[3][1] - p[1][1], p[3][2] - p[1][2]];
        let c = cross(&d1, &d2);
        let len = norm(&c);
        let nrm = [c[0] / len, c[1] / len, c[2] / len];
        let (axis, best) = frame
            .axes
            .iter()
            .enumerate()
            .map(|(i, a)| (i, dot(&nrm, a).abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("three axes");
        hits[axis] += 1;
        worst = worst.max(1.0 - best);
    }
    if hits != [2, 2, 2] {
        return Ok(1.0);
    }
    Ok(worst)
}

/// `|total - angular_potential| / max(|V|, 1)` for the constant-plus-oscillator
/// split, over random directions of the N-particle reduced sphere.
pub fn higgs_check(
    n: usize,
    samples: usize,
    seed: u64,
    tol: f64,
    exec: Execution,
) -> Result<Check> {
    let rs = root_system(n)?;
    let name = format!("higgs_split_n{n}");
    let mut checks = sweep(&[name.as_str()], &[tol], samples, seed, exec, |rng| {
        let dir = random_direction(rng, &rs, feasible_margin(n, WALL_MARGIN))?;
        let v = angular_potential(&dir, &rs, SWEEP_COUPLING)?;
        let split = higgs_split(&dir, &rs, SWEEP_COUPLING)?;
        Ok(vec![rel_diff(split.total(), v)])
    });
    Ok(checks.remove(0))
}

fn roots_suite(n: usize, samples: usize, opts: &SuiteOptions) -> Result<Vec<Check>> {
    let rs = root_system(n)?;
    let tol = tol_or(opts, 1e-12);
    let (gram, unit) = root_geometry_residuals(&rs);
    let mut checks = vec![
        Check::single("cosine_formula", gram, tol, true),
        Check::single("unit_norm", unit, tol, true),
    ];
    if n == 3 {
        checks.push(Check::single(
            "n3_cosines",
            n3_cosine_residual()?,
            tol,
            true,
        ));
    }
    if n == 4 {
        checks.push(Check::single(
            "cuboctahedron_reference",
            cuboctahedron_reference_residual()?,
            tol,
            true,
        ));
        let solid = cuboctahedron();
        let counts = [
            solid.vertices.len(),
            solid.edges.len(),
            solid.triangles.len(),
            solid.squares.len(),
        ];
        let miss: usize = counts
            .iter()
            .zip([12, 24, 8, 6])
            .map(|(a, b)| a.abs_diff(b))
            .sum();
        checks.push(Check::single(
            "cuboctahedron_counts",
            miss as f64,
            0.0,
            true,
        ));
        checks.push(Check::single(
            "square_normals",
            square_normal_residual()?,
            tol_or(opts, 1e-10),
            true,
        ));
        let frame = orthogonal_frame(&rs)?;
        checks.push(Check::single(
            "frame_orthonormality",
            frame.max_orthonormality_error(),
            tol,
            true,
        ));
    }
    if let Some(seed) = opts.seed {
        if n >= 3 {
            checks.push(higgs_check(n, samples, seed, tol, opts.execution)?);
        }
    }
    Ok(checks)
}

// --------------------------------------------------------- identities_n3

/// Reduced state of the polar chart point and its unit-sphere projection.
fn polar_sphere_point(s: &PolarState) -> Result<(Vec<f64>, Vec<f64>, ReducedPhaseState)> {
    let red = reduced_from_polar(s)?;
    let (n_hat, t) = sphere_projection(&red)?;
    Ok((n_hat, t, red))
}

fn identities_n3_suite(samples: usize, seed: u64, opts: &SuiteOptions) -> Vec<Check> {
    let rs = root_system(3).expect("N = 3 is valid");
    let g = SWEEP_COUPLING;
    let fd = BracketConfig::default();
    let names = [
        "closed_cos6",
        "closed_three_center",
        "cartesian_i",
        "ksq",
        "brackets_fd",
    ];
    let tols = [
        tol_or(opts, 1e-10),
        tol_or(opts, 1e-10),
        tol_or(opts, 1e-10),
        tol_or(opts, 1e-9),
        tol_or(opts, 1e-4),
    ];
    sweep(&names, &tols, samples, seed, opts.execution, |rng| {
        let s = random_polar_state(rng, WALL_MARGIN);
        let (n_hat, t, red) = polar_sphere_point(&s)?;
        let general = angular_energy_general(&n_hat, &t, &rs, g)?;
        // I depends on (φ, p_φ) alone.
        let cos6 = angular_closed_n3(s.phi, s.p_phi, g)?;
        let three = angular_three_center_n3(s.phi, s.p_phi, g)?;
        let cart = angular_energy_cartesian(&red, &rs, g)?;
        let o = observables(&s, g)?;
        let br = bracket_relations_report(&s, g, &fd)?;
        Ok(vec![
            rel_diff(cos6, general),
            rel_diff(three, general),
            rel_diff(cart, o.i_angular),
            ksq_residual(&o, g),
            br.max_abs(),
        ])
    })
}

// ------------------------------------------------------------ angular_n4

/// Unit direction and tangential momentum, with their chart coordinates.
fn sphere_state(
    rng: &mut ChaCha8Rng,
    rs: &RootSystem,
    chart: Chart,
) -> Result<(Vec<f64>, Vec<f64>, SphericalState)> {
    let (n_hat, t) = random_sphere_point(rng, rs, WALL_MARGIN)?;
    let sph = spherical_from_reduced(
        &ReducedPhaseState {
            y: n_hat.clone(),
            py: t.clone(),
        },
        chart,
    )?;
    Ok((n_hat, t, sph))
}

fn orientations() -> impl Iterator<Item = (bool, bool, u32)> {
    [false, true].into_iter().flat_map(|rp| {
        [false, true]
            .into_iter()
            .flat_map(move |ma| (0..12).map(move |k| (rp, ma, k)))
    })
}

fn oriented(theta: f64, phi: f64, (rp, ma, k): (bool, bool, u32)) -> (f64, f64) {
    let th = if rp { PI - theta } else { theta };
    let ph = if ma { -phi } else { phi };
    (th, ph + k as f64 * FRAC_PI_6)
}

/// Energy of a four-particle reduced state in Jacobi coordinates and in the
/// D₃ coordinates `u_i = a_i·y`.
pub fn d3_residual(state: &ReducedPhaseState, rs: &RootSystem, g: f64) -> Result<f64> {
    let frame = orthogonal_frame(rs)?;
    let u = frame.to_frame(&state.y);
    let pu = frame.to_frame(&state.py);
    Ok(rel_diff(
        energy_d3(&u, &pu, g)?,
        energy_reduced(state, rs, g)?,
    ))
}

/// [`d3_residual`] over random four-particle reduced states.
pub fn d3_check(samples: usize, seed: u64, tol: f64, exec: Execution) -> Result<Check> {
    let rs = root_system(4)?;
    let mut checks = sweep(&["d3_equivalence"], &[tol], samples, seed, exec, |rng| {
        let state = random_reduced_state(rng, &rs, WALL_MARGIN)?;
        Ok(vec![d3_residual(&state, &rs, SWEEP_COUPLING)?])
    });
    Ok(checks.remove(0))
}

fn angular_n4_suite(
    samples: usize,
    seed: u64,
    opts: &SuiteOptions,
) -> Result<(Vec<Check>, AngularN4Notes)> {
    let rs = root_system(4)?;
    let g = SWEEP_COUPLING;
    let tol = tol_or(opts, 1e-9);
    let exec = opts.execution;

    // Stream layout: the same seed drives both charts so the samples coincide
    // as points of the sphere.
    let b13 = sweep(
        &["s23_closed", "threefold_corrected"],
        &[tol, tol],
        samples,
        seed,
        exec,
        |rng| {
            let (n_hat, t, s) = sphere_state(rng, &rs, Chart::B13Aligned)?;
            let general = angular_energy_general(&n_hat, &t, &rs, g)?;
            let closed = angular_closed_n4_s23(s.theta, s.phi, s.p_theta, s.p_phi, g)
                .map_or(f64::NAN, |v| rel_diff(v, general));
            let corrected = angular_threefold_n4(s.theta, s.phi, s.p_theta, s.p_phi, g)?;
            Ok(vec![closed, rel_diff(corrected, general)])
        },
    );

    let variants: Vec<(bool, bool, u32)> = orientations().collect();
    let names: Vec<String> = (0..variants.len()).map(|i| format!("v{i}")).collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let per_variant = sweep(
        &name_refs,
        &vec![tol; variants.len()],
        samples,
        seed,
        exec,
        |rng| {
            let (n_hat, t, s) = sphere_state(rng, &rs, Chart::B13Aligned)?;
            let general = angular_energy_general(&n_hat, &t, &rs, g)?;
            Ok(variants
                .iter()
                .map(|&v| {
                    let (th, ph) = oriented(s.theta, s.phi, v);
                    angular_closed_n4_s23(th, ph, s.p_theta, s.p_phi, g)
                        .map_or(f64::NAN, |e| rel_diff(e, general))
                })
                .collect())
        },
    );
    let (best_idx, best) = per_variant
        .iter()
        .enumerate()
        .filter(|(_, c)| c.errors == 0)
        .min_by(|a, b| a.1.max_residual.total_cmp(&b.1.max_residual))
        .map(|(i, c)| (i, c.max_residual))
        .unwrap_or((0, f64::INFINITY));
    let (rp, ma, k) = variants[best_idx];
    let s23_best_orientation = Orientation {
        reflect_polar: rp,
        mirror_azimuth: ma,
        offset_sixths: k,
        max_residual: best,
    };

    let s23_potential_min = map_indexed(samples, exec, |i| {
        let mut rng = sample_rng(seed, i);
        sphere_state(&mut rng, &rs, Chart::B13Aligned)
            .and_then(|(_, _, s)| angular_closed_n4_s23(s.theta, s.phi, 0.0, 0.0, g))
            .unwrap_or(f64::INFINITY)
    })
    .into_iter()
    .fold(f64::INFINITY, f64::min);

    let a_frame = sweep(
        &["z4_full_weight", "z4_standard_half", "a_frame_corrected"],
        &[tol, tol, tol],
        samples,
        seed,
        exec,
        |rng| {
            let (n_hat, t, s) = sphere_state(rng, &rs, Chart::AFrame)?;
            let general = angular_energy_general(&n_hat, &t, &rs, g)?;
            let mut out: Vec<f64> = KineticMode::ALL
                .iter()
                .map(|&m| {
                    angular_closed_n4_z4(s.theta, s.phi, s.p_theta, s.p_phi, g, m)
                        .map_or(f64::NAN, |v| rel_diff(v, general))
                })
                .collect();
            let corrected = angular_a_frame_n4(s.theta, s.phi, s.p_theta, s.p_phi, g)?;
            out.push(rel_diff(corrected, general));
            Ok(out)
        },
    );

    let d3 = d3_check(samples, seed, tol_or(opts, 1e-10), exec)?;

    let modes_ok: Vec<KineticMode> = KineticMode::ALL
        .iter()
        .zip(&a_frame)
        .filter(|(_, c)| c.passed)
        .map(|(m, _)| *m)
        .collect();
    let z4_matched_mode = (modes_ok.len() == 1).then(|| modes_ok[0]);
    let best_mode_residual = a_frame[..2]
        .iter()
        .filter(|c| c.errors == 0)
        .map(|c| c.max_residual)
        .fold(f64::INFINITY, f64::min);
    let mut z4_single = Check::single("z4_single_mode", best_mode_residual, tol, true);
    z4_single.passed = z4_matched_mode.is_some();

    let mut checks = Vec::new();
    let mut b13 = b13.into_iter();
    checks.push(b13.next().expect("s23 check"));
    checks.push(z4_single);
    checks.push(d3);
    checks.extend(b13.map(Check::informational));
    checks.extend(a_frame.into_iter().map(Check::informational));
    checks.push(Check::single("s23_best_orientation", best, tol, false));

    Ok((
        checks,
        AngularN4Notes {
            z4_matched_mode,
            z4_modes_within_tol: modes_ok,
            s23_best_orientation,
            s23_potential_min,
        },
    ))
}

// -------------------------------------------------------------- brackets

const BRACKET_NAMES: [&str; 6] = ["if_3k", "ik_6if", "kf_8h3", "h_i", "h_f", "h_k"];

fn relation_columns(r: &BracketRelations) -> Vec<f64> {
    vec![r.r1, r.r2, r.r3, r.h_i, r.h_f, r.h_k]
}

/// Polar chart coordinate `index` (`r, φ, p_r, p_φ`) as a function of the
/// Cartesian reduced phase point `[y_1, y_2, p_1, p_2]`.
fn polar_coordinate(index: usize) -> impl Fn(&[f64]) -> Result<f64> {
    move |z: &[f64]| {
        let s = polar_from_reduced(&ReducedPhaseState {
            y: z[..2].to_vec(),
            py: z[2..].to_vec(),
        })?;
        Ok(s.to_phase_point()[index])
    }
}

fn spherical_coordinate(index: usize, chart: Chart) -> impl Fn(&[f64]) -> Result<f64> {
    move |z: &[f64]| {
        let s = spherical_from_reduced(
            &ReducedPhaseState {
                y: z[..3].to_vec(),
                py: z[3..].to_vec(),
            },
            chart,
        )?;
        Ok(s.to_phase_point()[index])
    }
}

/// Largest `|{Z_a, Z_b} - J_ab|` over all pairs of chart coordinates, where
/// `J` is the canonical form for `Z = [q.., p..]` under `{p, q} = 1`.
pub fn canonicity_residual<F>(coords: &[F], z: &[f64], cfg: &BracketConfig) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let m = coords.len() / 2;
    let mut worst: f64 = 0.0;
    for a in 0..coords.len() {
        for b in (a + 1)..coords.len() {
            // Only {p_k, q_k} = 1 is nonzero; with a < b that appears as {q_k, p_k} = -1.
            let want = if b == a + m { -1.0 } else { 0.0 };
            let v = poisson_bracket(&coords[a], &coords[b], z, cfg)?;
            worst = worst.max((v - want).abs());
        }
    }
    Ok(worst)
}

fn brackets_suite(samples: usize, seed: u64, opts: &SuiteOptions) -> Result<Vec<Check>> {
    let g = SWEEP_COUPLING;
    let exec = opts.execution;
    let fd = BracketConfig::finite_difference(DEFAULT_FD_STEP)?;
    let an = BracketConfig::analytic();

    let fd_names: Vec<String> = BRACKET_NAMES.iter().map(|n| format!("fd_{n}")).collect();
    let an_names: Vec<String> = BRACKET_NAMES
        .iter()
        .map(|n| format!("analytic_{n}"))
        .collect();
    let names: Vec<&str> = fd_names
        .iter()
        .chain(&an_names)
        .map(String::as_str)
        .collect();
    let mut tols = vec![tol_or(opts, 1e-4); 6];
    tols.extend([tol_or(opts, 1e-7); 6]);
    let mut checks = sweep(&names, &tols, samples, seed, exec, |rng| {
        let s = random_polar_state(rng, WALL_MARGIN);
        let mut out = relation_columns(&bracket_relations_report(&s, g, &fd)?);
        out.extend(relation_columns(&bracket_relations_report(&s, g, &an)?));
        Ok(out)
    });

    let rs4 = root_system(4)?;
    let ctol = tol_or(opts, 1e-6);
    checks.extend(sweep(
        &["canonical_polar", "canonical_b13", "canonical_a_frame"],
        &[ctol; 3],
        samples,
        seed,
        exec,
        |rng| {
            let s = random_polar_state(rng, WALL_MARGIN);
            let red = reduced_from_polar(&s)?;
            let z2 = [red.y.clone(), red.py.clone()].concat();
            let polar: Vec<_> = (0..4).map(polar_coordinate).collect();
            let r4 = random_reduced_state(rng, &rs4, WALL_MARGIN)?;
            let z3 = [r4.y.clone(), r4.py.clone()].concat();
            let b13: Vec<_> = (0..6)
                .map(|i| spherical_coordinate(i, Chart::B13Aligned))
                .collect();
            let af: Vec<_> = (0..6)
                .map(|i| spherical_coordinate(i, Chart::AFrame))
                .collect();
            Ok(vec![
                canonicity_residual(&polar, &z2, &fd)?,
                canonicity_residual(&b13, &z3, &fd)?,
                canonicity_residual(&af, &z3, &fd)?,
            ])
        },
    ));
    Ok(checks)
}

// ------------------------------------------------------------------- ksq

pub fn ksq_worked_point() -> PolarState {
    PolarState {
        r: 1.0,
        phi: PI / 12.0,
        p_r: 1.0,
        p_phi: 0.0,
    }
}

fn ksq_suite(samples: usize, seed: u64, opts: &SuiteOptions) -> Result<(Vec<Check>, WorkedPoint)> {
    let g = SWEEP_COUPLING;
    let tol = tol_or(opts, 1e-9);
    let mut checks = sweep(&["ksq"], &[tol], samples, seed, opts.execution, |rng| {
        let s = random_polar_state(rng, WALL_MARGIN);
        Ok(vec![ksq_residual(&observables(&s, g)?, g)])
    });
    let o = observables(&ksq_worked_point(), g)?;
    let worked = WorkedPoint {
        lhs: o.k_integral.powi(2) + 2.0 * o.i_angular * o.f_integral.powi(2),
        rhs: 8.0 * o.h_reduced.powi(3) * (2.0 * o.i_angular - 9.0 * g),
    };
    let gap = rel_diff(worked.lhs, KSQ_WORKED_VALUE).max(rel_diff(worked.rhs, KSQ_WORKED_VALUE));
    checks.push(Check::single("ksq_worked_point", gap, tol, true));
    Ok((checks, worked))
}

// ------------------------------------------------------------ dynamics

/// Angular distance from every collision wall kept by [`bounded_start`],
/// reduced for larger `N` by [`feasible_margin`].
pub const START_MARGIN: f64 = 0.25;

/// Initial radius of [`bounded_start`]. The flow is invariant under
/// `y → λy, p → p/λ, t → λ²t`, so this fixes the time unit that `dt` is
/// measured against.
pub const START_RADIUS: f64 = 2.0;

/// Upper bound on kinetic over potential energy for [`bounded_start`].
pub const START_KINETIC_FRACTION: f64 = 0.25;

/// A seeded reduced start at radius [`START_RADIUS`], at least [`START_MARGIN`] from every
/// wall. Kinetic energy stays below [`START_KINETIC_FRACTION`] of the potential. For three
/// particles `|F|` and `|K|` are also kept away from zero so relative drifts are meaningful.
pub fn bounded_start(n: usize, g: f64, seed: u64) -> Result<ReducedPhaseState> {
    if g <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "bounded starts need a repulsive coupling, got g = {g}"
        )));
    }
    let rs = root_system(n)?;
    let margin = feasible_margin(n, START_MARGIN);
    let mut rng = sample_rng(seed, 0);
    for _ in 0..10_000 {
        let y: Vec<f64> = random_direction(&mut rng, &rs, margin)?
            .iter()
            .map(|c| START_RADIUS * c)
            .collect();
        let py: Vec<f64> = (0..rs.dim()).map(|_| normal(&mut rng)).collect();
        let state = ReducedPhaseState { y, py };
        let kinetic = 0.5 * dot(&state.py, &state.py);
        let energy = energy_reduced(&state, &rs, g)?;
        if kinetic > START_KINETIC_FRACTION * (energy - kinetic) {
            continue;
        }
        if n == 3 {
            let o = observables(&polar_from_reduced(&state)?, g)?;
            if o.f_integral.abs() < 0.1 || o.k_integral.abs() < 0.1 {
                continue;
            }
        }
        return Ok(state);
    }
    Err(Error::InvalidParameter(format!(
        "no bounded start found for seed {seed}"
    )))
}

/// Leapfrog run of the reduced system from [`bounded_start`], monitoring the
/// conserved quantities available at this `N`.
pub fn conservation_run(
    n: usize,
    g: f64,
    seed: u64,
    dt: f64,
    steps: usize,
    record_stride: usize,
) -> Result<(Trajectory, ConservationReport)> {
    let params = ModelParams::new(n, g)?;
    let start = bounded_start(n, g, seed)?;
    let mut monitors = vec![Observable::HReduced, Observable::IAngular];
    if n == 3 {
        monitors.extend([Observable::FIntegral, Observable::KIntegral]);
    }
    let cfg = IntegrationConfig::leapfrog(dt, steps, record_stride).with_monitors(monitors);
    let traj = integrate(InitialState::Reduced(start), &params, &cfg)?;
    let report = conservation_report(&traj)?;
    Ok((traj, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(seed: u64, samples: usize) -> SuiteOptions {
        SuiteOptions {
            seed: Some(seed),
            samples: Some(samples),
            ..Default::default()
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn roots_suite_passes_without_seed() {
        for n in 2..=8 {
            let r = run(
                Suite::Roots,
                &SuiteOptions {
                    n: Some(n),
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn randomized_suites_need_a_seed() {
        for s in [
            Suite::IdentitiesN3,
            Suite::AngularN4,
            Suite::Brackets,
            Suite::Ksq,
        ] {
            assert!(matches!(
                run(s, &SuiteOptions::default()),
                Err(Error::InvalidParameter(_))
            ));
        }
    }

    #[test]
    fn fixed_size_suites_reject_other_n() {
        let mut o = opts(1, 4);
        o.n = Some(5);
        assert!(run(Suite::Ksq, &o).is_err());
    }

    #[test]
    fn reports_do_not_depend_on_execution() {
        let mut o = opts(11, 40);
        let a = run(Suite::IdentitiesN3, &o).unwrap();
        o.execution = Execution::Sequential;
        let b = run(Suite::IdentitiesN3, &o).unwrap();
        assert_eq!(a, b);
        assert!(a.passed, "{a:?}");
    }

    #[test]
    fn worked_point_is_exact() {
        let r = run(Suite::Ksq, &opts(3, 20)).unwrap();
        let w = r.ksq_worked_point.unwrap();
        assert!((w.lhs - KSQ_WORKED_VALUE).abs() < 1e-8);
        assert!((w.rhs - KSQ_WORKED_VALUE).abs() < 1e-8);
        assert!(r.passed);
    }

    #[test]
    fn sweep_tracks_worst_sample_and_errors() {
        let c = sweep(&["x"], &[0.5], 5, 0, Execution::Sequential, |rng| {
            let v = normal(rng);
            if v > 10.0 {
                Err(Error::singular("never"))
            } else {
                Ok(vec![v])
            }
        });
        assert_eq!(c[0].errors, 0);
        let direct: Vec<f64> = (0..5)
            .map(|i| normal(&mut sample_rng(0, i)).abs())
            .collect();
        let max = direct.iter().cloned().fold(0.0, f64::max);
        assert_eq!(c[0].max_residual, max);
        assert_eq!(direct[c[0].worst_sample.unwrap()], max);
    }

    #[test]
    fn bounded_start_is_repeatable() {
        let a = bounded_start(3, 1.0, 5).unwrap();
        assert_eq!(a, bounded_start(3, 1.0, 5).unwrap());
        assert!(bounded_start(3, 0.0, 5).is_err());
    }
}
