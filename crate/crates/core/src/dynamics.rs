//! Fixed-step integration of the lab-frame and center-of-mass Calogero
//! systems, with conserved-quantity monitoring.
//!
//! Both Hamiltonians are `½|p|² + V(q)`, so the default integrator is the
//! kick-drift-kick leapfrog. A classical RK4 stepper is kept as a
//! non-symplectic reference.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, PairLabel, Result};
use crate::geometry::{root_system, ModelParams, RootSystem};
use crate::hamiltonians::{
    angular_energy_cartesian, energy_full, energy_reduced, potential_full_gradient,
    potential_reduced_gradient,
};
use crate::integrals::observables_from_reduced;
use crate::linalg::dot;
use crate::par::{map_indexed, Execution};
use crate::state::{com_split, PhaseState, ReducedPhaseState};

/// Integration aborts once a pair gets closer than this, measured as
/// `|b^a·y|` (equivalently `|x_i - x_j|/√2`), or when a step carries a pair
/// across the collision plane.
pub const COLLISION_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// Full lab-frame energy. Lab-frame runs only.
    HFull,
    HReduced,
    IAngular,
    /// Three particles only.
    FIntegral,
    /// Three particles only.
    KIntegral,
    Kinetic,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::HFull => "h_full",
            Observable::HReduced => "h_reduced",
            Observable::IAngular => "i_angular",
            Observable::FIntegral => "f_integral",
            Observable::KIntegral => "k_integral",
            Observable::Kinetic => "kinetic",
        }
    }

    /// The observables a run of this frame and size records by default.
    pub fn defaults(frame: Frame, n_particles: usize) -> Vec<Observable> {
        let mut v = vec![Observable::HReduced, Observable::IAngular];
        if n_particles == 3 {
            v.extend([Observable::FIntegral, Observable::KIntegral]);
        }
        if frame == Frame::Lab {
            v.insert(0, Observable::HFull);
        }
        v
    }
}

impl std::str::FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "h_full" => Observable::HFull,
            "h_reduced" => Observable::HReduced,
            "i_angular" => Observable::IAngular,
            "f_integral" => Observable::FIntegral,
            "k_integral" => Observable::KIntegral,
            "kinetic" => Observable::Kinetic,
            other => return Err(Error::InvalidInput(format!("unknown observable {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// Coordinates are the particle positions `x_1..x_N`.
    Lab,
    /// Coordinates are the Jacobi coordinates `y_1..y_{N-1}`.
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Leapfrog,
    Rk4Reference,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Lab(PhaseState),
    Reduced(ReducedPhaseState),
}

impl InitialState {
    fn frame(&self) -> Frame {
        match self {
            InitialState::Lab(_) => Frame::Lab,
            InitialState::Reduced(_) => Frame::Reduced,
        }
    }

    fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        match self {
            InitialState::Lab(s) => (s.x, s.p),
            InitialState::Reduced(s) => (s.y, s.py),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub observables: BTreeMap<Observable, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub frame: Frame,
    pub n_particles: usize,
    pub coupling: f64,
    pub dt: f64,
    pub record_stride: usize,
    pub integrator: Integrator,
    pub monitors: Vec<Observable>,
    pub samples: Vec<Sample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationConfig {
    pub dt: f64,
    pub steps: usize,
    pub record_stride: usize,
    pub integrator: Integrator,
    /// `None` records [`Observable::defaults`].
    pub monitors: Option<Vec<Observable>>,
}

impl IntegrationConfig {
    pub fn leapfrog(dt: f64, steps: usize, record_stride: usize) -> Self {
        Self {
            dt,
            steps,
            record_stride,
            integrator: Integrator::Leapfrog,
            monitors: None,
        }
    }

    pub fn with_monitors(mut self, monitors: Vec<Observable>) -> Self {
        self.monitors = Some(monitors);
        self
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }
}

/// The separable system being stepped.
struct System {
    frame: Frame,
    g: f64,
    roots: RootSystem,
}

impl System {
    fn new(frame: Frame, params: &ModelParams) -> Result<Self> {
        Ok(Self {
            frame,
            g: params.coupling,
            roots: root_system(params.n_particles)?,
        })
    }

    fn dim(&self) -> usize {
        match self.frame {
            Frame::Lab => self.roots.n_particles(),
            Frame::Reduced => self.roots.dim(),
        }
    }

    fn potential_gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        match self.frame {
            Frame::Lab => potential_full_gradient(q, self.g),
            Frame::Reduced => potential_reduced_gradient(q, &self.roots, self.g),
        }
    }

    /// Signed pair separations `b^a·y`, in root order.
    fn separations(&self, q: &[f64]) -> Vec<f64> {
        match self.frame {
            Frame::Lab => {
                let mut out = Vec::with_capacity(self.roots.len());
                for i in 0..q.len() {
                    for j in (i + 1)..q.len() {
                        out.push((q[i] - q[j]) / SQRT_2);
                    }
                }
                out
            }
            Frame::Reduced => self.roots.projections(q),
        }
    }

    /// First pair inside [`COLLISION_GUARD`] at `q`, or whose separation changed
    /// sign since `before`. Free particles may pass through each other, so
    /// `g = 0` never trips the guard.
    fn collision(&self, q: &[f64], before: Option<&[f64]>) -> Option<PairLabel> {
        if self.g == 0.0 {
            return None;
        }
        let now = self.separations(q);
        let prev = before.map(|b| self.separations(b));
        self.roots.iter().enumerate().find_map(|(a, e)| {
            let crossed = prev
                .as_ref()
                .is_some_and(|p| p[a].signum() != now[a].signum());
            (now[a].abs() < COLLISION_GUARD || crossed).then_some(e.pair)
        })
    }

    fn reduced(&self, q: &[f64], p: &[f64]) -> Result<ReducedPhaseState> {
        match self.frame {
            Frame::Reduced => Ok(ReducedPhaseState {
                y: q.to_vec(),
                py: p.to_vec(),
            }),
            Frame::Lab => {
                let params = ModelParams::new(self.roots.n_particles(), self.g)?;
                let st = PhaseState {
                    x: q.to_vec(),
                    p: p.to_vec(),
                };
                Ok(com_split(&st, &params)?.reduced)
            }
        }
    }

    fn observe(
        &self,
        q: &[f64],
        p: &[f64],
        which: &[Observable],
    ) -> Result<BTreeMap<Observable, f64>> {
        let reduced = self.reduced(q, p)?;
        let needs_fk = which
            .iter()
            .any(|o| matches!(o, Observable::FIntegral | Observable::KIntegral));
        let fk = if needs_fk {
            Some(observables_from_reduced(&reduced, self.g)?)
        } else {
            None
        };
        let mut out = BTreeMap::new();
        for &o in which {
            let v = match o {
                Observable::HFull => {
                    let params = ModelParams::new(self.roots.n_particles(), self.g)?;
                    energy_full(
                        &PhaseState {
                            x: q.to_vec(),
                            p: p.to_vec(),
                        },
                        &params,
                    )?
                }
                Observable::HReduced => energy_reduced(&reduced, &self.roots, self.g)?,
                Observable::IAngular => angular_energy_cartesian(&reduced, &self.roots, self.g)?,
                Observable::FIntegral => fk.expect("computed above").f_integral,
                Observable::KIntegral => fk.expect("computed above").k_integral,
                Observable::Kinetic => 0.5 * dot(p, p),
            };
            out.insert(o, v);
        }
        Ok(out)
    }

    /// One kick-drift-kick step. Updates use compensated summation, with the
    /// running low-order parts kept in `carry`, so long runs do not pile up
    /// rounding in `q` and `p`.
    fn leapfrog_step(
        &self,
        q: &mut [f64],
        p: &mut [f64],
        carry: &mut Carry,
        dt: f64,
    ) -> Result<Option<PairLabel>> {
        let half = 0.5 * dt;
        let grad = self.potential_gradient(q)?;
        for ((pk, ck), gk) in p.iter_mut().zip(&mut carry.p).zip(&grad) {
            compensated_add(pk, ck, -half * gk);
        }
        let before = q.to_vec();
        for ((qk, ck), pk) in q.iter_mut().zip(&mut carry.q).zip(p.iter()) {
            compensated_add(qk, ck, dt * pk);
        }
        if let Some(pair) = self.collision(q, Some(&before)) {
            return Ok(Some(pair));
        }
        let grad = self.potential_gradient(q)?;
        for ((pk, ck), gk) in p.iter_mut().zip(&mut carry.p).zip(&grad) {
            compensated_add(pk, ck, -half * gk);
        }
        Ok(None)
    }

    fn rk4_step(&self, q: &mut [f64], p: &mut [f64], dt: f64) -> Result<Option<PairLabel>> {
        let n = q.len();
        let before = q.to_vec();
        let deriv = |q: &[f64], p: &[f64]| -> Result<(Vec<f64>, Vec<f64>)> {
            let g = self.potential_gradient(q)?;
            Ok((p.to_vec(), g.into_iter().map(|x| -x).collect()))
        };
        let axpy = |x: &[f64], a: f64, d: &[f64]| -> Vec<f64> {
            x.iter().zip(d).map(|(xi, di)| xi + a * di).collect()
        };
        let (k1q, k1p) = deriv(q, p)?;
        let (k2q, k2p) = deriv(&axpy(q, 0.5 * dt, &k1q), &axpy(p, 0.5 * dt, &k1p))?;
        let (k3q, k3p) = deriv(&axpy(q, 0.5 * dt, &k2q), &axpy(p, 0.5 * dt, &k2p))?;
        let (k4q, k4p) = deriv(&axpy(q, dt, &k3q), &axpy(p, dt, &k3p))?;
        for k in 0..n {
            q[k] += dt / 6.0 * (k1q[k] + 2.0 * k2q[k] + 2.0 * k3q[k] + k4q[k]);
            p[k] += dt / 6.0 * (k1p[k] + 2.0 * k2p[k] + 2.0 * k3p[k] + k4p[k]);
        }
        Ok(self.collision(q, Some(&before)))
    }
}

/// Low-order parts lost by the most recent additions to `q` and `p`.
struct Carry {
    q: Vec<f64>,
    p: Vec<f64>,
}

/// Kahan summation step: `sum += inc`, tracking the rounding error in `comp`.
fn compensated_add(sum: &mut f64, comp: &mut f64, inc: f64) {
    let y = inc - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

fn validate(
    frame: Frame,
    params: &ModelParams,
    cfg: &IntegrationConfig,
    monitors: &[Observable],
) -> Result<()> {
    if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "dt must be > 0, got {}",
            cfg.dt
        )));
    }
    if cfg.steps == 0 {
        return Err(Error::InvalidParameter("steps must be >= 1".into()));
    }
    if cfg.record_stride == 0 {
        return Err(Error::InvalidParameter("record_stride must be >= 1".into()));
    }
    for &m in monitors {
        match m {
            Observable::FIntegral | Observable::KIntegral if params.n_particles != 3 => {
                return Err(Error::InvalidParameter(format!(
                    "{} is defined for three particles only",
                    m.name()
                )));
            }
            Observable::HFull if frame != Frame::Lab => {
                return Err(Error::InvalidParameter(
                    "h_full needs a lab-frame run".into(),
                ));
            }
            _ => {}
        }
    }
    Ok(())
}

pub fn integrate(
    initial: InitialState,
    params: &ModelParams,
    cfg: &IntegrationConfig,
) -> Result<Trajectory> {
    let frame = initial.frame();
    let monitors = cfg
        .monitors
        .clone()
        .unwrap_or_else(|| Observable::defaults(frame, params.n_particles));
    validate(frame, params, cfg, &monitors)?;
    let system = System::new(frame, params)?;
    let (mut q, mut p) = initial.into_parts();
    if q.len() != system.dim() || p.len() != system.dim() {
        return Err(Error::InvalidInput(format!(
            "initial state has dimension {}/{}, expected {}",
            q.len(),
            p.len(),
            system.dim()
        )));
    }
    if let Some(pair) = system.collision(&q, None) {
        return Err(Error::singular_pair(
            pair,
            "initial state inside the collision guard",
        ));
    }

    let mut traj = Trajectory {
        frame,
        n_particles: params.n_particles,
        coupling: params.coupling,
        dt: cfg.dt,
        record_stride: cfg.record_stride,
        integrator: cfg.integrator,
        monitors: monitors.clone(),
        samples: Vec::with_capacity(cfg.steps / cfg.record_stride + 1),
    };
    traj.samples.push(Sample {
        t: 0.0,
        observables: system.observe(&q, &p, &monitors)?,
        q: q.clone(),
        p: p.clone(),
    });

    let mut carry = Carry {
        q: vec![0.0; q.len()],
        p: vec![0.0; p.len()],
    };
    for step in 1..=cfg.steps {
        let (q_prev, p_prev) = (q.clone(), p.clone());
        let hit = match cfg.integrator {
            Integrator::Leapfrog => system.leapfrog_step(&mut q, &mut p, &mut carry, cfg.dt)?,
            Integrator::Rk4Reference => system.rk4_step(&mut q, &mut p, cfg.dt)?,
        };
        if let Some(pair) = hit {
            let time = (step - 1) as f64 * cfg.dt;
            return Err(Error::IntegrationAborted {
                time,
                pair,
                last_good: Box::new(Sample {
                    t: time,
                    q: q_prev,
                    p: p_prev,
                    observables: BTreeMap::new(),
                }),
                partial: Box::new(traj),
            });
        }
        if step % cfg.record_stride == 0 {
            traj.samples.push(Sample {
                t: step as f64 * cfg.dt,
                observables: system.observe(&q, &p, &monitors)?,
                q: q.clone(),
                p: p.clone(),
            });
        }
    }
    Ok(traj)
}

/// Integrates independent initial states, in parallel when available.
pub fn integrate_many(
    initials: Vec<InitialState>,
    params: &ModelParams,
    cfg: &IntegrationConfig,
    exec: Execution,
) -> Vec<Result<Trajectory>> {
    map_indexed(initials.len(), exec, |i| {
        integrate(initials[i].clone(), params, cfg)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Drift {
    pub initial: f64,
    pub max_abs_drift: f64,
    pub max_rel_drift: f64,
}

pub type ConservationReport = BTreeMap<Observable, Drift>;

/// Maximum deviation of every monitored observable from its initial value.
pub fn conservation_report(traj: &Trajectory) -> Result<ConservationReport> {
    conservation_report_for(traj, &traj.monitors)
}

pub fn conservation_report_for(
    traj: &Trajectory,
    which: &[Observable],
) -> Result<ConservationReport> {
    if traj.samples.len() < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    let mut report = BTreeMap::new();
    for &o in which {
        let series: Vec<f64> = traj
            .samples
            .iter()
            .map(|s| {
                s.observables.get(&o).copied().ok_or_else(|| {
                    Error::InvalidInput(format!("observable {} not recorded", o.name()))
                })
            })
            .collect::<Result<_>>()?;
        let initial = series[0];
        let max_abs = series
            .iter()
            .map(|v| (v - initial).abs())
            .fold(0.0, f64::max);
        report.insert(
            o,
            Drift {
                initial,
                max_abs_drift: max_abs,
                max_rel_drift: max_abs / initial.abs().max(1e-12),
            },
        );
    }
    Ok(report)
}
