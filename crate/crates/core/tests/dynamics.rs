//! Structural properties of the integrators on full trajectories.

use calogero::charts::polar_from_reduced;
use calogero::dynamics::{
    integrate, integrate_many, InitialState, IntegrationConfig, Integrator, Observable, Trajectory,
};
use calogero::error::Error;
use calogero::hamiltonians::angular_closed_n3;
use calogero::par::Execution;
use calogero::verify::{bounded_start, conservation_run};
use calogero::{ModelParams, PhaseState, ReducedPhaseState};

fn final_state(traj: &Trajectory) -> (Vec<f64>, Vec<f64>) {
    let last = traj.samples.last().unwrap();
    (last.q.clone(), last.p.clone())
}

fn flow(z: &[f64], n: usize, g: f64, dt: f64, steps: usize) -> Vec<f64> {
    let d = z.len() / 2;
    let init =
        InitialState::Reduced(ReducedPhaseState::new(z[..d].to_vec(), z[d..].to_vec()).unwrap());
    let params = ModelParams::new(n, g).unwrap();
    let cfg = IntegrationConfig::leapfrog(dt, steps, steps).with_monitors(vec![]);
    let (q, p) = final_state(&integrate(init, &params, &cfg).unwrap());
    [q, p].concat()
}

#[test]
fn leapfrog_flow_is_symplectic() {
    let start = bounded_start(3, 1.0, 3).unwrap();
    let z0 = [start.y.clone(), start.py.clone()].concat();
    let dim = z0.len();
    let h = 1e-6;
    // Central-difference Jacobian of the flow map, column by column.
    let mut jac = vec![vec![0.0; dim]; dim];
    for c in 0..dim {
        let (mut up, mut down) = (z0.clone(), z0.clone());
        up[c] += h;
        down[c] -= h;
        let (fu, fd) = (flow(&up, 3, 1.0, 1e-3, 200), flow(&down, 3, 1.0, 1e-3, 200));
        for r in 0..dim {
            jac[r][c] = (fu[r] - fd[r]) / (2.0 * h);
        }
    }
    let m = dim / 2;
    let omega = |r: usize, c: usize| {
        if c == r + m {
            1.0
        } else if r == c + m {
            -1.0
        } else {
            0.0
        }
    };
    for r in 0..dim {
        for c in 0..dim {
            let v: f64 = (0..dim)
                .flat_map(|i| (0..dim).map(move |j| (i, j)))
                .map(|(i, j)| jac[i][r] * omega(i, j) * jac[j][c])
                .sum();
            assert!((v - omega(r, c)).abs() < 1e-8, "JᵀΩJ[{r}][{c}] = {v}");
        }
    }
}

#[test]
fn free_motion_is_affine() {
    let init = PhaseState::new(vec![0.0, 0.3, -0.2, 1.1], vec![0.5, -1.0, 2.0, 0.0]).unwrap();
    let params = ModelParams::new(4, 0.0).unwrap();
    let cfg = IntegrationConfig::leapfrog(1e-3, 5000, 250);
    let traj = integrate(InitialState::Lab(init.clone()), &params, &cfg).unwrap();
    for s in &traj.samples {
        for k in 0..4 {
            assert!((s.q[k] - (init.x[k] + init.p[k] * s.t)).abs() < 1e-12);
            assert_eq!(s.p[k], init.p[k]);
        }
    }
}

#[test]
fn forward_then_reversed_returns_home() {
    for n in [3, 4, 5] {
        let start = bounded_start(n, 1.0, 9).unwrap();
        let params = ModelParams::new(n, 1.0).unwrap();
        let cfg = IntegrationConfig::leapfrog(1e-3, 4000, 4000).with_monitors(vec![]);
        let fwd = integrate(InitialState::Reduced(start.clone()), &params, &cfg).unwrap();
        let (q, p) = final_state(&fwd);
        let back_init = ReducedPhaseState::new(q, p.iter().map(|v| -v).collect()).unwrap();
        let back = integrate(InitialState::Reduced(back_init), &params, &cfg).unwrap();
        let (q2, p2) = final_state(&back);
        for k in 0..start.dim() {
            assert!((q2[k] - start.y[k]).abs() < 1e-9, "n={n}");
            assert!((p2[k] + start.py[k]).abs() < 1e-9, "n={n}");
        }
    }
}

#[test]
fn monitored_i_equals_polar_closed_form() {
    let start = bounded_start(3, 1.0, 4).unwrap();
    let params = ModelParams::new(3, 1.0).unwrap();
    let cfg = IntegrationConfig::leapfrog(1e-3, 2000, 100);
    let traj = integrate(InitialState::Reduced(start), &params, &cfg).unwrap();
    for s in &traj.samples {
        let polar =
            polar_from_reduced(&ReducedPhaseState::new(s.q.clone(), s.p.clone()).unwrap()).unwrap();
        let closed = angular_closed_n3(polar.phi, polar.p_phi, 1.0).unwrap();
        let monitored = s.observables[&Observable::IAngular];
        assert!((closed - monitored).abs() <= 1e-10 * closed.abs().max(1.0));
    }
}

#[test]
fn lab_and_reduced_runs_agree() {
    let lab = PhaseState::new(vec![-1.0, 0.1, 1.3], vec![0.2, -0.1, 0.4]).unwrap();
    let params = ModelParams::new(3, 1.0).unwrap();
    let split = calogero::com_split(&lab, &params).unwrap();
    let cfg = IntegrationConfig::leapfrog(1e-3, 3000, 3000);
    let a = integrate(InitialState::Lab(lab), &params, &cfg).unwrap();
    let b = integrate(InitialState::Reduced(split.reduced), &params, &cfg).unwrap();
    let (la, lb) = (a.samples.last().unwrap(), b.samples.last().unwrap());
    for o in [
        Observable::HReduced,
        Observable::IAngular,
        Observable::FIntegral,
        Observable::KIntegral,
    ] {
        let (x, y) = (la.observables[&o], lb.observables[&o]);
        assert!(
            (x - y).abs() <= 1e-9 * x.abs().max(1.0),
            "{o:?}: {x} vs {y}"
        );
    }
    let h_full = la.observables[&Observable::HFull];
    assert!(
        (h_full - la.observables[&Observable::HReduced] - 0.5 * split.p0 * split.p0).abs() < 1e-9
    );
}

/// Not a gate on RK4: prints both energy-error histories. The unconfined
/// system scatters, so once the particles separate neither error grows; the
/// leapfrog error must simply stay bounded.
#[test]
fn rk4_reference_comparison() {
    let start = bounded_start(3, 1.0, 2).unwrap();
    let params = ModelParams::new(3, 1.0).unwrap();
    let lf = IntegrationConfig::leapfrog(2e-2, 40_000, 100);
    let rk = lf.clone().with_integrator(Integrator::Rk4Reference);
    // Largest |H̃(t) - H̃(0)| over each quarter of the run.
    let quarters = |cfg: &IntegrationConfig| {
        let t = integrate(InitialState::Reduced(start.clone()), &params, cfg).unwrap();
        let h: Vec<f64> = t
            .samples
            .iter()
            .map(|s| s.observables[&Observable::HReduced])
            .collect();
        let q = h.len() / 4;
        (0..4)
            .map(|k| {
                h[k * q..(k + 1) * q]
                    .iter()
                    .map(|v| (v - h[0]).abs())
                    .fold(0.0, f64::max)
            })
            .collect::<Vec<f64>>()
    };
    let (a, b) = (quarters(&lf), quarters(&rk));
    eprintln!("per-quarter |ΔH̃| at dt = 2e-2: leapfrog {a:?}, rk4 {b:?}");
    assert!(a[3] <= 2.0 * a[0], "leapfrog error should not grow");
    assert!(b.iter().all(|v| v.is_finite()));
}

#[test]
fn batch_integration_is_order_stable() {
    let params = ModelParams::new(3, 1.0).unwrap();
    let inits: Vec<InitialState> = (0..6)
        .map(|s| InitialState::Reduced(bounded_start(3, 1.0, s).unwrap()))
        .collect();
    let cfg = IntegrationConfig::leapfrog(1e-3, 500, 50);
    let par = integrate_many(inits.clone(), &params, &cfg, Execution::Parallel);
    let seq = integrate_many(inits, &params, &cfg, Execution::Sequential);
    for (a, b) in par.into_iter().zip(seq) {
        assert_eq!(a.unwrap(), b.unwrap());
    }
}

#[test]
fn attractive_collision_keeps_partial_trajectory() {
    let init = PhaseState::new(vec![-0.5, 0.5], vec![0.5, -0.5]).unwrap();
    let params = ModelParams::new(2, -0.1).unwrap();
    let cfg = IntegrationConfig::leapfrog(1e-3, 10_000, 10);
    match integrate(InitialState::Lab(init), &params, &cfg) {
        Err(Error::IntegrationAborted {
            time,
            pair,
            partial,
            last_good,
        }) => {
            assert_eq!(pair, (1, 2));
            assert!(time > 0.0 && time < 10.0);
            assert!(!partial.samples.is_empty());
            assert!(partial.samples.last().unwrap().t <= time);
            assert!(last_good.q[0] < last_good.q[1]);
        }
        other => panic!("expected abort, got {other:?}"),
    }
}

#[test]
fn short_conservation_run_is_tight() {
    let (_, rep) = conservation_run(3, 1.0, 1, 1e-4, 10_000, 100).unwrap();
    assert!(rep[&Observable::HReduced].max_rel_drift < 1e-7, "{rep:?}");
    for o in [
        Observable::IAngular,
        Observable::FIntegral,
        Observable::KIntegral,
    ] {
        assert!(rep[&o].max_rel_drift < 1e-5, "{o:?} {:?}", rep[&o]);
    }
}
