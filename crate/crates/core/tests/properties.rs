//! Property tests for coordinate and energy invariants.

use calogero::charts::{
    polar_from_reduced, reduced_from_polar, reduced_from_spherical, spherical_from_reduced, Chart,
};
use calogero::geometry::{cuboctahedron_vertices, jacobi_matrix, root_system, ModelParams};
use calogero::hamiltonians::{
    angular_energy_cartesian, angular_potential, energy_full, energy_reduced, higgs_split,
    potential_full, potential_reduced,
};
use calogero::linalg::{dot, norm};
use calogero::{com_join, com_split, PhaseState, ReducedPhaseState};
use proptest::prelude::*;

/// Positions with every gap at least `0.05`, in random order, plus momenta.
fn separated_state(n: usize) -> impl Strategy<Value = PhaseState> {
    (
        prop::collection::vec(0.05f64..1.0, n),
        Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        -3.0f64..3.0,
        prop::collection::vec(-2.0f64..2.0, n),
    )
        .prop_map(|(gaps, order, shift, p)| {
            let mut sorted = Vec::with_capacity(gaps.len());
            let mut acc = shift;
            for g in gaps {
                acc += g;
                sorted.push(acc);
            }
            let x = order.iter().map(|&k| sorted[k]).collect();
            PhaseState::new(x, p).unwrap()
        })
}

fn state_with_n() -> impl Strategy<Value = PhaseState> {
    (2usize..=8).prop_flat_map(separated_state)
}

fn permutation_matrix_action(perm: &[usize], v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for (i, &j) in perm.iter().enumerate() {
        out[j] = v[i];
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jacobi_matrix_is_orthogonal(n in 2usize..=16) {
        let a = jacobi_matrix(n).unwrap();
        for i in 0..n {
            for j in 0..n {
                let row: f64 = (0..n).map(|k| a[i][k] * a[j][k]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((row - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn energy_splits_into_com_and_reduced(state in state_with_n(), g in 0.1f64..3.0) {
        let n = state.n_particles();
        let params = ModelParams::new(n, g).unwrap();
        let split = com_split(&state, &params).unwrap();
        let rs = root_system(n).unwrap();
        let total = energy_full(&state, &params).unwrap();
        let parts = 0.5 * split.p0 * split.p0 + energy_reduced(&split.reduced, &rs, g).unwrap();
        prop_assert!((total - parts).abs() <= 1e-10 * total.abs().max(1.0));
        let v_lab = potential_full(&state.x, g).unwrap();
        let v_red = potential_reduced(&split.reduced.y, &rs, g).unwrap();
        prop_assert!((v_lab - v_red).abs() <= 1e-10 * v_lab.abs().max(1.0));
    }

    #[test]
    fn com_split_round_trips(state in state_with_n()) {
        let params = ModelParams::new(state.n_particles(), 1.0).unwrap();
        let split = com_split(&state, &params).unwrap();
        let back = com_join(split.y0, split.p0, &split.reduced).unwrap();
        for k in 0..state.n_particles() {
            prop_assert!((back.x[k] - state.x[k]).abs() < 1e-12);
            prop_assert!((back.p[k] - state.p[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn potential_is_permutation_invariant(
        state in (3usize..=7).prop_flat_map(separated_state),
        seed in any::<u64>(),
    ) {
        let n = state.n_particles();
        let mut perm: Vec<usize> = (0..n).collect();
        // A deterministic shuffle driven by the seed.
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let moved = permutation_matrix_action(&perm, &state.x);
        let a = potential_full(&state.x, 1.3).unwrap();
        let b = potential_full(&moved, 1.3).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn higgs_split_matches_potential(n in 3usize..=6, raw in prop::collection::vec(-1.0f64..1.0, 5)) {
        let rs = root_system(n).unwrap();
        let v = &raw[..n - 1];
        let len = norm(v);
        prop_assume!(len > 1e-3);
        let dir: Vec<f64> = v.iter().map(|c| c / len).collect();
        prop_assume!(rs.projections(&dir).iter().all(|c| c.abs() > 0.05));
        let split = higgs_split(&dir, &rs, 0.7).unwrap();
        let pot = angular_potential(&dir, &rs, 0.7).unwrap();
        prop_assert!((split.total() - pot).abs() <= 1e-12 * pot.max(1.0));
    }

    #[test]
    fn polar_chart_round_trips(
        y in prop::collection::vec(-2.0f64..2.0, 2),
        p in prop::collection::vec(-2.0f64..2.0, 2),
    ) {
        prop_assume!(norm(&y) > 1e-3);
        let s = ReducedPhaseState::new(y, p).unwrap();
        let back = reduced_from_polar(&polar_from_reduced(&s).unwrap()).unwrap();
        for k in 0..2 {
            prop_assert!((back.y[k] - s.y[k]).abs() < 1e-12);
            prop_assert!((back.py[k] - s.py[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn spherical_charts_round_trip(
        y in prop::collection::vec(-2.0f64..2.0, 3),
        p in prop::collection::vec(-2.0f64..2.0, 3),
        a_frame in any::<bool>(),
    ) {
        let chart = if a_frame { Chart::AFrame } else { Chart::B13Aligned };
        prop_assume!(norm(&y) > 1e-2);
        let s = ReducedPhaseState::new(y, p).unwrap();
        let sph = match spherical_from_reduced(&s, chart) {
            Ok(v) => v,
            Err(_) => return Ok(()),
        };
        prop_assume!(sph.theta.sin() > 1e-3);
        let back = reduced_from_spherical(&sph).unwrap();
        for k in 0..3 {
            prop_assert!((back.y[k] - s.y[k]).abs() < 1e-10);
            prop_assert!((back.py[k] - s.py[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn angular_energy_is_rotation_free_part(
        state in (3usize..=6).prop_flat_map(separated_state),
    ) {
        // I = r²(H̃ - p_r²/2).
        let n = state.n_particles();
        let params = ModelParams::new(n, 1.0).unwrap();
        let red = com_split(&state, &params).unwrap().reduced;
        let rs = root_system(n).unwrap();
        let r2 = dot(&red.y, &red.y);
        let pr = dot(&red.y, &red.py) / r2.sqrt();
        let h = energy_reduced(&red, &rs, 1.0).unwrap();
        let i = angular_energy_cartesian(&red, &rs, 1.0).unwrap();
        prop_assert!((i - r2 * (h - 0.5 * pr * pr)).abs() <= 1e-9 * i.abs().max(1.0));
    }
}

/// Every particle permutation acts on the reduced space as an orthogonal map
/// `M = AᵀPA` (restricted to the Jacobi block) that permutes the twelve
/// cuboctahedron vertices.
#[test]
fn s4_permutes_cuboctahedron_vertices() {
    let a = jacobi_matrix(4).unwrap();
    let verts = cuboctahedron_vertices();
    let mut perms = Vec::new();
    let mut p = [0usize, 1, 2, 3];
    heap_permutations(4, &mut p, &mut perms);
    assert_eq!(perms.len(), 24);
    for perm in perms {
        let m: Vec<Vec<f64>> = (1..4)
            .map(|r| {
                (1..4)
                    .map(|c| (0..4).map(|k| a[perm[k]][r] * a[k][c]).sum())
                    .collect()
            })
            .collect();
        for v in &verts {
            let w: Vec<f64> = (0..3).map(|r| dot(&m[r], v)).collect();
            let hit = verts
                .iter()
                .any(|u| (0..3).all(|k| (u[k] - w[k]).abs() < 1e-12));
            assert!(hit, "{perm:?} sends {v:?} off the solid");
        }
    }
}

fn heap_permutations(k: usize, a: &mut [usize; 4], out: &mut Vec<[usize; 4]>) {
    if k == 1 {
        out.push(*a);
        return;
    }
    heap_permutations(k - 1, a, out);
    for i in 0..k - 1 {
        if k.is_multiple_of(2) {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
        heap_permutations(k - 1, a, out);
    }
}
