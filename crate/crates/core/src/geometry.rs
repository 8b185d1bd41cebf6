//! Center-of-mass (Jacobi) coordinates, the A_{N-1} root vectors they induce,
//! and the polyhedral structures of the four-particle case.
//!
//! Particles are labelled `1..=N` in every public type. The Jacobi matrix is
//! stored row-per-particle, with column 0 the center-of-mass direction.

use serde::Serialize;

use crate::error::{Error, PairLabel, Result};
use crate::linalg::{cross, dot, norm, Vec3};

/// Tolerance for orthonormality of constructed bases.
pub const ORTHO_TOL: f64 = 1e-12;

/// Cosine threshold used to pick cuboctahedron edges out of all vertex pairs.
pub const EDGE_COS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub n_particles: usize,
    /// Pair coupling `g`. The Higgs frequency of the angular system is `√g`.
    pub coupling: f64,
}

impl ModelParams {
    /// Validated constructor. Non-positive couplings are accepted for
    /// evaluation; see [`ModelParams::is_repulsive`].
    pub fn new(n_particles: usize, coupling: f64) -> Result<Self> {
        if n_particles < 2 {
            return Err(Error::InvalidParameter(format!(
                "n_particles must be >= 2, got {n_particles}"
            )));
        }
        if !coupling.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "coupling must be finite, got {coupling}"
            )));
        }
        Ok(Self {
            n_particles,
            coupling,
        })
    }

    pub fn is_repulsive(&self) -> bool {
        self.coupling > 0.0
    }

    pub fn higgs_frequency(&self) -> f64 {
        self.coupling.sqrt()
    }

    pub fn reduced_dim(&self) -> usize {
        self.n_particles - 1
    }
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidParameter(format!(
            "particle count must be >= 2, got {n}"
        )))
    } else {
        Ok(())
    }
}

/// The orthogonal matrix `A` with `x = A·y`; `A[k][m]` is particle `k+1`,
/// Jacobi coordinate `m`. `y = Aᵀ·x` inverts it.
pub fn jacobi_matrix(n: usize) -> Result<Vec<Vec<f64>>> {
    check_n(n)?;
    let nf = n as f64;
    let mut a = vec![vec![0.0; n]; n];
    for (row, entries) in a.iter_mut().enumerate() {
        let k = row + 1;
        for (m, entry) in entries.iter_mut().enumerate() {
            *entry = if m == 0 {
                1.0 / nf.sqrt()
            } else if k > m {
                let (nm1, nm) = ((n - m + 1) as f64, (n - m) as f64);
                -1.0 / (nm1 * nm).sqrt()
            } else if k == m {
                ((n - k) as f64).sqrt() / ((n - k + 1) as f64).sqrt()
            } else {
                0.0
            };
        }
    }
    Ok(a)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootEntry {
    pub pair: PairLabel,
    pub vector: Vec<f64>,
}

/// The N(N-1)/2 positive roots `b^{ij}`, `i < j`, as unit vectors in the
/// reduced (N-1)-dimensional space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSystem {
    n: usize,
    entries: Vec<RootEntry>,
}

impl RootSystem {
    pub fn n_particles(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n - 1
    }

    pub fn entries(&self) -> &[RootEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RootEntry> {
        self.entries.iter()
    }

    /// Index of `pair` in lexicographic order.
    pub fn index_of(&self, pair: PairLabel) -> Result<usize> {
        let (i, j) = pair;
        if i < 1 || j > self.n || i >= j {
            return Err(Error::InvalidInput(format!(
                "pair {pair:?} is not a positive root of A_{}",
                self.n - 1
            )));
        }
        // Rows of the upper triangle: row i contributes n - i entries.
        let before: usize = (1..i).map(|r| self.n - r).sum();
        Ok(before + (j - i - 1))
    }

    pub fn vector(&self, pair: PairLabel) -> Result<&[f64]> {
        Ok(&self.entries[self.index_of(pair)?].vector)
    }

    /// `b^a · y` for every root, in entry order.
    pub fn projections(&self, y: &[f64]) -> Vec<f64> {
        self.entries.iter().map(|e| dot(&e.vector, y)).collect()
    }

    /// Full cosine (Gram) matrix in entry order.
    pub fn cosine_matrix(&self) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|a| {
                self.entries
                    .iter()
                    .map(|b| dot(&a.vector, &b.vector))
                    .collect()
            })
            .collect()
    }
}

/// Builds `b^{ij}_k = (A_{ik} - A_{jk}) / √2` for `k = 1..N-1`.
pub fn root_system(n: usize) -> Result<RootSystem> {
    let a = jacobi_matrix(n)?;
    let mut entries = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let vector = (1..n)
                .map(|k| (a[i][k] - a[j][k]) / std::f64::consts::SQRT_2)
                .collect();
            entries.push(RootEntry {
                pair: (i + 1, j + 1),
                vector,
            });
        }
    }
    Ok(RootSystem { n, entries })
}

pub fn pairwise_cosine(rs: &RootSystem, a: PairLabel, b: PairLabel) -> Result<f64> {
    Ok(dot(rs.vector(a)?, rs.vector(b)?))
}

/// `(δ_ii' + δ_jj' - δ_ij' - δ_i'j) / 2`.
pub fn expected_cosine(a: PairLabel, b: PairLabel) -> f64 {
    let d = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
    let ((i, j), (k, l)) = (a, b);
    0.5 * (d(i, k) + d(j, l) - d(i, l) - d(k, j))
}

/// Three orthonormal axes in the reduced space of the four-particle system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Frame3 {
    pub axes: [Vec3; 3],
}

impl Frame3 {
    /// Components of `v` along the three axes.
    pub fn to_frame(&self, v: &[f64]) -> Vec3 {
        [
            dot(&self.axes[0], v),
            dot(&self.axes[1], v),
            dot(&self.axes[2], v),
        ]
    }

    pub fn from_frame(&self, c: &Vec3) -> Vec3 {
        let mut out = [0.0; 3];
        for (axis, ci) in self.axes.iter().zip(c) {
            for (o, a) in out.iter_mut().zip(axis) {
                *o += a * ci;
            }
        }
        out
    }

    pub fn max_orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(&self.axes[i], &self.axes[j]) - want).abs());
            }
        }
        worst
    }
}

fn require_n4(rs: &RootSystem) -> Result<()> {
    if rs.n_particles() != 4 {
        return Err(Error::InvalidInput(format!(
            "four-particle root system required, got N = {}",
            rs.n_particles()
        )));
    }
    Ok(())
}

fn vec3_of(rs: &RootSystem, pair: PairLabel) -> Result<Vec3> {
    let v = rs.vector(pair)?;
    Ok([v[0], v[1], v[2]])
}

/// `a_1 = b^{12}×b^{34}`, `a_2 = b^{13}×b^{24}`, `a_3 = b^{14}×b^{23}`.
///
/// Each defining pair is orthogonal, so the cross products are already unit.
pub fn orthogonal_frame(rs: &RootSystem) -> Result<Frame3> {
    require_n4(rs)?;
    let mut axes = [[0.0; 3]; 3];
    for (axis, (p, q)) in
        axes.iter_mut()
            .zip([((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3))])
    {
        *axis = cross(&vec3_of(rs, p)?, &vec3_of(rs, q)?);
    }
    Ok(Frame3 { axes })
}

/// A cuboctahedron vertex together with the root it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Vertex {
    pub position: Vec3,
    pub pair: PairLabel,
    /// `+1` for `b^{ij}`, `-1` for `-b^{ij}`.
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cuboctahedron {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(usize, usize)>,
    /// Counter-clockwise seen from outside.
    pub triangles: Vec<[usize; 3]>,
    /// Counter-clockwise seen from outside.
    pub squares: Vec<[usize; 4]>,
}

impl Cuboctahedron {
    pub fn face_count(&self) -> usize {
        self.triangles.len() + self.squares.len()
    }
}

/// The six roots of `A_3` followed by their negatives.
pub fn cuboctahedron_vertices() -> Vec<Vec3> {
    cuboctahedron()
        .vertices
        .iter()
        .map(|v| v.position)
        .collect()
}

pub fn cuboctahedron() -> Cuboctahedron {
    let rs = root_system(4).expect("N = 4 is valid");
    let frame = orthogonal_frame(&rs).expect("N = 4 root system");

    let mut vertices: Vec<Vertex> = Vec::with_capacity(12);
    for sign in [1i8, -1] {
        for e in rs.iter() {
            let s = f64::from(sign);
            vertices.push(Vertex {
                position: [s * e.vector[0], s * e.vector[1], s * e.vector[2]],
                pair: e.pair,
                sign,
            });
        }
    }

    let pos: Vec<Vec3> = vertices.iter().map(|v| v.position).collect();
    let adjacent = |i: usize, j: usize| (dot(&pos[i], &pos[j]) - 0.5).abs() < EDGE_COS_TOL;

    let mut edges = Vec::new();
    for i in 0..pos.len() {
        for j in (i + 1)..pos.len() {
            if adjacent(i, j) {
                edges.push((i, j));
            }
        }
    }

    let mut triangles = Vec::new();
    for &(i, j) in &edges {
        for k in (j + 1)..pos.len() {
            if adjacent(i, k) && adjacent(j, k) {
                triangles.push(orient_outward([i, j, k], &pos));
            }
        }
    }

    // Each square is the set of four vertices furthest along ±a_i.
    let mut squares = Vec::new();
    for axis in &frame.axes {
        for s in [1.0, -1.0] {
            let normal = [s * axis[0], s * axis[1], s * axis[2]];
            let members: Vec<usize> = (0..pos.len())
                .filter(|&i| dot(&pos[i], &normal) > 0.5)
                .collect();
            debug_assert_eq!(members.len(), 4);
            let mut quad = [members[0], members[1], members[2], members[3]];
            sort_ccw(&mut quad, &normal, &pos);
            squares.push(quad);
        }
    }

    Cuboctahedron {
        vertices,
        edges,
        triangles,
        squares,
    }
}

fn orient_outward(mut tri: [usize; 3], pos: &[Vec3]) -> [usize; 3] {
    let (a, b, c) = (pos[tri[0]], pos[tri[1]], pos[tri[2]]);
    let n = cross(&sub(&b, &a), &sub(&c, &a));
    let centroid = [a[0] + b[0] + c[0], a[1] + b[1] + c[1], a[2] + b[2] + c[2]];
    if dot(&n, &centroid) < 0.0 {
        tri.swap(1, 2);
    }
    tri
}

fn sort_ccw(quad: &mut [usize; 4], normal: &Vec3, pos: &[Vec3]) {
    let first = pos[quad[0]];
    let u = {
        let along = dot(&first, normal);
        let raw = [
            first[0] - along * normal[0],
            first[1] - along * normal[1],
            first[2] - along * normal[2],
        ];
        let len = norm(&raw);
        [raw[0] / len, raw[1] / len, raw[2] / len]
    };
    let w = cross(normal, &u);
    let angle = |i: usize| dot(&pos[i], &w).atan2(dot(&pos[i], &u));
    quad.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)));
}

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
