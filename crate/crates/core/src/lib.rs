//! Center-of-mass reduction of the rational Calogero model and its angular
//! part, a multi-center Higgs oscillator on the (N-2)-sphere.
//!
//! * [`geometry`]: Jacobi coordinates, `A_{N-1}` root vectors, the
//!   cuboctahedron and its square-normal frame.
//! * [`hamiltonians`]: energies from the lab frame down to the sphere.
//! * [`charts`]: canonical polar/spherical charts on the reduced phase space.
//! * [`integrals`]: the three-particle integrals `F`, `K` and their algebra.
//! * [`numerics`]: finite differences and the Poisson bracket.
//! * [`dynamics`]: leapfrog integration with drift monitoring.
//! * [`verify`]: seeded verification sweeps, parallel over samples.

pub mod charts;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod hamiltonians;
pub mod integrals;
pub mod linalg;
pub mod numerics;
pub mod par;
pub mod sampling;
pub mod state;
pub mod verify;

pub use error::{Error, PairLabel, Result};
pub use geometry::{ModelParams, RootSystem};
pub use state::{com_join, com_split, PhaseState, ReducedPhaseState};
