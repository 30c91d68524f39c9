//! Numerical laboratory for symmetry stability of elliptic boundary problems
//! on offset domains.
//!
//! The pipeline: describe an inner domain `G` analytically, inflate it to
//! `Ω = G + B_R`, solve a torsion or semilinear Dirichlet problem on `Ω`,
//! measure how far the solution is from constant on `∂G`, and run a
//! quantitative moving-planes analysis that certifies `G` is pinched between
//! two concentric balls whose radius gap is linearly controlled by that
//! boundary deviation.

pub mod constants;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod harnack;
pub mod planes;
pub mod solver;
pub mod traces;

pub use error::Error;
pub use geometry::{
    CapDecomposition, ContactCase, DomainSpec, HyperplaneFrame, MinkowskiDomain, Rect, Sdf, Vec2,
};
pub use grid::{CellKind, GridMask, ScalarField};
pub use solver::{SemilinearProblem, SolveStats};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
