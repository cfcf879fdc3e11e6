//! Random reluctivity fields for 2D magnetostatics.
//!
//! The crate builds a truncated Karhunen–Loève expansion (KLE) of a spatially
//! varying magnetic reluctivity over the core of a transformer cross-section,
//! using a hierarchical matrix (H-matrix) to compress the dense covariance
//! Galerkin matrix and a Lanczos iteration that only needs matrix-vector
//! products. The expansion drives a P1 finite-element magnetostatic model whose
//! coil self-inductance statistics are computed by tensor Gauss–Legendre
//! stochastic collocation.
//!
//! Pipeline:
//!
//! 1. [`mesh`]: load a Triangle `.node`/`.ele` pair or generate the reference
//!    transformer geometry.
//! 2. [`hmatrix`]: cluster the core elements, build the block cluster tree
//!    and compress the covariance matrix with ACA.
//! 3. [`kle`]: solve the generalized eigenproblem, truncate, and sample.
//! 4. [`fem`]: assemble the affine stiffness decomposition and solve.
//! 5. [`uq`]: collocation grid, per-node inductances, and moments.

pub mod error;
pub mod fem;
pub mod geometry;
pub mod hmatrix;
pub mod kle;
pub mod linalg;
pub mod mesh;
pub mod uq;

pub use error::{Error, Result};
pub use fem::{AffineStiffness, FemSolution, MaterialConfig};
pub use geometry::{Point2, Rect};
pub use hmatrix::{BlockClusterTree, ClusterTree, HMatrix, LowRankBlock};
pub use kle::{CovarianceKernel, FieldSample, KleModel};
pub use linalg::LinearOperator;
pub use mesh::{ElementGeometry, Region, TriMesh};
pub use uq::{CollocationGrid, MomentReport};

/// Vacuum permeability μ₀ in H/m.
pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;

/// Reluctivity of vacuum, 1/μ₀, in H⁻¹m.
pub const NU0: f64 = 1.0 / MU0;
