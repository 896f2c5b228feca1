//! Numerical laboratory for the free-boundary incompressible Euler equations
//! in Lagrangian coordinates on the unit disk.
//!
//! The moving fluid domain is pulled back to the fixed unit disk; everything
//! here operates on fields over that disk: spectral calculus (Fourier in the
//! angle, Chebyshev-type collocation in the radius), the Laplace–Beltrami
//! Dirichlet solver under a supplied metric, the Leray projection onto
//! divergence-free fields, the boundary normal operator and its smoothed
//! variant, the linearized and modified-linearized Euler operators, explicit
//! time integration of the smoothed linearized equation, Stein-type radial
//! extension with moment-condition kernels, graded smoothing operators, and a
//! Nash–Moser iteration over an abstract tame-problem interface.
//!
//! Verification is property-based: operator identities, symmetry and
//! positivity checks, estimate probes with fitted constants, and
//! grid-convergence experiments at desk scale.

pub mod bump;
pub mod calculus;
pub mod corpus;
pub mod elliptic;
pub mod error;
pub mod field;
pub mod frame;
pub mod grid;
pub mod metric;
pub mod snapshot;

pub use error::{Error, Result};
pub use field::{FieldKind, OneForm, ScalarField, SymTensor, TwoForm, VectorField};
pub use grid::DiskGrid;
pub use metric::{CoordinateState, MetricData, Trajectory};
