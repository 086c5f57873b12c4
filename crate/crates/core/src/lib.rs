//! Curved high-order finite elements for linear elasticity with a Robin
//! boundary condition on smooth domains.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: signed distance, orthogonal projection onto the boundary
//!   and its derivative.
//! - [`refelem`]: Lagrange bases and quadrature on the reference simplex.
//! - [`mesh`]: affine disk/ball generators, curving to geometric order `r`,
//!   Gmsh and native mesh I/O.
//! - [`lift`]: the exact element transformation, the lift `G_h` and its
//!   Jacobian data, and the surface Jacobian ratio of the projection.
//! - [`assemble`]: vector `P^k` space, element operators and the global
//!   sparse system.
//! - [`solve`]: Jacobi-preconditioned CG, dense and sparse Cholesky.
//! - [`errors`]: manufactured solutions, lifted error norms and observed
//!   convergence orders.
//! - [`study`]: single runs and refinement series tying everything together.

pub mod assemble;
pub mod error;
pub mod errors;
pub mod geometry;
pub mod lift;
pub mod linalg;
pub mod mesh;
pub mod refelem;
pub mod solve;
pub mod study;

pub use assemble::{assemble_system, CsrMatrix, Discretization, FESpace, MaterialParams, SparseSystem};
pub use error::{Error, Result};
pub use errors::{convergence_orders, manufactured_case, AnyCase, ConvergenceTable, ErrorReport, ManufacturedCase};
pub use geometry::{Domain, DomainKind, LevelSet};
pub use lift::LiftData;
pub use linalg::{Mat, Point};
pub use mesh::{AffineMesh, CurvedMesh, ElementClass};
pub use refelem::{QuadratureRule, ReferenceBasis};
pub use solve::{SolveStats, SolverChoice};
pub use study::{RunConfig, RunOutcome};
