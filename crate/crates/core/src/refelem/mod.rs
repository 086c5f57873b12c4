//! Reference simplex machinery: principal-lattice Lagrange bases and
//! positive-weight quadrature on the simplex and its facets.
//!
//! Reference coordinates: vertex 0 is the origin and vertex `i` is the unit
//! vector `e_i`, so barycentric coordinates are `λ_0 = 1 - Σ x̂_j` and
//! `λ_i = x̂_{i-1}`.

mod basis;
mod lattice;
mod quadrature;

pub use basis::{ReferenceBasis, Tabulation};
pub use lattice::{lagrange_nodes, Lattice, MAX_DEGREE};
pub use quadrature::{
    default_quadrature_degree, embed_facet_point, facet_quadrature, facet_vertices, gauss_jacobi,
    quadrature_rule, simplex_measure, QuadratureRule, MAX_QUADRATURE_DEGREE,
};

use crate::linalg::Point;

/// Barycentric coordinates of a reference point.
pub fn barycentric<const D: usize>(x: &Point<D>) -> [f64; 4] {
    let mut bary = [0.0; 4];
    bary[0] = 1.0 - x.sum();
    for j in 0..D {
        bary[j + 1] = x[j];
    }
    bary
}

/// Reference point of a barycentric coordinate vector (only the trailing `D`
/// entries are used).
pub fn from_barycentric<const D: usize>(bary: &[f64]) -> Point<D> {
    Point::<D>::from_fn(|j, _| bary[j + 1])
}

/// Gradients of the barycentric coordinates with respect to reference
/// coordinates.
pub fn barycentric_gradient<const D: usize>(i: usize) -> Point<D> {
    if i == 0 {
        Point::<D>::from_element(-1.0)
    } else {
        let mut g = Point::<D>::zeros();
        g[i - 1] = 1.0;
        g
    }
}
