use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::lift::{exact_map, ElementMap, InnerMap};
use crate::linalg::{det, Point};
use crate::refelem::{default_quadrature_degree, quadrature_rule, ReferenceBasis, MAX_DEGREE};

use super::affine::{classify_elements, AffineMesh, ElementClass};

/// Highest supported geometric order.
pub const MAX_GEOMETRIC_ORDER: usize = 3;

/// Mesh of order `r`: each cell is the image of the reference simplex under
/// the degree-`r` Lagrange interpolant of its control points.
#[derive(Clone, Debug)]
pub struct CurvedMesh<const D: usize> {
    pub order: usize,
    pub base: AffineMesh<D>,
    /// `n_control()` points per cell in reference-lattice order.
    control_points: Vec<Point<D>>,
    pub classes: Vec<ElementClass>,
    /// Maximum cell diameter of the affine base mesh.
    pub h: f64,
    pub basis: ReferenceBasis<D>,
}

impl<const D: usize> CurvedMesh<D> {
    /// Assembles a curved mesh from explicit control points and checks that
    /// `det DF^(r) > 0` at the quadrature points of every cell.
    pub fn from_parts(order: usize, base: AffineMesh<D>, control_points: Vec<Point<D>>) -> Result<Self> {
        check_order(D, order)?;
        let basis = ReferenceBasis::<D>::new(order)?;
        if control_points.len() != basis.len() * base.n_cells() {
            return Err(Error::DimensionMismatch { expected: basis.len() * base.n_cells(), found: control_points.len() });
        }
        let classes = classify_elements(&base)?;
        let h = base.h();
        let mesh = CurvedMesh { order, base, control_points, classes, h, basis };
        mesh.check_orientation(|_| true)?;
        Ok(mesh)
    }

    pub fn n_cells(&self) -> usize {
        self.base.n_cells()
    }

    pub fn n_control(&self) -> usize {
        self.basis.len()
    }

    pub fn control_points(&self, c: usize) -> &[Point<D>] {
        let n = self.n_control();
        &self.control_points[c * n..(c + 1) * n]
    }

    pub fn element_map(&self, c: usize) -> ElementMap<'_, D> {
        ElementMap { control_points: self.control_points(c), basis: &self.basis }
    }

    /// `Σ_T ∫_T̂ det DF^(r)`: the measure of the curved domain `Ω_h`.
    pub fn total_measure(&self) -> Result<f64> {
        let quad = quadrature_rule(D, 2 * D * self.order)?;
        let mut total = 0.0;
        for c in 0..self.n_cells() {
            let map = self.element_map(c);
            for (p, w) in quad.points.iter().zip(&quad.weights) {
                let (_, jac) = map.point_and_jacobian(&Point::<D>::from_fn(|j, _| p[j]));
                total += w * det(&jac);
            }
        }
        Ok(total)
    }

    fn check_orientation(&self, select: impl Fn(usize) -> bool) -> Result<()> {
        let quad = quadrature_rule(D, default_quadrature_degree(MAX_DEGREE, self.order))?;
        for c in 0..self.n_cells() {
            if !select(c) {
                continue;
            }
            let map = self.element_map(c);
            for p in &quad.points {
                let (_, jac) = map.point_and_jacobian(&Point::<D>::from_fn(|j, _| p[j]));
                let d = det(&jac);
                if d <= 0.0 {
                    return Err(Error::InvertedElement { cell: c, det: d });
                }
            }
        }
        Ok(())
    }
}

fn check_order(dim: usize, order: usize) -> Result<()> {
    if order == 0 || order > MAX_GEOMETRIC_ORDER {
        return Err(Error::UnsupportedDegree { dim, degree: order, reason: "geometric order must lie in 1..=3" });
    }
    Ok(())
}

/// Curves an affine mesh to order `r`: control points of NonInternal cells are
/// `F^(e)(x̂_j)` built on the affine map, all others are affine images.
pub fn curve_mesh<const D: usize>(mesh: &AffineMesh<D>, domain: &Domain<D>, r: usize) -> Result<CurvedMesh<D>> {
    check_order(D, r)?;
    let basis = ReferenceBasis::<D>::new(r)?;
    let classes = classify_elements(mesh)?;
    let nodes: Vec<Point<D>> = (0..basis.len()).map(|i| basis.node(i)).collect();
    let s = r as i32 + 2;
    let mut control_points = Vec::with_capacity(nodes.len() * mesh.n_cells());
    for c in 0..mesh.n_cells() {
        let affine = mesh.affine_map(c);
        match classes[c] {
            ElementClass::Internal => control_points.extend(nodes.iter().map(|x| affine.point(x))),
            ElementClass::NonInternal => {
                let eps = mesh.cell_eps(c);
                for x in &nodes {
                    control_points.push(exact_map(&affine, &eps, domain, c, x, s)?);
                }
            }
        }
    }
    let curved = CurvedMesh { order: r, base: mesh.clone(), control_points, classes, h: mesh.h(), basis };
    let classes = &curved.classes;
    curved.check_orientation(|c| classes[c] == ElementClass::NonInternal)?;
    Ok(curved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_ball_mesh, generate_disk_mesh};
    use std::f64::consts::PI;

    #[test]
    fn order_one_reproduces_affine_mesh() {
        let dom = Domain::unit_disk();
        let base = generate_disk_mesh(2).unwrap();
        let mesh = curve_mesh(&base, &dom, 1).unwrap();
        for c in 0..base.n_cells() {
            for (i, &v) in base.cell(c).iter().enumerate() {
                assert!((mesh.control_points(c)[i] - base.vertices[v]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn quadratic_boundary_midpoints_on_circle() {
        let dom = Domain::unit_disk();
        let base = generate_disk_mesh(2).unwrap();
        let mesh = curve_mesh(&base, &dom, 2).unwrap();
        for &(c, f) in &base.boundary_facets {
            for j in mesh.basis.lattice.facet_nodes(f) {
                assert!((mesh.control_points(c)[j].norm() - 1.0).abs() <= 1e-12);
            }
        }
        for c in 0..base.n_cells() {
            if mesh.classes[c] == ElementClass::Internal {
                let cell = base.cell(c);
                let edge = mesh.basis.lattice.index_of(&[1, 1, 0]).unwrap();
                let mid = (base.vertices[cell[0]] + base.vertices[cell[1]]) / 2.0;
                assert!((mesh.control_points(c)[edge] - mid).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn curved_area_converges() {
        let dom = Domain::unit_disk();
        for r in 1..=3 {
            let errs: Vec<f64> = (2..=4)
                .map(|n| (curve_mesh(&generate_disk_mesh(n).unwrap(), &dom, r).unwrap().total_measure().unwrap() - PI).abs())
                .collect();
            assert!(errs[2] < errs[1] && errs[1] < errs[0], "r={r}: {errs:?}");
        }
    }

    #[test]
    fn ball_boundary_nodes_on_sphere() {
        let dom = Domain::unit_ball();
        let base = generate_ball_mesh(1).unwrap();
        for r in 1..=3 {
            let mesh = curve_mesh(&base, &dom, r).unwrap();
            for &(c, f) in &base.boundary_facets {
                for j in mesh.basis.lattice.facet_nodes(f) {
                    assert!((mesh.control_points(c)[j].norm() - 1.0).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_order() {
        let dom = Domain::unit_disk();
        let base = generate_disk_mesh(1).unwrap();
        assert!(matches!(curve_mesh(&base, &dom, 4), Err(Error::UnsupportedDegree { .. })));
        assert!(curve_mesh(&base, &dom, 0).is_err());
    }
}
