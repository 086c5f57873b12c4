//! Exact element transformation, the lift `G_h = F^(e) ∘ (F^(r))^{-1}` and
//! the Jacobian data needed to pull integrals back and forth between the
//! computational domain and the physical one.
//!
//! Everything is evaluated at reference points: `G_h(F^(r)(x̂)) = F^(e)(x̂)`,
//! so `F^(r)` is never inverted.

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::linalg::{det, gram_sqrt, inverse, Mat, Point};
use crate::mesh::{AffineMap, CurvedMesh, ElementClass};
use crate::refelem::{barycentric, barycentric_gradient, facet_vertices, ReferenceBasis};

/// Below this value of `λ*` the point is treated as lying on `σ̂`.
pub const SIGMA_THRESHOLD: f64 = 1e-14;

/// Capacity of the stack buffers used to evaluate geometry bases.
const MAX_GEOMETRY_NODES: usize = 35;

/// A polynomial map of the reference simplex into physical space.
pub trait InnerMap<const D: usize> {
    fn point(&self, xh: &Point<D>) -> Point<D>;
    fn point_and_jacobian(&self, xh: &Point<D>) -> (Point<D>, Mat<D>);
}

impl<const D: usize> InnerMap<D> for AffineMap<D> {
    fn point(&self, xh: &Point<D>) -> Point<D> {
        self.origin + self.jacobian * xh
    }

    fn point_and_jacobian(&self, xh: &Point<D>) -> (Point<D>, Mat<D>) {
        (self.point(xh), self.jacobian)
    }
}

/// `F^(r)` of one cell: Lagrange interpolation of its control points.
#[derive(Clone, Copy, Debug)]
pub struct ElementMap<'a, const D: usize> {
    pub control_points: &'a [Point<D>],
    pub basis: &'a ReferenceBasis<D>,
}

impl<const D: usize> InnerMap<D> for ElementMap<'_, D> {
    fn point(&self, xh: &Point<D>) -> Point<D> {
        self.point_and_jacobian(xh).0
    }

    fn point_and_jacobian(&self, xh: &Point<D>) -> (Point<D>, Mat<D>) {
        let n = self.basis.len();
        let mut values = [0.0; MAX_GEOMETRY_NODES];
        let mut grads = [Point::<D>::zeros(); MAX_GEOMETRY_NODES];
        self.basis.eval_into(xh, &mut values, &mut grads);
        let mut x = Point::<D>::zeros();
        let mut jac = Mat::<D>::zeros();
        for i in 0..n {
            let p = &self.control_points[i];
            x += p * values[i];
            jac += p * grads[i].transpose();
        }
        (x, jac)
    }
}

/// `λ* = Σ ε_i λ_i` and, away from `σ̂`, the barycentric coordinates of
/// `ŷ = (1/λ*) Σ ε_i λ_i v̂_i`.
pub fn lambda_star(eps: &[bool], bary: &[f64]) -> (f64, Option<[f64; 4]>) {
    let ls: f64 = eps.iter().zip(bary).filter(|(e, _)| **e).map(|(_, l)| l).sum();
    if ls <= SIGMA_THRESHOLD {
        return (ls, None);
    }
    let mut y = [0.0; 4];
    for (i, (&e, &l)) in eps.iter().zip(bary).enumerate() {
        if e {
            y[i] = l / ls;
        }
    }
    (ls, Some(y))
}

/// `F^(e)(x̂)` and its derivative for the inner map `X` (affine for curving,
/// `F^(r)` for the lift).
#[derive(Clone, Copy, Debug)]
pub struct ExactEval<const D: usize> {
    /// `X(x̂)`.
    pub x: Point<D>,
    /// `DX(x̂)`.
    pub dx: Mat<D>,
    /// `F^(e)(x̂)`.
    pub z: Point<D>,
    /// `DF^(e)(x̂)`.
    pub dz: Mat<D>,
}

fn tube_error<const D: usize>(cell: usize, err: Error) -> Error {
    match err {
        Error::PointOutsideTube { distance, .. } => Error::ProjectionOutsideTube { cell, distance },
        other => other,
    }
}

/// Evaluates `F^(e)(x̂) = X(x̂) + (λ*)^s (b(y) - y)`, `y = X(ŷ)`, together
/// with its analytic derivative.
pub fn exact_eval<const D: usize, M: InnerMap<D>>(
    map: &M,
    eps: &[bool],
    domain: &Domain<D>,
    cell: usize,
    xh: &Point<D>,
    s: i32,
) -> Result<ExactEval<D>> {
    let (x, dx) = map.point_and_jacobian(xh);
    let bary = barycentric(xh);
    let (ls, yb) = lambda_star(&eps[..=D], &bary[..=D]);
    let Some(yb) = yb else {
        return Ok(ExactEval { x, dx, z: x, dz: dx });
    };
    let yh = Point::<D>::from_fn(|j, _| yb[j + 1]);
    let (y, dy) = map.point_and_jacobian(&yh);
    let by = domain.project_boundary(&y).map_err(|e| tube_error::<D>(cell, e))?;
    let db = domain.projection_derivative(&y).map_err(|e| tube_error::<D>(cell, e))?;
    let disp = by - y;
    let ls_s = ls.powi(s);
    let z = x + disp * ls_s;

    let mut grad_ls = Point::<D>::zeros();
    for i in 0..=D {
        if eps[i] {
            grad_ls += barycentric_gradient::<D>(i);
        }
    }
    // Dŷ = (1/λ*) [Σ ε_i v̂_i ⊗ ∇λ_i - ŷ ⊗ ∇λ*]; v̂_0 = 0.
    let mut dyh = -yh * grad_ls.transpose();
    for i in 1..=D {
        if eps[i] {
            let mut row = Point::<D>::zeros();
            row[i - 1] = 1.0;
            dyh += row * barycentric_gradient::<D>(i).transpose();
        }
    }
    dyh /= ls;
    let dz = dx
        + disp * grad_ls.transpose() * (s as f64 * ls.powi(s - 1))
        + (db - Mat::<D>::identity()) * dy * dyh * ls_s;
    Ok(ExactEval { x, dx, z, dz })
}

/// `F^(e)(x̂)` for the inner map `map`.
pub fn exact_map<const D: usize, M: InnerMap<D>>(
    map: &M,
    eps: &[bool],
    domain: &Domain<D>,
    cell: usize,
    xh: &Point<D>,
    s: i32,
) -> Result<Point<D>> {
    let x = map.point(xh);
    let bary = barycentric(xh);
    let (ls, yb) = lambda_star(&eps[..=D], &bary[..=D]);
    let Some(yb) = yb else {
        return Ok(x);
    };
    let y = map.point(&Point::<D>::from_fn(|j, _| yb[j + 1]));
    let by = domain.project_boundary(&y).map_err(|e| tube_error::<D>(cell, e))?;
    Ok(x + (by - y) * ls.powi(s))
}

/// `DF^(e)(x̂)`, analytic by default. With the `fd-jacobian` feature a
/// central-difference approximation is returned instead.
pub fn exact_map_jacobian<const D: usize, M: InnerMap<D>>(
    map: &M,
    eps: &[bool],
    domain: &Domain<D>,
    cell: usize,
    xh: &Point<D>,
    s: i32,
) -> Result<Mat<D>> {
    if cfg!(feature = "fd-jacobian") {
        exact_map_jacobian_fd(map, eps, domain, cell, xh, s, 1e-6)
    } else {
        Ok(exact_eval(map, eps, domain, cell, xh, s)?.dz)
    }
}

/// Central finite differences of [`exact_map`].
pub fn exact_map_jacobian_fd<const D: usize, M: InnerMap<D>>(
    map: &M,
    eps: &[bool],
    domain: &Domain<D>,
    cell: usize,
    xh: &Point<D>,
    s: i32,
    step: f64,
) -> Result<Mat<D>> {
    let mut jac = Mat::<D>::zeros();
    for j in 0..D {
        let mut xp = *xh;
        let mut xm = *xh;
        xp[j] += step;
        xm[j] -= step;
        let col = (exact_map(map, eps, domain, cell, &xp, s)? - exact_map(map, eps, domain, cell, &xm, s)?) / (2.0 * step);
        jac.set_column(j, &col);
    }
    Ok(jac)
}

/// Lift data at a reference point of a cell.
#[derive(Clone, Copy, Debug)]
pub struct LiftData<const D: usize> {
    /// `x = F^(r)(x̂)`.
    pub x: Point<D>,
    /// `z = F^(e)(x̂) = G_h(x)`.
    pub z: Point<D>,
    pub df_r: Mat<D>,
    pub df_e: Mat<D>,
    /// `DG_h(x) = DF^(e) (DF^(r))^{-1}`.
    pub dg: Mat<D>,
    /// `det DG_h(x)`.
    pub j_h: f64,
}

impl<const D: usize> LiftData<D> {
    pub fn det_df_r(&self) -> f64 {
        det(&self.df_r)
    }

    pub fn det_df_e(&self) -> f64 {
        det(&self.df_e)
    }
}

/// Lift data from an already evaluated `x = F^(r)(x̂)` and `DF^(r)(x̂)`.
pub fn lift_from_parts<const D: usize>(
    mesh: &CurvedMesh<D>,
    domain: &Domain<D>,
    cell: usize,
    xh: &Point<D>,
    x: Point<D>,
    df_r: Mat<D>,
) -> Result<LiftData<D>> {
    let det_r = det(&df_r);
    if det_r <= 0.0 {
        return Err(Error::InvertedElement { cell, det: det_r });
    }
    if mesh.classes[cell] == ElementClass::Internal {
        return Ok(LiftData { x, z: x, df_r, df_e: df_r, dg: Mat::<D>::identity(), j_h: 1.0 });
    }
    let map = mesh.element_map(cell);
    let eps = mesh.base.cell_eps(cell);
    let s = mesh.order as i32 + 2;
    let (z, df_e) = if cfg!(feature = "fd-jacobian") {
        let z = exact_map(&map, &eps, domain, cell, xh, s)?;
        (z, exact_map_jacobian(&map, &eps, domain, cell, xh, s)?)
    } else {
        let e = exact_eval(&map, &eps, domain, cell, xh, s)?;
        (e.z, e.dz)
    };
    let inv = inverse(&df_r).ok_or(Error::InvertedElement { cell, det: det_r })?;
    let dg = df_e * inv;
    Ok(LiftData { x, z, df_r, df_e, dg, j_h: det(&dg) })
}

pub fn lift_data<const D: usize>(mesh: &CurvedMesh<D>, domain: &Domain<D>, cell: usize, xh: &Point<D>) -> Result<LiftData<D>> {
    let (x, df_r) = mesh.element_map(cell).point_and_jacobian(xh);
    lift_from_parts(mesh, domain, cell, xh, x, df_r)
}

/// Reference-coordinate tangents `∂x̂/∂ξ` of the facet opposite `face`.
pub fn facet_tangents<const D: usize>(face: usize) -> Vec<Point<D>> {
    let verts = facet_vertices(D, face);
    let vertex = |i: usize| {
        let mut v = Point::<D>::zeros();
        if i > 0 {
            v[i - 1] = 1.0;
        }
        v
    };
    verts[1..].iter().map(|&v| vertex(v) - vertex(verts[0])).collect()
}

/// Surface data at a curved boundary facet point.
#[derive(Clone, Copy, Debug)]
pub struct SurfaceData<const D: usize> {
    /// `x = F^(r)(x̂)` on `Γ_h`.
    pub x: Point<D>,
    /// `b(x)` on `Γ`.
    pub bx: Point<D>,
    /// Area element of `Γ_h` with respect to the reference facet.
    pub ds_h: f64,
    /// Tangential Jacobian of `b` restricted to `Γ_h`.
    pub j_b: f64,
}

/// Surface data from `x` and `DF^(r)` at the embedded facet point.
pub fn surface_from_parts<const D: usize>(
    domain: &Domain<D>,
    cell: usize,
    face: usize,
    x: Point<D>,
    df_r: &Mat<D>,
) -> Result<SurfaceData<D>> {
    let tangents: Vec<Point<D>> = facet_tangents::<D>(face).iter().map(|t| df_r * t).collect();
    let ds_h = gram_sqrt(&tangents);
    if ds_h <= 0.0 || !ds_h.is_finite() {
        return Err(Error::DegenerateFacet { cell, face });
    }
    let bx = domain.project_boundary(&x).map_err(|e| tube_error::<D>(cell, e))?;
    let db = domain.projection_derivative(&x).map_err(|e| tube_error::<D>(cell, e))?;
    let projected: Vec<Point<D>> = tangents.iter().map(|t| db * t).collect();
    let j_b = gram_sqrt(&projected) / ds_h;
    Ok(SurfaceData { x, bx, ds_h, j_b })
}

/// `(J_b, ds_h)` at facet reference point `xi` of boundary facet `face`.
pub fn surface_jacobian_ratio<const D: usize>(
    mesh: &CurvedMesh<D>,
    domain: &Domain<D>,
    cell: usize,
    face: usize,
    xi: &[f64],
) -> Result<(f64, f64)> {
    let xh = facet_reference_point::<D>(face, xi);
    let (x, df_r) = mesh.element_map(cell).point_and_jacobian(&xh);
    let s = surface_from_parts(domain, cell, face, x, &df_r)?;
    Ok((s.j_b, s.ds_h))
}

/// Reference-cell point of a facet reference point.
pub fn facet_reference_point<const D: usize>(face: usize, xi: &[f64]) -> Point<D> {
    let bary = crate::refelem::embed_facet_point(D, face, xi);
    Point::<D>::from_fn(|j, _| bary[j + 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{curve_mesh, generate_ball_mesh, generate_disk_mesh};
    use crate::refelem::{facet_quadrature, quadrature_rule};
    use nalgebra::Vector2;

    #[test]
    fn lambda_star_examples() {
        let eps = [true, true, false];
        let (ls, y) = lambda_star(&eps, &[0.5, 0.5, 0.0]);
        assert_eq!(ls, 1.0);
        assert_eq!(&y.unwrap()[..3], &[0.5, 0.5, 0.0]);
        let (ls, y) = lambda_star(&eps, &[0.0, 0.0, 1.0]);
        assert_eq!(ls, 0.0);
        assert!(y.is_none());
        let (ls, y) = lambda_star(&eps, &[0.25, 0.25, 0.5]);
        assert_eq!(ls, 0.5);
        assert_eq!(&y.unwrap()[..3], &[0.5, 0.5, 0.0]);
    }

    fn fd_jacobian<const D: usize, M: InnerMap<D>>(map: &M, eps: &[bool], dom: &Domain<D>, xh: &Point<D>, s: i32) -> Mat<D> {
        let h = 1e-6;
        let mut jac = Mat::<D>::zeros();
        for j in 0..D {
            let mut xp = *xh;
            let mut xm = *xh;
            xp[j] += h;
            xm[j] -= h;
            let col = (exact_map(map, eps, dom, 0, &xp, s).unwrap() - exact_map(map, eps, dom, 0, &xm, s).unwrap()) / (2.0 * h);
            jac.set_column(j, &col);
        }
        jac
    }

    fn check_jacobians<const D: usize>(mesh: &CurvedMesh<D>, dom: &Domain<D>) {
        let quad = quadrature_rule(D, 6).unwrap();
        let s = mesh.order as i32 + 2;
        let mut checked = 0;
        for c in 0..mesh.base.n_cells() {
            if mesh.classes[c] != ElementClass::NonInternal {
                continue;
            }
            let eps = mesh.base.cell_eps(c);
            let map = mesh.element_map(c);
            let affine = mesh.base.affine_map(c);
            for p in &quad.points {
                let xh = Point::<D>::from_fn(|j, _| p[j]);
                let e = exact_eval(&map, &eps, dom, c, &xh, s).unwrap();
                assert!((e.dz - fd_jacobian(&map, &eps, dom, &xh, s)).amax() < 1e-6);
                assert!((e.z - exact_map(&map, &eps, dom, c, &xh, s).unwrap()).norm() < 1e-15);
                let e = exact_eval(&affine, &eps, dom, c, &xh, s).unwrap();
                assert!((e.dz - fd_jacobian(&affine, &eps, dom, &xh, s)).amax() < 1e-6);
            }
            checked += 1;
        }
        assert!(checked > 0);
    }

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        let dom = Domain::unit_disk();
        for r in 1..=3 {
            let mesh = curve_mesh(&generate_disk_mesh(1).unwrap(), &dom, r).unwrap();
            check_jacobians(&mesh, &dom);
        }
        let dom = Domain::unit_ball();
        for r in 1..=3 {
            let mesh = curve_mesh(&generate_ball_mesh(1).unwrap(), &dom, r).unwrap();
            check_jacobians(&mesh, &dom);
        }
    }

    #[test]
    fn sigma_branch_returns_inner_map() {
        let dom = Domain::unit_disk();
        let mesh = curve_mesh(&generate_disk_mesh(2).unwrap(), &dom, 2).unwrap();
        let c = (0..mesh.base.n_cells()).find(|&c| mesh.classes[c] == ElementClass::NonInternal).unwrap();
        let eps = mesh.base.cell_eps(c);
        let interior = (0..3).find(|&i| !eps[i]).unwrap();
        let mut xh = Point::<2>::zeros();
        if interior > 0 {
            xh[interior - 1] = 1.0;
        }
        let map = mesh.element_map(c);
        let e = exact_eval(&map, &eps, &dom, c, &xh, 4).unwrap();
        let (x, dx) = map.point_and_jacobian(&xh);
        assert_eq!(e.z, x);
        assert_eq!(e.dz, dx);
    }

    #[test]
    fn internal_cells_are_identity() {
        let dom = Domain::unit_disk();
        let mesh = curve_mesh(&generate_disk_mesh(2).unwrap(), &dom, 3).unwrap();
        let xh = Vector2::new(0.2, 0.3);
        for c in 0..mesh.base.n_cells() {
            if mesh.classes[c] == ElementClass::Internal {
                let l = lift_data(&mesh, &dom, c, &xh).unwrap();
                assert_eq!(l.dg, Mat::<2>::identity());
                assert_eq!(l.j_h, 1.0);
                assert_eq!(l.z, l.x);
                assert!((l.x - mesh.base.affine_map(c).point(&xh)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn trace_property() {
        let dom = Domain::unit_disk();
        let fq = facet_quadrature(2, 10).unwrap();
        for r in 1..=3 {
            let mesh = curve_mesh(&generate_disk_mesh(2).unwrap(), &dom, r).unwrap();
            for &(c, f) in &mesh.base.boundary_facets {
                for xi in &fq.points {
                    let xh = facet_reference_point::<2>(f, xi);
                    let l = lift_data(&mesh, &dom, c, &xh).unwrap();
                    let b = dom.project_boundary(&l.x).unwrap();
                    assert!((l.z - b).norm() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn jb_matches_arc_length_sampling() {
        // Straight chord between angles 0 and θ; b maps it onto the arc.
        let dom = Domain::unit_disk();
        let theta: f64 = 0.7;
        let p0 = Vector2::new(1.0, 0.0);
        let p1 = Vector2::new(theta.cos(), theta.sin());
        let chord = |t: f64| p0 + (p1 - p0) * t;
        let t = 0.5;
        let dt = 1e-5;
        let arc_speed = (dom.project_boundary(&chord(t + dt)).unwrap() - dom.project_boundary(&chord(t - dt)).unwrap()).norm() / (2.0 * dt);
        let oracle = arc_speed / (p1 - p0).norm();

        // Triangle (0, p0, p1): facet 0 is the chord.
        let x = chord(t);
        let df = nalgebra::Matrix2::from_columns(&[p0, p1]);
        let s = surface_from_parts(&dom, 0, 0, x, &df).unwrap();
        assert!((s.j_b - oracle).abs() < 1e-8, "{} vs {oracle}", s.j_b);
        assert!((s.ds_h - (p1 - p0).norm()).abs() < 1e-15);
    }
}
