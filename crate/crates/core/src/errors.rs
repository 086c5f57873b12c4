//! Manufactured solutions, lifted error norms on the exact domain and
//! observed convergence orders.

use crate::assemble::{geometry_at, hooke_apply, strain, Discretization, MaterialParams};
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::lift::{exact_map, lift_from_parts, surface_from_parts};
use crate::linalg::{inverse, Mat, Point};
use crate::mesh::{CurvedMesh, ElementClass};
use crate::solve::SolveStats;

/// Exact solution and data of `-div A e(u) = f` in Ω, `u + A e(u) n = g` on Γ.
#[derive(Clone, Debug)]
pub struct ManufacturedCase<const D: usize> {
    pub name: &'static str,
    pub domain: Domain<D>,
    pub params: MaterialParams,
    pub u: fn(&Point<D>) -> Point<D>,
    /// `grad_u[(a, j)] = ∂u_a / ∂x_j`.
    pub grad_u: fn(&Point<D>) -> Mat<D>,
    pub f: fn(&Point<D>) -> Point<D>,
    pub g: fn(&Point<D>) -> Point<D>,
}

#[derive(Clone, Debug)]
pub enum AnyCase {
    Disk(ManufacturedCase<2>),
    Ball(ManufacturedCase<3>),
}

impl AnyCase {
    pub fn name(&self) -> &'static str {
        match self {
            AnyCase::Disk(c) => c.name,
            AnyCase::Ball(c) => c.name,
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            AnyCase::Disk(_) => 2,
            AnyCase::Ball(_) => 3,
        }
    }
}

pub const CASE_NAMES: [&str; 2] = ["disk2d", "ball3d"];

pub fn manufactured_case(name: &str) -> Result<AnyCase> {
    match name {
        "disk2d" => Ok(AnyCase::Disk(disk2d())),
        "ball3d" => Ok(AnyCase::Ball(ball3d())),
        other => Err(Error::UnknownCase(other.to_string())),
    }
}

/// `u = (x e^y, x y^3)` on the unit disk, μ = λ = 1.
pub fn disk2d() -> ManufacturedCase<2> {
    ManufacturedCase {
        name: "disk2d",
        domain: Domain::unit_disk(),
        params: MaterialParams::default(),
        u: |p| {
            let (x, y) = (p[0], p[1]);
            Point::<2>::new(x * y.exp(), y.powi(3) * x)
        },
        grad_u: |p| {
            let (x, y) = (p[0], p[1]);
            Mat::<2>::new(y.exp(), x * y.exp(), y.powi(3), 3.0 * x * y * y)
        },
        f: |p| {
            let (x, y) = (p[0], p[1]);
            Point::<2>::new(-6.0 * y * y - x * y.exp(), -18.0 * x * y - 2.0 * y.exp())
        },
        g: |p| {
            let (x, y) = (p[0], p[1]);
            let ey = y.exp();
            Point::<2>::new(
                3.0 * x * x * y * y + y.powi(4) + x * y * ey + 4.0 * x * ey,
                11.0 * x * y.powi(3) + x * x * ey + y * ey,
            )
        },
    }
}

/// `u = (x e^y, x y^3 z^2, y z^4)` on the unit ball, μ = λ = 1.
pub fn ball3d() -> ManufacturedCase<3> {
    ManufacturedCase {
        name: "ball3d",
        domain: Domain::unit_ball(),
        params: MaterialParams::default(),
        u: |p| {
            let (x, y, z) = (p[0], p[1], p[2]);
            Point::<3>::new(x * y.exp(), x * y.powi(3) * z * z, y * z.powi(4))
        },
        grad_u: |p| {
            let (x, y, z) = (p[0], p[1], p[2]);
            let ey = y.exp();
            Mat::<3>::new(
                ey,
                x * ey,
                0.0,
                y.powi(3) * z * z,
                3.0 * x * y * y * z * z,
                2.0 * x * y.powi(3) * z,
                0.0,
                z.powi(4),
                4.0 * y * z.powi(3),
            )
        },
        f: |p| {
            let (x, y, z) = (p[0], p[1], p[2]);
            let ey = y.exp();
            Point::<3>::new(
                -6.0 * y * y * z * z - x * ey,
                -2.0 * x * y.powi(3) - 8.0 * z.powi(3) - 18.0 * x * y * z * z - 2.0 * ey,
                -12.0 * x * y * y * z - 36.0 * y * z * z,
            )
        },
        g: |p| {
            let (x, y, z) = (p[0], p[1], p[2]);
            let ey = y.exp();
            Point::<3>::new(
                3.0 * x * x * y * y * z * z + y.powi(4) * z * z + x * y * ey + 4.0 * x * ey + 4.0 * x * y * z.powi(3),
                13.0 * x * y.powi(3) * z * z + x * x * ey + y * ey + 4.0 * y * y * z.powi(3) + z.powi(5),
                2.0 * x * y.powi(4) * z + 3.0 * x * y * y * z.powi(3) + 14.0 * y * z.powi(4) + z * ey,
            )
        },
    }
}

impl<const D: usize> ManufacturedCase<D> {
    /// `A e(u)` from the analytic gradient.
    pub fn stress(&self, x: &Point<D>) -> Mat<D> {
        hooke_apply(&self.params, &strain(&(self.grad_u)(x))).expect("strain is symmetric")
    }

    /// `|-div A e(u) - f|` with the divergence and the gradient both taken by
    /// central differences of `u` with step `step`.
    pub fn pde_residual_fd(&self, x: &Point<D>, step: f64) -> f64 {
        let grad_fd = |p: &Point<D>| {
            let mut g = Mat::<D>::zeros();
            for j in 0..D {
                let mut e = Point::<D>::zeros();
                e[j] = step;
                g.set_column(j, &(((self.u)(&(p + e)) - (self.u)(&(p - e))) / (2.0 * step)));
            }
            g
        };
        let sigma = |p: &Point<D>| hooke_apply(&self.params, &strain(&grad_fd(p))).expect("strain is symmetric");
        let mut div = Point::<D>::zeros();
        for j in 0..D {
            let mut e = Point::<D>::zeros();
            e[j] = step;
            let ds = (sigma(&(x + e)) - sigma(&(x - e))) / (2.0 * step);
            div += ds.column(j);
        }
        (-div - (self.f)(x)).norm()
    }

    /// `|u + A e(u) n - g|` at a boundary point, with the analytic gradient.
    pub fn robin_residual(&self, x: &Point<D>) -> Result<f64> {
        let n = self.domain.distance_gradient(x);
        Ok(((self.u)(x) + self.stress(x) * n - (self.g)(x)).norm())
    }
}

/// Values of the discrete field and its reference gradient at tabulated point `q`.
fn discrete_at<const D: usize>(
    values: &[f64],
    grads: &[Point<D>],
    dofs: &[f64],
    cell_dofs: &[usize],
) -> (Point<D>, Mat<D>) {
    let mut u = Point::<D>::zeros();
    let mut g = Mat::<D>::zeros();
    for (i, (phi, dphi)) in values.iter().zip(grads).enumerate() {
        for a in 0..D {
            let c = dofs[cell_dofs[i * D + a]];
            u[a] += c * phi;
            for j in 0..D {
                g[(a, j)] += c * dphi[j];
            }
        }
    }
    (u, g)
}

/// `(‖u - u_h^ℓ‖_{L²(Ω)}, ‖∇u - ∇u_h^ℓ‖_{L²(Ω)})` evaluated on the reference
/// cells through the exact transformation.
pub fn volume_errors<const D: usize>(
    case: &ManufacturedCase<D>,
    mesh: &CurvedMesh<D>,
    disc: &Discretization<D>,
    dofs: &[f64],
) -> Result<(f64, f64)> {
    check_len(disc, dofs)?;
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    for c in 0..mesh.n_cells() {
        let control = mesh.control_points(c);
        let cell_dofs = disc.space.cell_dofs(c);
        for (q, w) in disc.quad.weights.iter().enumerate() {
            let (x, jac) = geometry_at(control, &disc.geo_volume, q);
            let lift = lift_from_parts(mesh, &case.domain, c, &disc.quad_points[q], x, jac)?;
            let det_e = lift.det_df_e();
            let inv_e = inverse(&lift.df_e).ok_or(Error::InvertedElement { cell: c, det: det_e })?;
            let (uh, ghat) = discrete_at(disc.fe_volume.values_at(q), disc.fe_volume.grads_at(q), dofs, &cell_dofs);
            let weight = w * det_e.abs();
            l2 += weight * ((case.u)(&lift.z) - uh).norm_squared();
            h1 += weight * ((case.grad_u)(&lift.z) - ghat * inv_e).norm_squared();
        }
    }
    Ok((l2.sqrt(), h1.sqrt()))
}

/// `‖u - u_h^ℓ‖_{L²(Γ)}` with the exact surface measure `J_b ds_h`.
pub fn surface_error<const D: usize>(
    case: &ManufacturedCase<D>,
    mesh: &CurvedMesh<D>,
    disc: &Discretization<D>,
    dofs: &[f64],
) -> Result<f64> {
    check_len(disc, dofs)?;
    let mut total = 0.0;
    for &(c, face) in &mesh.base.boundary_facets {
        let control = mesh.control_points(c);
        let cell_dofs = disc.space.cell_dofs(c);
        let fe = &disc.fe_facet[face];
        for (q, w) in disc.facet_quad.weights.iter().enumerate() {
            let (x, jac) = geometry_at(control, &disc.geo_facet[face], q);
            let s = surface_from_parts(&case.domain, c, face, x, &jac)?;
            let (uh, _) = discrete_at(fe.values_at(q), fe.grads_at(q), dofs, &cell_dofs);
            total += w * s.j_b * s.ds_h * ((case.u)(&s.bx) - uh).norm_squared();
        }
    }
    Ok(total.sqrt())
}

fn check_len<const D: usize>(disc: &Discretization<D>, dofs: &[f64]) -> Result<()> {
    if dofs.len() != disc.n_dofs() {
        return Err(Error::DimensionMismatch { expected: disc.n_dofs(), found: dofs.len() });
    }
    Ok(())
}

/// Nodal interpolant of `u` at the lifted nodes `F^(e)(x̂_i)`.
pub fn lifted_interpolant<const D: usize>(
    u: &dyn Fn(&Point<D>) -> Point<D>,
    mesh: &CurvedMesh<D>,
    disc: &Discretization<D>,
    domain: &Domain<D>,
) -> Result<Vec<f64>> {
    let space = &disc.space;
    let mut dofs = vec![0.0; space.n_dofs()];
    let s = mesh.order as i32 + 2;
    for c in 0..mesh.n_cells() {
        let map = mesh.element_map(c);
        let eps = mesh.base.cell_eps(c);
        for (i, &node) in space.cell_nodes(c).iter().enumerate() {
            let xh = space.basis.node(i);
            let z = match mesh.classes[c] {
                ElementClass::Internal => crate::lift::InnerMap::point(&map, &xh),
                ElementClass::NonInternal => exact_map(&map, &eps, domain, c, &xh, s)?,
            };
            let v = u(&z);
            for a in 0..D {
                dofs[node * D + a] = v[a];
            }
        }
    }
    Ok(dofs)
}

/// Errors of one run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorReport {
    pub h: f64,
    pub e_l2_volume: f64,
    pub e_h1_semi: f64,
    pub e_l2_surface: f64,
    pub dofs: usize,
    pub stats: Option<SolveStats>,
}

/// Observed orders `log(e_i / e_{i+1}) / log(h_i / h_{i+1})` per consecutive pair.
pub fn pair_orders(h: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    if h.len() != e.len() {
        return Err(Error::DimensionMismatch { expected: h.len(), found: e.len() });
    }
    if h.len() < 2 {
        return Err(Error::InsufficientData(format!("{} report(s)", h.len())));
    }
    if let Some(i) = h.windows(2).position(|w| !(w[1] < w[0])) {
        return Err(Error::InsufficientData(format!("h[{}] = {} does not decrease from {}", i + 1, h[i + 1], h[i])));
    }
    Ok(h.windows(2).zip(e.windows(2)).map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln()).collect())
}

/// Error reports of a refinement series with per-pair orders for each norm.
#[derive(Clone, Debug)]
pub struct ConvergenceTable {
    pub reports: Vec<ErrorReport>,
    pub orders_l2: Vec<f64>,
    pub orders_h1: Vec<f64>,
    pub orders_surface: Vec<f64>,
}

impl ConvergenceTable {
    /// Finest-pair orders `(L², H¹, L²(Γ))`.
    pub fn reported(&self) -> (f64, f64, f64) {
        let last = |v: &[f64]| *v.last().expect("table has at least one pair");
        (last(&self.orders_l2), last(&self.orders_h1), last(&self.orders_surface))
    }
}

pub fn convergence_orders(reports: &[ErrorReport]) -> Result<ConvergenceTable> {
    let h: Vec<f64> = reports.iter().map(|r| r.h).collect();
    let col = |f: fn(&ErrorReport) -> f64| -> Result<Vec<f64>> {
        pair_orders(&h, &reports.iter().map(f).collect::<Vec<_>>())
    };
    Ok(ConvergenceTable {
        reports: reports.to_vec(),
        orders_l2: col(|r| r.e_l2_volume)?,
        orders_h1: col(|r| r.e_h1_semi)?,
        orders_surface: col(|r| r.e_l2_surface)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{curve_mesh, generate_disk_mesh};
    use nalgebra::{Vector2, Vector3};

    #[test]
    fn case_examples() {
        let disk = disk2d();
        assert_eq!((disk.f)(&Vector2::zeros()), Vector2::new(0.0, -2.0));
        assert_eq!((disk.u)(&Vector2::new(1.0, 0.0)), Vector2::new(1.0, 0.0));
        let ball = ball3d();
        assert_eq!((ball.u)(&Vector3::new(0.0, 0.0, 1.0)), Vector3::zeros());
        assert!(matches!(manufactured_case("square"), Err(Error::UnknownCase(_))));
        assert_eq!(manufactured_case("ball3d").unwrap().dimension(), 3);
    }

    fn fd_gradient<const D: usize>(u: fn(&Point<D>) -> Point<D>, x: &Point<D>) -> Mat<D> {
        let mut g = Mat::<D>::zeros();
        for j in 0..D {
            let mut e = Point::<D>::zeros();
            e[j] = 1e-6;
            g.set_column(j, &((u(&(x + e)) - u(&(x - e))) / 2e-6));
        }
        g
    }

    #[test]
    fn gradients_match_finite_differences() {
        let d = disk2d();
        let b = ball3d();
        for x in [Vector2::new(0.3, -0.4), Vector2::new(-0.7, 0.2)] {
            assert!(((d.grad_u)(&x) - fd_gradient(d.u, &x)).amax() < 1e-8);
        }
        for x in [Vector3::new(0.3, -0.4, 0.5), Vector3::new(-0.6, 0.2, -0.1)] {
            assert!(((b.grad_u)(&x) - fd_gradient(b.u, &x)).amax() < 1e-8);
        }
    }

    #[test]
    fn residuals_vanish() {
        let d = disk2d();
        let x = Vector2::new(0.3, -0.5);
        assert!(d.pde_residual_fd(&x, 1e-5) < 1e-4);
        let t: f64 = 0.7;
        assert!(d.robin_residual(&Vector2::new(t.cos(), t.sin())).unwrap() < 1e-12);
        let b = ball3d();
        assert!(b.pde_residual_fd(&Vector3::new(0.1, 0.4, -0.3), 1e-5) < 1e-4);
        assert!(b.robin_residual(&Vector3::new(0.6, 0.0, 0.8)).unwrap() < 1e-12);
    }

    #[test]
    fn zero_case_has_zero_error() {
        let mut case = disk2d();
        case.u = |_| Vector2::zeros();
        case.grad_u = |_| Mat::<2>::zeros();
        let mesh = curve_mesh(&generate_disk_mesh(2).unwrap(), &case.domain, 2).unwrap();
        let disc = Discretization::new(&mesh, 2, None).unwrap();
        let dofs = vec![0.0; disc.n_dofs()];
        assert_eq!(volume_errors(&case, &mesh, &disc, &dofs).unwrap(), (0.0, 0.0));
        assert_eq!(surface_error(&case, &mesh, &disc, &dofs).unwrap(), 0.0);
        let mut bumped = dofs.clone();
        bumped[7] = 1e-3;
        let (l2, h1) = volume_errors(&case, &mesh, &disc, &bumped).unwrap();
        assert!(l2 > 0.0 && h1 > 0.0);
        assert!(volume_errors(&case, &mesh, &disc, &dofs[1..]).is_err());
    }

    #[test]
    fn lifted_interpolant_of_linear_field_is_exact() {
        let case = disk2d();
        let mesh = curve_mesh(&generate_disk_mesh(2).unwrap(), &case.domain, 3).unwrap();
        let disc = Discretization::new(&mesh, 1, None).unwrap();
        let mut lin = case.clone();
        lin.u = |p| Vector2::new(2.0 * p[0] - p[1] + 0.5, p[1]);
        lin.grad_u = |_| Mat::<2>::new(2.0, -1.0, 0.0, 1.0);
        // P1 nodes are vertices, where F^(e) and F^(r) agree.
        let dofs = lifted_interpolant(&lin.u, &mesh, &disc, &case.domain).unwrap();
        let coords = disc.space.node_coordinates(&mesh);
        for (n, x) in coords.iter().enumerate() {
            let v = (lin.u)(x);
            assert!((dofs[2 * n] - v[0]).abs() < 1e-14 && (dofs[2 * n + 1] - v[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn interpolation_rate_on_quadratic_mesh() {
        let case = disk2d();
        let mut h = Vec::new();
        let mut e = Vec::new();
        for n in 2..=5 {
            let mesh = curve_mesh(&generate_disk_mesh(n).unwrap(), &case.domain, 2).unwrap();
            let disc = Discretization::new(&mesh, 2, None).unwrap();
            let dofs = lifted_interpolant(&case.u, &mesh, &disc, &case.domain).unwrap();
            h.push(mesh.h);
            e.push(volume_errors(&case, &mesh, &disc, &dofs).unwrap().0);
        }
        let orders = pair_orders(&h, &e).unwrap();
        assert!((orders.last().unwrap() - 3.0).abs() < 0.2, "{orders:?}");
    }

    #[test]
    fn order_examples() {
        assert_eq!(pair_orders(&[1.0, 0.5], &[1.0, 0.25]).unwrap(), vec![2.0]);
        assert_eq!(pair_orders(&[1.0, 0.5], &[1.0, 1.0]).unwrap(), vec![0.0]);
        assert!(matches!(pair_orders(&[1.0], &[1.0]), Err(Error::InsufficientData(_))));
        assert!(matches!(pair_orders(&[0.5, 1.0], &[1.0, 1.0]), Err(Error::InsufficientData(_))));
        let rep = |h: f64, e: f64| ErrorReport { h, e_l2_volume: e, e_h1_semi: e.sqrt(), e_l2_surface: e, dofs: 0, stats: None };
        let table = convergence_orders(&[rep(1.0, 1.0), rep(0.5, 0.25), rep(0.25, 0.0625)]).unwrap();
        assert_eq!(table.reported(), (2.0, 1.0, 2.0));
    }
}
