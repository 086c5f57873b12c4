use super::*;
use crate::geometry::Domain;
use crate::linalg::ddot;
use crate::mesh::{curve_mesh, generate_ball_mesh, generate_disk_mesh, AffineMesh};
use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn unit_params() -> MaterialParams {
    MaterialParams::new(1.0, 1.0).unwrap()
}

#[test]
fn hooke_examples() {
    let p = unit_params();
    assert_eq!(hooke_apply(&p, &Matrix2::identity()).unwrap(), Matrix2::identity() * 4.0);
    let xi = Matrix2::new(0.0, 1.0, 1.0, 0.0);
    assert_eq!(hooke_apply(&p, &xi).unwrap(), Matrix2::new(0.0, 2.0, 2.0, 0.0));
    let p = MaterialParams::new(2.0, 3.0).unwrap();
    let out = hooke_apply(&p, &Matrix3::from_diagonal(&Vector3::new(1.0, 0.0, 0.0))).unwrap();
    assert_eq!(out, Matrix3::from_diagonal(&Vector3::new(7.0, 3.0, 3.0)));
    assert!(matches!(hooke_apply(&p, &Matrix2::new(0.0, 1.0, 0.0, 0.0)), Err(Error::NonSymmetricInput(_))));
    assert!(MaterialParams::new(0.0, 1.0).is_err());
}

#[test]
fn strain_examples() {
    assert_eq!(strain(&Matrix2::identity()), Matrix2::identity());
    assert_eq!(strain(&Matrix2::new(0.0, 1.0, 0.0, 0.0)), Matrix2::new(0.0, 0.5, 0.5, 0.0));
    // u = (x e^y, y^3 x) at the origin: grad = [[e^y, x e^y], [y^3, 3 x y^2]].
    let grad = Matrix2::new(1.0, 0.0, 0.0, 0.0);
    assert_eq!(strain(&grad), Matrix2::new(1.0, 0.0, 0.0, 0.0));
}

fn tensor_identities<const D: usize>(rng: &mut ChaCha8Rng) {
    let p = MaterialParams::new(rng.random_range(0.1..3.0), rng.random_range(0.1..3.0)).unwrap();
    for _ in 0..100 {
        let m = Mat::<D>::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let n = Mat::<D>::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let ae = hooke_apply(&p, &strain(&m)).unwrap();
        assert!((ddot(&ae, &strain(&n)) - ddot(&ae, &n)).abs() < 1e-13);
        let expanded = p.mu * (ddot(&m, &n) + ddot(&m.transpose(), &n)) + p.lambda * m.trace() * n.trace();
        assert!((ddot(&ae, &n) - expanded).abs() < 1e-13);
    }
}

#[test]
fn hooke_tensor_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    tensor_identities::<2>(&mut rng);
    tensor_identities::<3>(&mut rng);
}

fn single_cell<const D: usize>(vertices: Vec<Point<D>>, degree: usize) -> (CurvedMesh<D>, Discretization<D>) {
    let n = vertices.len();
    let base = AffineMesh::from_parts(vertices, vec![[0, 1, 2, 3.min(n - 1)]], vec![false; n]).unwrap();
    let mesh = curve_mesh(&base, &Domain::<D>::level_set(std::sync::Arc::new(Flat), 1.0), 1).unwrap();
    let disc = Discretization::new(&mesh, degree, None).unwrap();
    (mesh, disc)
}

/// Half-space `x_0 < 2`, only used to satisfy the domain argument.
struct Flat;

impl<const D: usize> crate::geometry::LevelSet<D> for Flat {
    fn value(&self, x: &Point<D>) -> f64 {
        x[0] - 2.0
    }
    fn gradient(&self, _: &Point<D>) -> Point<D> {
        let mut g = Point::<D>::zeros();
        g[0] = 1.0;
        g
    }
    fn hessian(&self, _: &Point<D>) -> Mat<D> {
        Mat::<D>::zeros()
    }
}

#[test]
fn p1_stiffness_on_unit_triangle() {
    let (mesh, disc) = single_cell(vec![Vector2::zeros(), Vector2::new(1.0, 0.0), Vector2::new(0.0, 1.0)], 1);
    let k = element_stiffness(&mesh, &disc, &MaterialParams { mu: 1.0, lambda: 0.0 }, 0).unwrap();
    // Oracle: φ_0 = 1 - x - y has gradient (-1, -1); the (0x, 0x) entry is
    // area * (|∇φ_0|² + (∂_x φ_0)²) = 0.5 * (2 + 1).
    assert!((k[0] - 1.5).abs() < 1e-14);
    // Full oracle for all entries with constant gradients.
    let grads = [Vector2::new(-1.0, -1.0), Vector2::new(1.0, 0.0), Vector2::new(0.0, 1.0)];
    for i in 0..3 {
        for j in 0..3 {
            for a in 0..2 {
                for b in 0..2 {
                    let mut v = grads[i][b] * grads[j][a];
                    if a == b {
                        v += grads[i].dot(&grads[j]);
                    }
                    assert!((k[(i * 2 + a) * 6 + j * 2 + b] - 0.5 * v).abs() < 1e-14);
                }
            }
        }
    }
}

#[test]
fn stiffness_symmetric_and_kills_translations() {
    let dom = Domain::unit_disk();
    let mesh = curve_mesh(&generate_disk_mesh(2).unwrap(), &dom, 3).unwrap();
    let p = MaterialParams::new(1.3, 0.7).unwrap();
    for k in 1..=4 {
        let disc = Discretization::new(&mesh, k, None).unwrap();
        let nd = disc.space.n_local() * 2;
        for c in [0, mesh.n_cells() - 1] {
            let m = element_stiffness(&mesh, &disc, &p, c).unwrap();
            let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            for i in 0..nd {
                for j in 0..nd {
                    assert!((m[i * nd + j] - m[j * nd + i]).abs() <= 1e-13 * scale);
                }
                let t: f64 = (0..nd).map(|j| m[i * nd + j] * if j % 2 == 0 { 0.3 } else { -1.1 }).sum();
                assert!(t.abs() < 1e-11 * scale.max(1.0));
            }
        }
    }
}

#[test]
fn p1_boundary_mass_on_straight_facet() {
    let (mesh, disc) = single_cell(vec![Vector2::zeros(), Vector2::new(1.5, 0.0), Vector2::new(0.0, 1.0)], 1);
    let dom = Domain::<2>::level_set(std::sync::Arc::new(Flat), 3.0);
    // Face 2 is the edge (v0, v1) of length 1.5.
    let m = boundary_mass(&mesh, &disc, &dom, 0, 2).unwrap();
    let len = 1.5;
    assert!((m[0] - len / 3.0).abs() < 1e-14);
    // Row x-dof of node 0, column x-dof of node 1.
    assert!((m[2] - len / 6.0).abs() < 1e-14);
    assert_eq!(m[1], 0.0);
    let mut total = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            total += m[(i * 2) * 6 + j * 2];
        }
    }
    assert!((total - len).abs() < 1e-14);
}

#[test]
fn p1_constant_load() {
    let v = vec![Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0), Vector3::new(0.2, 0.9, 0.0), Vector3::new(0.1, 0.3, 0.7)];
    let (mesh, disc) = single_cell(v, 1);
    let dom = Domain::<3>::level_set(std::sync::Arc::new(Flat), 3.0);
    let c = Vector3::new(2.0, -1.0, 0.5);
    let f = move |_: &Point<3>| c;
    let load = element_load(&mesh, &disc, &dom, &f, 0).unwrap();
    let vol = mesh.base.cell_measure(0);
    for i in 0..4 {
        for a in 0..3 {
            assert!((load[i * 3 + a] - c[a] * vol / 4.0).abs() < 1e-14);
        }
    }
    let zero = |_: &Point<3>| Vector3::zeros();
    assert!(element_load(&mesh, &disc, &dom, &zero, 0).unwrap().iter().all(|&v| v == 0.0));
}

#[test]
fn constant_boundary_load_gives_circumference() {
    let dom = Domain::unit_disk();
    let mesh = curve_mesh(&generate_disk_mesh(3).unwrap(), &dom, 2).unwrap();
    let disc = Discretization::new(&mesh, 2, None).unwrap();
    let c = Vector2::new(1.5, -0.25);
    let g = move |_: &Point<2>| c;
    let mut total = Vector2::zeros();
    for &(cell, face) in &mesh.base.boundary_facets {
        let load = boundary_load(&mesh, &disc, &dom, &g, cell, face).unwrap();
        for i in 0..disc.space.n_local() {
            total += Vector2::new(load[i * 2], load[i * 2 + 1]);
        }
    }
    assert!((total - c * 2.0 * PI).norm() < 1e-10, "{total:?}");
}

#[test]
fn assembled_system_health() {
    let dom = Domain::unit_disk();
    let mesh = curve_mesh(&generate_disk_mesh(2).unwrap(), &dom, 2).unwrap();
    let disc = Discretization::new(&mesh, 2, None).unwrap();
    let f = |x: &Point<2>| Vector2::new(x[0], x[1] * x[1]);
    let sys = assemble_system(&mesh, &disc, &unit_params(), &dom, &f, &f).unwrap();
    assert!(sys.matrix.asymmetry() <= 1e-12 * sys.matrix.max_abs());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let x: Vec<f64> = (0..sys.n()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ax = sys.matrix.matvec(&x);
        assert!(x.iter().zip(&ax).map(|(a, b)| a * b).sum::<f64>() > 0.0);
    }
    let c = [0.7, -1.2];
    let x: Vec<f64> = (0..sys.n()).map(|i| c[i % 2]).collect();
    let energy: f64 = x.iter().zip(sys.matrix.matvec(&x)).map(|(a, b)| a * b).sum();
    let expected = boundary_measure(&mesh, &disc) * (c[0] * c[0] + c[1] * c[1]);
    assert!((energy - expected).abs() <= 1e-10 * expected);
}

#[test]
fn dofs_are_shared_across_cells() {
    let dom = Domain::unit_ball();
    let mesh = curve_mesh(&generate_ball_mesh(1).unwrap(), &dom, 1).unwrap();
    for k in 1..=3 {
        let space = FESpace::new(&mesh, k).unwrap();
        let coords = space.node_coordinates(&mesh);
        // Every lattice node sits at a unique position on the affine mesh.
        let mut seen = std::collections::HashMap::new();
        for (n, p) in coords.iter().enumerate() {
            let key = (p * 1e9).map(|v| v.round() as i64);
            assert!(seen.insert((key[0], key[1], key[2]), n).is_none());
        }
        for c in 0..mesh.n_cells() {
            let map = mesh.element_map(c);
            for (i, &n) in space.cell_nodes(c).iter().enumerate() {
                use crate::lift::InnerMap;
                assert!((map.point(&space.basis.node(i)) - coords[n]).norm() < 1e-13);
            }
        }
        let v = mesh.base.vertices.len();
        let e = mesh.base.facet_multiplicities().len();
        let expected = match k {
            1 => v,
            2 => v + edge_count(&mesh),
            _ => v + 2 * edge_count(&mesh) + e,
        };
        assert_eq!(space.n_scalar, expected, "k={k}");
    }
}

fn edge_count(mesh: &CurvedMesh<3>) -> usize {
    let mut edges = std::collections::HashSet::new();
    for c in 0..mesh.n_cells() {
        let cell = mesh.base.cell(c);
        for i in 0..4 {
            for j in i + 1..4 {
                edges.insert((cell[i].min(cell[j]), cell[i].max(cell[j])));
            }
        }
    }
    edges.len()
}
