use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{Vector2, Vector3};

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::linalg::{det, gram_sqrt, Mat, Point};
use crate::refelem::facet_vertices;

/// Tolerance on `|d|` for flagging generated vertices as boundary vertices.
pub const GENERATED_BOUNDARY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementClass {
    /// Fewer than two vertices on the boundary: the exact map is affine.
    Internal,
    /// At least two vertices on the boundary.
    NonInternal,
}

/// Straight-sided simplicial mesh.
#[derive(Clone, Debug)]
pub struct AffineMesh<const D: usize> {
    pub vertices: Vec<Point<D>>,
    cells: Vec<usize>,
    /// `ε_i`: vertex lies on the physical boundary.
    pub boundary_vertex: Vec<bool>,
    /// `(cell, local face)`; local face `j` is opposite local vertex `j`.
    pub boundary_facets: Vec<(usize, usize)>,
}

impl<const D: usize> AffineMesh<D> {
    /// Builds a mesh, flagging vertices with `|d| <= tol` as boundary
    /// vertices.
    pub fn new(vertices: Vec<Point<D>>, cells: Vec<[usize; 4]>, domain: &Domain<D>, tol: f64) -> Result<Self> {
        let flags = vertices.iter().map(|v| domain.signed_distance(v).abs() <= tol).collect();
        Self::from_parts(vertices, cells, flags)
    }

    /// Builds a mesh from explicit boundary flags. Only the first `D + 1`
    /// entries of each cell are used.
    pub fn from_parts(vertices: Vec<Point<D>>, cells: Vec<[usize; 4]>, boundary_vertex: Vec<bool>) -> Result<Self> {
        if boundary_vertex.len() != vertices.len() {
            return Err(Error::InvalidArgument("boundary flag count differs from vertex count".into()));
        }
        let mut flat = Vec::with_capacity(cells.len() * (D + 1));
        for c in &cells {
            for &v in &c[..=D] {
                if v >= vertices.len() {
                    return Err(Error::InvalidArgument(format!("cell references missing vertex {v}")));
                }
                flat.push(v);
            }
        }
        let mut mesh = AffineMesh { vertices, cells: flat, boundary_vertex, boundary_facets: Vec::new() };
        for c in 0..mesh.n_cells() {
            let det = det(&mesh.affine_jacobian(c));
            if det <= 0.0 {
                return Err(Error::InvertedElement { cell: c, det });
            }
        }
        mesh.boundary_facets = mesh.find_boundary_facets()?;
        Ok(mesh)
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len() / (D + 1)
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        &self.cells[c * (D + 1)..(c + 1) * (D + 1)]
    }

    /// Boundary flags of the vertices of a cell, in local order.
    pub fn cell_eps(&self, c: usize) -> [bool; 4] {
        let mut eps = [false; 4];
        for (i, &v) in self.cell(c).iter().enumerate() {
            eps[i] = self.boundary_vertex[v];
        }
        eps
    }

    /// `B = [v1 - v0, ..., vD - v0]` of the affine map `F_T(x̂) = v0 + B x̂`.
    pub fn affine_jacobian(&self, c: usize) -> Mat<D> {
        let cell = self.cell(c);
        let v0 = self.vertices[cell[0]];
        let mut b = Mat::<D>::zeros();
        for j in 0..D {
            b.set_column(j, &(self.vertices[cell[j + 1]] - v0));
        }
        b
    }

    pub fn affine_map(&self, c: usize) -> AffineMap<D> {
        AffineMap { origin: self.vertices[self.cell(c)[0]], jacobian: self.affine_jacobian(c) }
    }

    pub fn cell_measure(&self, c: usize) -> f64 {
        det(&self.affine_jacobian(c)) / (1..=D).product::<usize>() as f64
    }

    /// Largest vertex-to-vertex distance of a cell.
    pub fn diameter(&self, c: usize) -> f64 {
        let cell = self.cell(c);
        let mut diam: f64 = 0.0;
        for i in 0..=D {
            for j in i + 1..=D {
                diam = diam.max((self.vertices[cell[i]] - self.vertices[cell[j]]).norm());
            }
        }
        diam
    }

    pub fn facet_measure(&self, c: usize, face: usize) -> f64 {
        let cell = self.cell(c);
        let verts = facet_vertices(D, face);
        let p0 = self.vertices[cell[verts[0]]];
        let tangents: Vec<Point<D>> = verts[1..].iter().map(|&v| self.vertices[cell[v]] - p0).collect();
        let scale = if D == 3 { 0.5 } else { 1.0 };
        gram_sqrt(&tangents) * scale
    }

    /// Inscribed radius `D |T| / Σ |facets|`.
    pub fn inradius(&self, c: usize) -> f64 {
        let perimeter: f64 = (0..=D).map(|f| self.facet_measure(c, f)).sum();
        D as f64 * self.cell_measure(c) / perimeter
    }

    /// Mesh size: maximum cell diameter.
    pub fn h(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.diameter(c)).fold(0.0, f64::max)
    }

    /// Minimum over cells of inradius / diameter.
    pub fn min_shape_ratio(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.inradius(c) / self.diameter(c)).fold(f64::INFINITY, f64::min)
    }

    pub fn total_measure(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.cell_measure(c)).sum()
    }

    pub fn boundary_measure(&self) -> f64 {
        self.boundary_facets.iter().map(|&(c, f)| self.facet_measure(c, f)).sum()
    }

    fn facet_key(&self, c: usize, face: usize) -> Vec<usize> {
        let cell = self.cell(c);
        let mut key: Vec<usize> = facet_vertices(D, face).iter().map(|&v| cell[v]).collect();
        key.sort_unstable();
        key
    }

    /// Counts how many cells share each facet. Watertight meshes have counts
    /// of 1 (boundary) or 2 (interior) only.
    pub fn facet_multiplicities(&self) -> HashMap<Vec<usize>, Vec<(usize, usize)>> {
        let mut map: HashMap<Vec<usize>, Vec<(usize, usize)>> = HashMap::new();
        for c in 0..self.n_cells() {
            for f in 0..=D {
                map.entry(self.facet_key(c, f)).or_default().push((c, f));
            }
        }
        map
    }

    fn find_boundary_facets(&self) -> Result<Vec<(usize, usize)>> {
        let mut facets = Vec::new();
        for (key, owners) in self.facet_multiplicities() {
            match owners.len() {
                1 => facets.push(owners[0]),
                2 => {}
                n => return Err(Error::Assertion(format!("facet {key:?} shared by {n} cells"))),
            }
        }
        facets.sort_unstable();
        Ok(facets)
    }

    /// Checks that every vertex of every boundary facet is flagged as a
    /// boundary vertex.
    pub fn check_boundary_flags(&self) -> Result<()> {
        for &(c, f) in &self.boundary_facets {
            let cell = self.cell(c);
            if facet_vertices(D, f).iter().any(|&v| !self.boundary_vertex[cell[v]]) {
                return Err(Error::Assertion(format!(
                    "boundary facet {f} of cell {c} has a vertex that is not on the boundary"
                )));
            }
        }
        Ok(())
    }
}

/// `F_T(x̂) = origin + jacobian · x̂`.
#[derive(Clone, Copy, Debug)]
pub struct AffineMap<const D: usize> {
    pub origin: Point<D>,
    pub jacobian: Mat<D>,
}

/// NonInternal iff the cell has at least two boundary vertices.
pub fn classify_elements<const D: usize>(mesh: &AffineMesh<D>) -> Result<Vec<ElementClass>> {
    (0..mesh.n_cells())
        .map(|c| {
            let count = mesh.cell(c).iter().filter(|&&v| mesh.boundary_vertex[v]).count();
            if count == D + 1 {
                Err(Error::Assertion(format!("cell {c} has all {} vertices on the boundary", D + 1)))
            } else if count >= 2 {
                Ok(ElementClass::NonInternal)
            } else {
                Ok(ElementClass::Internal)
            }
        })
        .collect()
}

/// Number of boundary edges (disk) or equator edges (ball) at level `n`.
pub fn boundary_edge_count(n: usize) -> usize {
    10 << (n - 1)
}

fn check_level(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::InvalidArgument(format!("refinement level {n} outside 1..={max}")));
    }
    Ok(())
}

/// Quasi-uniform triangulation of the unit disk with `10·2^{n-1}` boundary
/// edges.
///
/// Vertices sit on `L = 2^n` concentric rings, ring `l` at radius `l/L`
/// carrying `5l` equally spaced vertices (so the tangential spacing equals
/// the boundary edge length). Consecutive rings are stitched by an angular
/// sweep; the first ring is joined to the centre by a fan.
pub fn generate_disk_mesh(n: usize) -> Result<AffineMesh<2>> {
    check_level(n, 8)?;
    let rings = 1usize << n;
    let mut vertices = vec![Vector2::zeros()];
    let mut ring_start = vec![0usize];
    let mut ring_len = vec![1usize];
    for l in 1..=rings {
        ring_start.push(vertices.len());
        ring_len.push(5 * l);
        let radius = l as f64 / rings as f64;
        for j in 0..5 * l {
            let theta = 2.0 * PI * j as f64 / (5 * l) as f64;
            let p = if l == rings {
                Vector2::new(theta.cos(), theta.sin())
            } else {
                Vector2::new(radius * theta.cos(), radius * theta.sin())
            };
            vertices.push(p);
        }
    }

    let mut cells: Vec<[usize; 4]> = Vec::new();
    for j in 0..5 {
        let b = ring_start[1];
        cells.push([0, b + j, b + (j + 1) % 5, 0]);
    }
    for l in 2..=rings {
        let (a0, m) = (ring_start[l - 1], ring_len[l - 1]);
        let (b0, p) = (ring_start[l], ring_len[l]);
        let angle = |k: usize, len: usize| 2.0 * PI * k as f64 / len as f64;
        let (mut i, mut j) = (0usize, 0usize);
        while i < m || j < p {
            let next_a = angle(i + 1, m);
            let next_b = angle(j + 1, p);
            let advance_b = j < p && (i == m || next_b <= next_a + 1e-12);
            if advance_b {
                cells.push([a0 + i % m, b0 + j % p, b0 + (j + 1) % p, 0]);
                j += 1;
            } else {
                cells.push([a0 + i % m, b0 + j % p, a0 + (i + 1) % m, 0]);
                i += 1;
            }
        }
    }
    orient(&vertices, &mut cells);
    let flags = (0..vertices.len()).map(|v| v >= ring_start[rings]).collect();
    let mesh = AffineMesh::from_parts(vertices, cells, flags)?;
    debug_assert_eq!(mesh.boundary_facets.len(), boundary_edge_count(n));
    Ok(mesh)
}

/// Tetrahedral mesh of the unit ball with `10·2^{n-1}` edges on the equator.
///
/// The seed is a pentagonal bipyramid coned to the centre (10 tetrahedra).
/// It is red-refined `n` times, then every vertex `p` is moved radially.
/// With `g(p)` the gauge of `p` with respect to the bipyramid (its layer
/// index in `[0, 1]`), the radial factor blends a uniform scaling in the core
/// with the gauge map `p ↦ g(p) p / |p|` near the surface, using the weight
/// `g²`. Boundary vertices land exactly on the sphere.
pub fn generate_ball_mesh(n: usize) -> Result<AffineMesh<3>> {
    check_level(n, 5)?;
    let mut vertices = vec![Vector3::zeros(), Vector3::new(0.0, 0.0, 1.0), Vector3::new(0.0, 0.0, -1.0)];
    for i in 0..5 {
        let t = 2.0 * PI * i as f64 / 5.0;
        vertices.push(Vector3::new(t.cos(), t.sin(), 0.0));
    }
    let mut cells: Vec<[usize; 4]> = Vec::new();
    let mut planes = Vec::new();
    for i in 0..5 {
        let (a, b) = (3 + i, 3 + (i + 1) % 5);
        for pole in [1, 2] {
            cells.push([0, a, b, pole]);
            let (p, q, r) = (vertices[a], vertices[b], vertices[pole]);
            let mut normal = (q - p).cross(&(r - p)).normalize();
            if normal.dot(&p) < 0.0 {
                normal = -normal;
            }
            planes.push((normal, normal.dot(&p)));
        }
    }
    let radial_map = |p: &Vector3<f64>| -> Vector3<f64> {
        let r = p.norm();
        if r == 0.0 {
            return *p;
        }
        let gauge = planes.iter().map(|(nrm, c)| nrm.dot(p) / c).fold(0.0, f64::max).min(1.0);
        let w = gauge * gauge;
        p * ((1.0 - w) * INTERIOR_SCALE + w * gauge / r)
    };

    for _ in 0..n {
        red_refine(&mut vertices, &mut cells, &radial_map);
    }
    let boundary = boundary_flags(vertices.len(), &cells);
    for (v, p) in vertices.iter_mut().enumerate() {
        *p = if boundary[v] { p.normalize() } else { radial_map(p) };
    }
    orient(&vertices, &mut cells);
    AffineMesh::from_parts(vertices, cells, boundary)
}

/// Uniform scaling applied to the core of the bipyramid.
const INTERIOR_SCALE: f64 = 1.1;

fn boundary_flags(n_vertices: usize, cells: &[[usize; 4]]) -> Vec<bool> {
    let mut count: HashMap<[usize; 3], usize> = HashMap::new();
    for c in cells {
        for f in 0..4 {
            let mut key = [0; 3];
            let mut m = 0;
            for (i, &v) in c.iter().enumerate() {
                if i != f {
                    key[m] = v;
                    m += 1;
                }
            }
            key.sort_unstable();
            *count.entry(key).or_default() += 1;
        }
    }
    let mut boundary = vec![false; n_vertices];
    for (key, k) in count {
        if k == 1 {
            for v in key {
                boundary[v] = true;
            }
        }
    }
    boundary
}

fn tet_quality(p: [Vector3<f64>; 4]) -> f64 {
    let vol = (p[1] - p[0]).cross(&(p[2] - p[0])).dot(&(p[3] - p[0])).abs() / 6.0;
    let mut area = 0.0;
    let mut diam: f64 = 0.0;
    for f in 0..4 {
        let q: Vec<Vector3<f64>> = (0..4).filter(|&i| i != f).map(|i| p[i]).collect();
        area += (q[1] - q[0]).cross(&(q[2] - q[0])).norm() / 2.0;
        for j in f + 1..4 {
            diam = diam.max((p[f] - p[j]).norm());
        }
    }
    3.0 * vol / area / diam
}

/// One step of red (octasection) refinement. The interior octahedron is
/// split along the diagonal whose four tetrahedra have the best worst-case
/// shape once mapped by `map`.
fn red_refine(vertices: &mut Vec<Vector3<f64>>, cells: &mut Vec<[usize; 4]>, map: &impl Fn(&Vector3<f64>) -> Vector3<f64>) {
    let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
    let mut mid = |a: usize, b: usize, vertices: &mut Vec<Vector3<f64>>| -> usize {
        let key = (a.min(b), a.max(b));
        *midpoints.entry(key).or_insert_with(|| {
            vertices.push((vertices[a] + vertices[b]) / 2.0);
            vertices.len() - 1
        })
    };
    let mut refined = Vec::with_capacity(cells.len() * 8);
    for c in cells.iter() {
        let [x0, x1, x2, x3] = *c;
        let m01 = mid(x0, x1, vertices);
        let m02 = mid(x0, x2, vertices);
        let m03 = mid(x0, x3, vertices);
        let m12 = mid(x1, x2, vertices);
        let m13 = mid(x1, x3, vertices);
        let m23 = mid(x2, x3, vertices);
        refined.push([x0, m01, m02, m03]);
        refined.push([m01, x1, m12, m13]);
        refined.push([m02, m12, x2, m23]);
        refined.push([m03, m13, m23, x3]);
        let diagonals = [(m01, m23, [m02, m03, m13, m12]), (m02, m13, [m01, m03, m23, m12]), (m03, m12, [m01, m02, m23, m13])];
        let score = |&(p, q, ring): &(usize, usize, [usize; 4])| {
            (0..4)
                .map(|i| tet_quality([p, q, ring[i], ring[(i + 1) % 4]].map(|v| map(&vertices[v]))))
                .fold(f64::INFINITY, f64::min)
        };
        let (p, q, ring) = diagonals
            .iter()
            .max_by(|a, b| score(a).partial_cmp(&score(b)).unwrap())
            .copied()
            .unwrap();
        for i in 0..4 {
            refined.push([p, q, ring[i], ring[(i + 1) % 4]]);
        }
    }
    *cells = refined;
}

/// Swaps two vertices of every negatively oriented cell.
fn orient<const D: usize>(vertices: &[Point<D>], cells: &mut [[usize; 4]]) {
    for c in cells.iter_mut() {
        let mut b = Mat::<D>::zeros();
        for j in 0..D {
            b.set_column(j, &(vertices[c[j + 1]] - vertices[c[0]]));
        }
        if det(&b) < 0.0 {
            c.swap(1, 2);
        }
    }
}
