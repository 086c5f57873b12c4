//! Vector `P^k` Lagrange space on a curved mesh, element operators of the
//! discrete elasticity problem with the Robin term, and global assembly.

mod csr;

use std::collections::HashMap;
use std::path::Path;

pub use csr::{write_vector_market, CsrMatrix};

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::lift::{facet_reference_point, lift_from_parts, surface_from_parts};
use crate::linalg::{det, inverse, Mat, Point};
use crate::mesh::CurvedMesh;
use crate::refelem::{default_quadrature_degree, facet_quadrature, quadrature_rule, QuadratureRule, ReferenceBasis, Tabulation};

/// A vector field on the physical domain, used for sources and exact data.
pub type VectorField<'a, const D: usize> = &'a (dyn Fn(&Point<D>) -> Point<D> + Sync);

/// Constant Lamé coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialParams {
    pub mu: f64,
    pub lambda: f64,
}

impl MaterialParams {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu > 0.0 && lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("Lamé coefficients must be positive, got mu={mu}, lambda={lambda}")));
        }
        Ok(MaterialParams { mu, lambda })
    }
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams { mu: 1.0, lambda: 1.0 }
    }
}

/// `A ξ = 2μ ξ + λ tr(ξ) I` for symmetric `ξ`.
pub fn hooke_apply<const D: usize>(params: &MaterialParams, xi: &Mat<D>) -> Result<Mat<D>> {
    let asym = (xi - xi.transpose()).amax();
    if asym > 1e-12 {
        return Err(Error::NonSymmetricInput(asym));
    }
    Ok(xi * (2.0 * params.mu) + Mat::<D>::identity() * (params.lambda * xi.trace()))
}

/// Symmetric part of a displacement gradient.
pub fn strain<const D: usize>(grad_u: &Mat<D>) -> Mat<D> {
    (grad_u + grad_u.transpose()) * 0.5
}

/// Scalar `P^k` node numbering; vector dof `(node, comp)` is `node * D + comp`.
#[derive(Clone, Debug)]
pub struct FESpace<const D: usize> {
    pub degree: usize,
    pub basis: ReferenceBasis<D>,
    cell_nodes: Vec<usize>,
    pub n_scalar: usize,
    /// Scalar nodes lying on boundary facets, increasing.
    pub boundary_nodes: Vec<usize>,
}

type NodeKey = [(usize, usize); 4];

impl<const D: usize> FESpace<D> {
    /// Nodes shared between cells are identified through the global vertex
    /// numbers and lattice multi-indices of the affine base mesh.
    pub fn new(mesh: &CurvedMesh<D>, degree: usize) -> Result<Self> {
        let basis = ReferenceBasis::<D>::new(degree)?;
        let n_loc = basis.len();
        let mut keys: HashMap<NodeKey, usize> = HashMap::new();
        let mut cell_nodes = Vec::with_capacity(n_loc * mesh.n_cells());
        for c in 0..mesh.n_cells() {
            let verts = mesh.base.cell(c);
            for alpha in &basis.lattice.indices {
                let mut key = [(usize::MAX, 0); 4];
                let mut m = 0;
                for (i, &a) in alpha.iter().enumerate() {
                    if a > 0 {
                        key[m] = (verts[i], a);
                        m += 1;
                    }
                }
                key[..m].sort_unstable();
                let next = keys.len();
                cell_nodes.push(*keys.entry(key).or_insert(next));
            }
        }
        let mut on_boundary = vec![false; keys.len()];
        for &(c, f) in &mesh.base.boundary_facets {
            for j in basis.lattice.facet_nodes(f) {
                on_boundary[cell_nodes[c * n_loc + j]] = true;
            }
        }
        let boundary_nodes = (0..keys.len()).filter(|&i| on_boundary[i]).collect();
        Ok(FESpace { degree, basis, cell_nodes, n_scalar: keys.len(), boundary_nodes })
    }

    pub fn n_local(&self) -> usize {
        self.basis.len()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_scalar * D
    }

    pub fn cell_nodes(&self, c: usize) -> &[usize] {
        let n = self.n_local();
        &self.cell_nodes[c * n..(c + 1) * n]
    }

    /// Global vector dofs of a cell in local order `node * D + comp`.
    pub fn cell_dofs(&self, c: usize) -> Vec<usize> {
        self.cell_nodes(c).iter().flat_map(|&n| (0..D).map(move |a| n * D + a)).collect()
    }

    /// Physical position `F^(r)(x̂_i)` of every scalar node.
    pub fn node_coordinates(&self, mesh: &CurvedMesh<D>) -> Vec<Point<D>> {
        use crate::lift::InnerMap;
        let mut coords = vec![Point::<D>::zeros(); self.n_scalar];
        for c in 0..mesh.n_cells() {
            let map = mesh.element_map(c);
            for (i, &n) in self.cell_nodes(c).iter().enumerate() {
                coords[n] = map.point(&self.basis.node(i));
            }
        }
        coords
    }
}

/// Quadrature rules and basis tabulations shared by every element operator.
#[derive(Clone, Debug)]
pub struct Discretization<const D: usize> {
    pub space: FESpace<D>,
    pub quad: QuadratureRule,
    pub facet_quad: QuadratureRule,
    pub quad_points: Vec<Point<D>>,
    /// `facet_points[f][q]`: reference-cell point of facet quadrature point
    /// `q` on local face `f`.
    pub facet_points: Vec<Vec<Point<D>>>,
    pub fe_volume: Tabulation<D>,
    pub geo_volume: Tabulation<D>,
    pub fe_facet: Vec<Tabulation<D>>,
    pub geo_facet: Vec<Tabulation<D>>,
}

impl<const D: usize> Discretization<D> {
    /// `quad_degree` defaults to `2k + 2(r - 1) + 2` (capped at 20).
    pub fn new(mesh: &CurvedMesh<D>, degree: usize, quad_degree: Option<usize>) -> Result<Self> {
        let space = FESpace::new(mesh, degree)?;
        let q = quad_degree.unwrap_or_else(|| default_quadrature_degree(degree, mesh.order));
        let quad = quadrature_rule(D, q)?;
        let facet_quad = facet_quadrature(D, q)?;
        let quad_points: Vec<Point<D>> = quad.points.iter().map(|p| Point::<D>::from_fn(|j, _| p[j])).collect();
        let facet_points: Vec<Vec<Point<D>>> =
            (0..=D).map(|f| facet_quad.points.iter().map(|xi| facet_reference_point::<D>(f, xi)).collect()).collect();
        let fe_volume = space.basis.tabulate(&quad_points);
        let geo_volume = mesh.basis.tabulate(&quad_points);
        let fe_facet = facet_points.iter().map(|pts| space.basis.tabulate(pts)).collect();
        let geo_facet = facet_points.iter().map(|pts| mesh.basis.tabulate(pts)).collect();
        Ok(Discretization { space, quad, facet_quad, quad_points, facet_points, fe_volume, geo_volume, fe_facet, geo_facet })
    }

    pub fn n_dofs(&self) -> usize {
        self.space.n_dofs()
    }
}

/// `F^(r)` and `DF^(r)` at tabulated point `q`.
pub(crate) fn geometry_at<const D: usize>(control: &[Point<D>], tab: &Tabulation<D>, q: usize) -> (Point<D>, Mat<D>) {
    let mut x = Point::<D>::zeros();
    let mut jac = Mat::<D>::zeros();
    for ((p, v), g) in control.iter().zip(tab.values_at(q)).zip(tab.grads_at(q)) {
        x += p * *v;
        jac += p * g.transpose();
    }
    (x, jac)
}

/// Local stiffness matrix, row-major over local dofs `node * D + comp`.
pub fn element_stiffness<const D: usize>(
    mesh: &CurvedMesh<D>,
    disc: &Discretization<D>,
    params: &MaterialParams,
    cell: usize,
) -> Result<Vec<f64>> {
    let n_loc = disc.space.n_local();
    let nd = n_loc * D;
    let mut k = vec![0.0; nd * nd];
    let control = mesh.control_points(cell);
    let mut g = vec![Point::<D>::zeros(); n_loc];
    for (q, w) in disc.quad.weights.iter().enumerate() {
        let (_, jac) = geometry_at(control, &disc.geo_volume, q);
        let detj = det(&jac);
        if detj <= 0.0 {
            return Err(Error::InvertedElement { cell, det: detj });
        }
        let inv_t = inverse(&jac).ok_or(Error::InvertedElement { cell, det: detj })?.transpose();
        for (gi, ghat) in g.iter_mut().zip(disc.fe_volume.grads_at(q)) {
            *gi = inv_t * ghat;
        }
        let scale = w * detj;
        for i in 0..n_loc {
            for j in 0..n_loc {
                let gij = g[i].dot(&g[j]);
                for a in 0..D {
                    let row = (i * D + a) * nd + j * D;
                    for b in 0..D {
                        let mut v = params.mu * g[i][b] * g[j][a] + params.lambda * g[i][a] * g[j][b];
                        if a == b {
                            v += params.mu * gij;
                        }
                        k[row + b] += scale * v;
                    }
                }
            }
        }
    }
    Ok(k)
}

/// Robin mass matrix of a boundary facet, over the local dofs of the whole
/// cell (entries vanish off the facet).
pub fn boundary_mass<const D: usize>(
    mesh: &CurvedMesh<D>,
    disc: &Discretization<D>,
    domain: &Domain<D>,
    cell: usize,
    face: usize,
) -> Result<Vec<f64>> {
    let n_loc = disc.space.n_local();
    let nd = n_loc * D;
    let mut m = vec![0.0; nd * nd];
    let control = mesh.control_points(cell);
    let fe = &disc.fe_facet[face];
    for (q, w) in disc.facet_quad.weights.iter().enumerate() {
        let (x, jac) = geometry_at(control, &disc.geo_facet[face], q);
        let s = surface_from_parts(domain, cell, face, x, &jac)?;
        let phi = fe.values_at(q);
        for i in 0..n_loc {
            if phi[i] == 0.0 {
                continue;
            }
            for j in 0..n_loc {
                let v = w * s.ds_h * phi[i] * phi[j];
                for a in 0..D {
                    m[(i * D + a) * nd + j * D + a] += v;
                }
            }
        }
    }
    Ok(m)
}

/// `∫_T f(G_h(x)) · φ_i J_h dx`, evaluated on the reference cell.
pub fn element_load<const D: usize>(
    mesh: &CurvedMesh<D>,
    disc: &Discretization<D>,
    domain: &Domain<D>,
    f: VectorField<'_, D>,
    cell: usize,
) -> Result<Vec<f64>> {
    let n_loc = disc.space.n_local();
    let mut load = vec![0.0; n_loc * D];
    let control = mesh.control_points(cell);
    for (q, w) in disc.quad.weights.iter().enumerate() {
        let (x, jac) = geometry_at(control, &disc.geo_volume, q);
        let lift = lift_from_parts(mesh, domain, cell, &disc.quad_points[q], x, jac)?;
        let fz = f(&lift.z) * (w * lift.j_h * det(&jac));
        for (i, phi) in disc.fe_volume.values_at(q).iter().enumerate() {
            for a in 0..D {
                load[i * D + a] += fz[a] * phi;
            }
        }
    }
    Ok(load)
}

/// `∫_F g(b(x)) · φ_i J_b ds_h` over a boundary facet.
pub fn boundary_load<const D: usize>(
    mesh: &CurvedMesh<D>,
    disc: &Discretization<D>,
    domain: &Domain<D>,
    g: VectorField<'_, D>,
    cell: usize,
    face: usize,
) -> Result<Vec<f64>> {
    let n_loc = disc.space.n_local();
    let mut load = vec![0.0; n_loc * D];
    let control = mesh.control_points(cell);
    for (q, w) in disc.facet_quad.weights.iter().enumerate() {
        let (x, jac) = geometry_at(control, &disc.geo_facet[face], q);
        let s = surface_from_parts(domain, cell, face, x, &jac)?;
        let gb = g(&s.bx) * (w * s.j_b * s.ds_h);
        for (i, phi) in disc.fe_facet[face].values_at(q).iter().enumerate() {
            for a in 0..D {
                load[i * D + a] += gb[a] * phi;
            }
        }
    }
    Ok(load)
}

/// Global matrix and right-hand side.
#[derive(Clone, Debug)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

impl SparseSystem {
    pub fn n(&self) -> usize {
        self.rhs.len()
    }

    /// Dumps `A` and `b` as `<stem>.mtx` and `<stem>_rhs.mtx`.
    pub fn write_matrix_market(&self, dir: &Path, stem: &str) -> Result<()> {
        self.matrix.write_matrix_market(&dir.join(format!("{stem}.mtx")))?;
        write_vector_market(&self.rhs, &dir.join(format!("{stem}_rhs.mtx")))
    }
}

/// Sparsity pattern coupling every pair of dofs sharing a cell.
pub fn sparsity_pattern<const D: usize>(space: &FESpace<D>, n_cells: usize) -> CsrMatrix {
    let mut node_cells: Vec<Vec<u32>> = vec![Vec::new(); space.n_scalar];
    for c in 0..n_cells {
        for &i in space.cell_nodes(c) {
            node_cells[i].push(csr::index(c));
        }
    }
    let mut row_ptr = Vec::with_capacity(space.n_dofs() + 1);
    row_ptr.push(0);
    let mut col_idx = Vec::new();
    let mut adj = Vec::new();
    for cells in &node_cells {
        adj.clear();
        for &c in cells {
            adj.extend_from_slice(space.cell_nodes(c as usize));
        }
        adj.sort_unstable();
        adj.dedup();
        for _ in 0..D {
            col_idx.extend(adj.iter().flat_map(|&n| (0..D).map(move |b| csr::index(n * D + b))));
            row_ptr.push(col_idx.len());
        }
    }
    col_idx.shrink_to_fit();
    CsrMatrix::from_raw(space.n_dofs(), row_ptr, col_idx)
}

/// Assembles `a_h` and `l_h` cell by cell in increasing cell order, then the
/// boundary facets in their stored order.
pub fn assemble_system<const D: usize>(
    mesh: &CurvedMesh<D>,
    disc: &Discretization<D>,
    params: &MaterialParams,
    domain: &Domain<D>,
    f: VectorField<'_, D>,
    g: VectorField<'_, D>,
) -> Result<SparseSystem> {
    let space = &disc.space;
    let mut matrix = sparsity_pattern(space, mesh.n_cells());
    let mut rhs = vec![0.0; space.n_dofs()];
    let scatter = |matrix: &mut CsrMatrix, dofs: &[usize], local: &[f64]| {
        let nd = dofs.len();
        for (i, &gi) in dofs.iter().enumerate() {
            for (j, &gj) in dofs.iter().enumerate() {
                let v = local[i * nd + j];
                if v != 0.0 {
                    matrix.add(gi, gj, v);
                }
            }
        }
    };
    for c in 0..mesh.n_cells() {
        let dofs = space.cell_dofs(c);
        scatter(&mut matrix, &dofs, &element_stiffness(mesh, disc, params, c)?);
        for (&gi, v) in dofs.iter().zip(element_load(mesh, disc, domain, f, c)?) {
            rhs[gi] += v;
        }
    }
    for &(c, face) in &mesh.base.boundary_facets {
        let dofs = space.cell_dofs(c);
        scatter(&mut matrix, &dofs, &boundary_mass(mesh, disc, domain, c, face)?);
        for (&gi, v) in dofs.iter().zip(boundary_load(mesh, disc, domain, g, c, face)?) {
            rhs[gi] += v;
        }
    }
    Ok(SparseSystem { matrix, rhs })
}

/// Measure of the curved boundary `Γ_h`.
pub fn boundary_measure<const D: usize>(mesh: &CurvedMesh<D>, disc: &Discretization<D>) -> f64 {
    let mut total = 0.0;
    for &(c, face) in &mesh.base.boundary_facets {
        let control = mesh.control_points(c);
        for (q, w) in disc.facet_quad.weights.iter().enumerate() {
            let (_, jac) = geometry_at(control, &disc.geo_facet[face], q);
            let tangents: Vec<Point<D>> = crate::lift::facet_tangents::<D>(face).iter().map(|t| jac * t).collect();
            total += w * crate::linalg::gram_sqrt(&tangents);
        }
    }
    total
}

#[cfg(test)]
mod tests;
